#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ogawa/basis_catalog.hpp"
#include "ogawa/grid.hpp"
#include "ogawa/path_model.hpp"

namespace ogawa {

/// A C^1 vector field alpha: R^d -> R^d with an evaluable Jacobian.
/// Jacobians are row-major d x d, entry (j, m) = d alpha_j / d x_m.
class VectorField {
 public:
  using Map = std::function<void(std::span<const double>, std::span<double>)>;

  VectorField(std::string label, std::size_t dim, Map value, Map jacobian,
              bool constant_jacobian = false);

  /// Jacobian by centered differences with the given step.
  static VectorField with_finite_difference_jacobian(std::string label, std::size_t dim,
                                                     Map value, double step = 1e-6);

  const std::string& label() const { return label_; }
  std::size_t dim() const { return dim_; }
  bool has_constant_jacobian() const { return constant_jacobian_; }

  void value(std::span<const double> x, std::span<double> out) const { value_(x, out); }
  void jacobian(std::span<const double> x, std::span<double> out) const { jacobian_(x, out); }
  double divergence(std::span<const double> x) const;
  /// d alpha_2/dx_1 - d alpha_1/dx_2; d = 2 only.
  double curl(std::span<const double> x) const;

 private:
  std::string label_;
  std::size_t dim_;
  Map value_;
  Map jacobian_;
  bool constant_jacobian_;
};

/// alpha(x, y) = (h1 x + k1 y, h2 x + k2 y).
struct LinearField {
  double h1 = 0.0;
  double k1 = 0.0;
  double h2 = 0.0;
  double k2 = 0.0;

  double divergence() const { return h1 + k2; }
  double curl() const { return h2 - k1; }
  std::array<double, 4> jacobian() const { return {h1, k1, h2, k2}; }
  VectorField field() const;
};

/// d = 1, alpha(x) = x.
VectorField identity_1d();
VectorField constant_field(std::vector<double> value);

/// Parses `linear:h1,k1,h2,k2` or `id1d`.
VectorField parse_field(std::string_view spec);
/// Parses the coefficients of a `linear:` spec; throws for anything else.
LinearField parse_linear_field(std::string_view spec);

/// alpha(w(t_k)) at every node.
GridFunction sample_field(const VectorField& field, const GridFunction& points);
/// Jacobian at every node; coord(j * d + m) holds entry (j, m).
GridFunction sample_jacobian(const VectorField& field, const GridFunction& points);

/// G(w)(t) = int_0^t alpha(w(s)) ds by cumulative trapezoid.
SamplePath evaluate_G(const VectorField& field, const SamplePath& path);

/// (DG(w) gamma)_j(t) = int_0^t grad alpha_j(w(s)) . gamma(s) ds.
SamplePath apply_DG(const VectorField& field, const SamplePath& path, const SamplePath& gamma);

/// U phi = int_0^. phi, tabulated from the closed-form primitive.
SamplePath unitary_map(const BasisElement& element, const TimeGrid& grid);
/// U^{-1} gamma as per-cell difference quotients (right and left values equal).
CellFunction inverse_unitary_map(const GridFunction& gamma);

/// The kernel of T = U^{-1} DG(w) U, K_j(t, t') = grad alpha_j(w(t)) 1[t' <= t],
/// tabulated with rows at grid nodes t_k and columns on grid cells.
class DiscreteKernel {
 public:
  DiscreteKernel(GridFunction jacobian, std::size_t dim);

  const TimeGrid& grid() const { return jacobian_.grid(); }
  std::size_t dim() const { return dim_; }

  /// Value in R^d of K_j at row node k and column cell l.
  void at(std::size_t j, std::size_t k, std::size_t l, std::span<double> out) const;
  /// (T phi)_j(t_k) = sum_l K_j(t_k, l) . avg_l(phi) dt.
  GridFunction apply(const CellFunction& phi) const;
  /// sum_k w_k sum_l dt |K(t_k, l)|^2 with trapezoid row weights.
  double frobenius_norm_squared() const;

 private:
  GridFunction jacobian_;
  std::size_t dim_;
};

DiscreteKernel kernel_T(const VectorField& field, const SamplePath& path);

/// ||DG(w)||_2^2 = sum_j int_0^1 t |grad alpha_j(w(t))|^2 dt.
double hs_norm_squared(const VectorField& field, const SamplePath& path);
/// The same quantity as the squared Frobenius norm of the discrete kernel.
double hs_norm_squared_frobenius(const VectorField& field, const SamplePath& path);

enum class RamerVariant {
  Linear,   // rhs = E[|f|^2 + ||Jf||_2^2]
  Squared,  // rhs = E[(|f|^2 + ||Jf||_2^2)^2]
};

struct RamerResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double lhs_se = 0.0;
  double rhs_se = 0.0;
  double gap = 0.0;     // mean of rhs_i - lhs_i
  double gap_se = 0.0;  // standard error of the paired difference
  std::size_t samples = 0;

  /// lhs <= rhs + k * SE.
  bool holds(double k = 3.0) const { return gap >= -k * gap_se; }
  bool equality_within(double k = 3.0) const { return std::abs(gap) <= k * gap_se; }
};

/// Monte Carlo estimate of both sides of E[(f(x).x - Tr Jf(x))^2] <= E[|f|^2 + ||Jf||_2^2]
/// under the standard Gaussian on R^n, n = f.dim().
RamerResult gaussian_ramer_check(const VectorField& f, std::size_t samples, const RngSpec& rng,
                                 RamerVariant variant = RamerVariant::Linear);

}  // namespace ogawa
