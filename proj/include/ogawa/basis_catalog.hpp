#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ogawa/grid.hpp"

namespace ogawa {

/// Which one-sided limit to take at a jump of a piecewise-continuous function.
enum class Side { Right, Left };

/// A scalar building block with closed-form value and primitive on [0, 1].
struct ScalarPiece {
  enum class Kind { Zero, Constant, Cos, Sin, Haar, Box };

  Kind kind = Kind::Zero;
  double scale = 1.0;
  // Cos/Sin: index = frequency m (phi = cos/sin(2 pi m t)).
  // Haar: index = level j, shift = k (support [k 2^-j, (k+1) 2^-j)).
  // Box: index = n, shift = i (phi = sqrt(n) on [i/n, (i+1)/n]).
  std::size_t index = 0;
  std::size_t shift = 0;

  double value(double t, Side side = Side::Right) const;
  double primitive(double t) const;
  /// Closed interval outside which the piece vanishes.
  std::pair<double, double> support() const;
  bool is_zero() const { return kind == Kind::Zero || scale == 0.0; }
};

/// One element phi of an orthonormal system of L^2([0,1]; R^d), together with
/// its primitive e(t) = int_0^t phi.
struct BasisElement {
  std::vector<ScalarPiece> slots;
  std::string label;

  std::size_t dim() const { return slots.size(); }
  void value(double t, std::span<double> out, Side side = Side::Right) const;
  void primitive(double t, std::span<double> out) const;
};

/// Bijection from positions 0, 1, 2, ... onto a family's natural index set.
class EnumerationOrder {
 public:
  enum class Kind { Balanced, Adversarial };

  static EnumerationOrder balanced() { return EnumerationOrder(Kind::Balanced, 0); }
  /// Front-loads slots 1 and 4 of frequencies 1..k, then slots 2 and 3 of
  /// the same frequencies, then complete blocks from frequency k+1 on.
  static EnumerationOrder adversarial(std::size_t k);
  /// Accepts "balanced" and "adversarial:<K>".
  static EnumerationOrder parse(std::string_view text);

  Kind kind() const { return kind_; }
  std::size_t front_loaded() const { return k_; }
  std::string name() const;

  /// Maps a position of a four-slot trigonometric family to (frequency, slot).
  /// Frequency 0 denotes the constants, with slot 0 = x and slot 1 = y.
  std::pair<std::size_t, std::size_t> four_slot_index(std::size_t position) const;

  bool operator==(const EnumerationOrder&) const = default;

 private:
  EnumerationOrder(Kind kind, std::size_t k) : kind_(kind), k_(k) {}
  Kind kind_;
  std::size_t k_;
};

/// An enumerated orthonormal family. Immutable; element generation is pure.
class BasisFamily {
 public:
  using Generator = std::function<BasisElement(std::size_t)>;

  BasisFamily(std::string name, std::size_t dim, EnumerationOrder order,
              std::optional<std::size_t> size, Generator generator);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  const EnumerationOrder& order() const { return order_; }
  bool is_finite() const { return size_.has_value(); }
  std::optional<std::size_t> size() const { return size_; }

  /// Throws std::out_of_range past the end of a finite family.
  BasisElement element(std::size_t position) const;
  std::vector<BasisElement> prefix(std::size_t count) const;

 private:
  std::string name_;
  std::size_t dim_;
  EnumerationOrder order_;
  std::optional<std::size_t> size_;
  Generator generator_;
};

/// Constants first, then per frequency sqrt2 (cos,0), (sin,0), (0,cos), (0,sin).
/// With d = 1 only the first coordinate slot exists.
BasisFamily component_trig_basis(std::size_t dim,
                                 EnumerationOrder order = EnumerationOrder::balanced());

/// d = 2 family: constants, then (cos,sin), (sin,cos), (-cos,sin), (-sin,cos).
BasisFamily mixed_trig_basis(EnumerationOrder order = EnumerationOrder::balanced());

/// Dyadic Haar system per coordinate slot, coordinates interleaved per function.
BasisFamily haar_basis(std::size_t dim);

/// Derivatives of the normalized ramps z_{n,i}; finite family of dim * level elements.
BasisFamily piecewise_linear_basis(std::size_t level, std::size_t dim);

/// Resolves the CLI names psi-trig, xi-mixed, haar and plin:<level>.
BasisFamily make_family(std::string_view name, std::size_t dim,
                        EnumerationOrder order = EnumerationOrder::balanced());

/// A basis element tabulated on a grid. Values are stored only on the
/// element's support; after the support the primitive is a constant tail.
class SampledElement {
 public:
  SampledElement(BasisElement element, const TimeGrid& grid);

  const BasisElement& element() const { return element_; }
  std::size_t dim() const { return element_.dim(); }
  bool active(std::size_t j) const { return !phi_right_[j].empty(); }
  std::size_t first_cell() const { return first_cell_; }
  std::size_t last_cell() const { return last_cell_; }

  double phi_right(std::size_t j, std::size_t cell) const;
  double phi_left(std::size_t j, std::size_t cell) const;
  double primitive(std::size_t j, std::size_t node) const;

  /// Left-point Riemann-Stieltjes sum sum_k phi(t_k+) . (w(t_{k+1}) - w(t_k)).
  double paley_wiener(const GridFunction& path) const;
  /// int_0^1 f(t) . phi(t) dt by per-cell trapezoid with one-sided phi.
  double integrate(const GridFunction& f) const;
  /// int_0^1 phi(t) . (J(t) e(t)) dt where J is a d x d matrix per node,
  /// stored row-major as coord(j * d + m) of `jacobian`.
  double integrate_jacobian_form(const GridFunction& jacobian) const;
  /// Same with one constant row-major d x d matrix.
  double integrate_jacobian_form(std::span<const double> jacobian) const;

  void add_primitive(double c, GridFunction& out) const;
  void add_derivative(double c, CellFunction& out) const;

 private:
  BasisElement element_;
  TimeGrid grid_;
  std::size_t first_cell_ = 0;
  std::size_t last_cell_ = 0;
  std::vector<std::vector<double>> phi_right_;
  std::vector<std::vector<double>> phi_left_;
  std::vector<std::vector<double>> primitive_;  // nodes first_cell_..last_cell_
  std::vector<double> tail_;
};

/// The first `count` elements of a family tabulated on a grid.
class SampledBasis {
 public:
  SampledBasis(const BasisFamily& family, std::size_t count, const TimeGrid& grid);

  const std::string& family_name() const { return family_name_; }
  const EnumerationOrder& order() const { return order_; }
  std::size_t dim() const { return dim_; }
  const TimeGrid& grid() const { return grid_; }
  std::size_t size() const { return elements_.size(); }
  const SampledElement& operator[](std::size_t i) const { return elements_[i]; }

 private:
  std::string family_name_;
  EnumerationOrder order_;
  std::size_t dim_;
  TimeGrid grid_;
  std::vector<SampledElement> elements_;
};

/// Norms ||u_n||_{L^2}, n = 1..count, with u_n(t) = sum_{i<=n} phi_i(t) . e_i(t).
std::vector<double> regularity_diagnostic(const BasisFamily& family, std::size_t count,
                                          const TimeGrid& grid);

}  // namespace ogawa
