#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ogawa/basis_catalog.hpp"
#include "ogawa/grid.hpp"
#include "ogawa/vector_fields.hpp"

namespace ogawa {

/// A possibly anticipating integrand f(t, w) in R^d, evaluated at grid nodes.
class Integrand {
 public:
  using Eval = std::function<void(const SamplePath&, std::size_t node, std::span<double>)>;

  Integrand(std::size_t dim, Eval eval);
  /// f(t, w) = alpha(w(t)).
  static Integrand from_field(const VectorField& field);

  std::size_t dim() const { return dim_; }
  /// Samples f along `path`; throws if the quadrature of |f|^2 is not finite.
  GridFunction sample(const SamplePath& path) const;

 private:
  std::size_t dim_;
  Eval eval_;
};

/// g_n = sum_{i<=n} n_{e_i}(w) int_0^1 f(t,w) . phi_i(t) dt (coefficient route).
double ogawa_partial_sum(const Integrand& f, const SamplePath& path, const SampledBasis& basis,
                         std::size_t n);
double ogawa_partial_sum(const Integrand& f, const SamplePath& path, const BasisFamily& basis,
                         std::size_t n);

/// int_0^1 f dW_n^phi against the Ito-Nisio approximation (trapezoidal Stieltjes sum).
double ogawa_partial_sum_stieltjes(const Integrand& f, const SamplePath& path,
                                   const SampledBasis& basis, std::size_t n);

/// <G(w), P_n(w)> in the Cameron-Martin space.
double ogawa_partial_sum_inner_product(const VectorField& field, const SamplePath& path,
                                       const SampledBasis& basis, std::size_t n);

/// <e, DG(w) e> = int_0^1 phi(t) . (e(t) . grad) alpha(w(t)) dt.
double diagonal_entry(const VectorField& field, const SamplePath& path,
                      const BasisElement& element);
/// Diagonal entries of the first n sampled elements.
std::vector<double> diagonal_entries(const VectorField& field, const SamplePath& path,
                                     const SampledBasis& basis, std::size_t n);

/// r_n = Tr(P_n DG(w)).
double renormalization_term(const VectorField& field, const SamplePath& path,
                            const SampledBasis& basis, std::size_t n);
double renormalization_term(const VectorField& field, const SamplePath& path,
                            const BasisFamily& basis, std::size_t n);

/// h_n = g_n - r_n for f(t, w) = alpha(w(t)).
double renormalized_sum(const VectorField& field, const SamplePath& path,
                        const SampledBasis& basis, std::size_t n);
double renormalized_sum(const VectorField& field, const SamplePath& path,
                        const BasisFamily& basis, std::size_t n);

/// g'_n = int_0^1 alpha(w_n(t)) . dw_n/dt dt with w_n the Ito-Nisio approximation.
double wong_zakai_sum(const VectorField& field, const SamplePath& path,
                      const SampledBasis& basis, std::size_t n);
double wong_zakai_sum(const VectorField& field, const SamplePath& path,
                      const BasisFamily& basis, std::size_t n);

/// Left-point sum sum_k alpha(w(t_k)) . dw_k.
double ito_integral(const VectorField& field, const SamplePath& path);
/// Midpoint sum sum_k alpha((w(t_k) + w(t_{k+1})) / 2) . dw_k.
double stratonovich_integral(const VectorField& field, const SamplePath& path);
/// (1/2) int_0^1 div alpha(w(t)) dt by trapezoid.
double half_divergence_integral(const VectorField& field, const SamplePath& path);

struct LedgerRow {
  std::size_t n = 0;
  double g = 0.0;
  double r = 0.0;
  double h = 0.0;
  double gprime = 0.0;
};

/// Per-path record of the truncated sums along a schedule.
struct OgawaLedger {
  std::string basis;
  std::string order;
  std::uint64_t path_index = 0;
  std::vector<LedgerRow> rows;
  double ito = 0.0;
  double strat = 0.0;
};

/// Evaluates every schedule point in one pass over the first max(schedule)
/// elements. `diagonal`, when given, supplies precomputed diagonal entries
/// (valid for fields whose Jacobian does not depend on the path).
OgawaLedger build_ledger(const VectorField& field, const SamplePath& path,
                         const SampledBasis& basis, std::span<const std::size_t> schedule,
                         std::uint64_t path_index = 0,
                         std::span<const double> diagonal = {});

/// CSV `path_index,n,g,r,h,gprime,ito,strat`, 17 significant digits.
void write_ledger_csv(std::span<const OgawaLedger> ledgers, std::ostream& out);

}  // namespace ogawa
