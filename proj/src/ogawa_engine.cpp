#include "ogawa/ogawa_engine.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <stdexcept>

#include "ogawa/path_model.hpp"

namespace ogawa {
namespace {

void check(const SamplePath& path, std::size_t dim, const SampledBasis& basis, std::size_t n,
           const char* op) {
  if (path.dim() != dim || basis.dim() != dim) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch");
  }
  if (!(basis.grid() == path.grid())) {
    throw std::invalid_argument(std::string(op) + ": basis sampled on a different grid");
  }
  if (n == 0) throw std::invalid_argument(std::string(op) + ": n must be >= 1");
  if (n > basis.size()) {
    throw std::out_of_range(std::string(op) + ": n = " + std::to_string(n) + " exceeds " +
                            std::to_string(basis.size()) + " sampled elements");
  }
}

SampledBasis sample_prefix(const BasisFamily& basis, std::size_t n, const TimeGrid& grid) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  return SampledBasis(basis, n, grid);
}

// int_0^1 a(t) . v(t) dt, a on nodes, v one-sided per cell.
double integrate_cells(const GridFunction& a, const CellFunction& v) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) {
    const auto x = a.coord(j);
    const auto right = v.right(j);
    const auto left = v.left(j);
    for (std::size_t k = 0; k < right.size(); ++k) sum += x[k] * right[k] + x[k + 1] * left[k];
  }
  return 0.5 * a.grid().step() * sum;
}

double wong_zakai_from(const VectorField& field, const GridFunction& approx,
                       const CellFunction& derivative) {
  return integrate_cells(sample_field(field, approx), derivative);
}

std::vector<double> constant_jacobian(const VectorField& field) {
  std::vector<double> origin(field.dim(), 0.0);
  std::vector<double> jac(field.dim() * field.dim());
  field.jacobian(origin, jac);
  return jac;
}

}  // namespace

Integrand::Integrand(std::size_t dim, Eval eval) : dim_(dim), eval_(std::move(eval)) {
  if (dim == 0) throw std::invalid_argument("Integrand: dim must be >= 1");
}

Integrand Integrand::from_field(const VectorField& field) {
  return Integrand(field.dim(),
                   [field](const SamplePath& path, std::size_t k, std::span<double> out) {
                     std::vector<double> x(path.dim());
                     path.values().node(k, x);
                     field.value(x, out);
                   });
}

GridFunction Integrand::sample(const SamplePath& path) const {
  if (path.dim() != dim_) throw std::invalid_argument("Integrand::sample: dimension mismatch");
  GridFunction out(path.grid(), dim_);
  std::vector<double> v(dim_);
  std::vector<double> sq(path.grid().num_nodes(), 0.0);
  for (std::size_t k = 0; k < path.grid().num_nodes(); ++k) {
    eval_(path, k, v);
    for (std::size_t j = 0; j < dim_; ++j) {
      out(j, k) = v[j];
      sq[k] += v[j] * v[j];
    }
  }
  if (!std::isfinite(trapezoid(sq, path.grid().step()))) {
    throw std::domain_error("Integrand: int |f|^2 dt is not finite along the path");
  }
  return out;
}

double ogawa_partial_sum(const Integrand& f, const SamplePath& path, const SampledBasis& basis,
                         std::size_t n) {
  check(path, f.dim(), basis, n, "ogawa_partial_sum");
  const GridFunction values = f.sample(path);
  double g = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g += basis[i].paley_wiener(path.values()) * basis[i].integrate(values);
  }
  return g;
}

double ogawa_partial_sum(const Integrand& f, const SamplePath& path, const BasisFamily& basis,
                         std::size_t n) {
  return ogawa_partial_sum(f, path, sample_prefix(basis, n, path.grid()), n);
}

double ogawa_partial_sum_stieltjes(const Integrand& f, const SamplePath& path,
                                   const SampledBasis& basis, std::size_t n) {
  check(path, f.dim(), basis, n, "ogawa_partial_sum_stieltjes");
  const GridFunction values = f.sample(path);
  const SamplePath approx = approximate_wiener(path, basis, n);
  double sum = 0.0;
  for (std::size_t j = 0; j < path.dim(); ++j) {
    const auto v = values.coord(j);
    const auto w = approx.coord(j);
    for (std::size_t k = 0; k + 1 < w.size(); ++k) sum += 0.5 * (v[k] + v[k + 1]) * (w[k + 1] - w[k]);
  }
  return sum;
}

double ogawa_partial_sum_inner_product(const VectorField& field, const SamplePath& path,
                                       const SampledBasis& basis, std::size_t n) {
  check(path, field.dim(), basis, n, "ogawa_partial_sum_inner_product");
  return cameron_martin_inner(evaluate_G(field, path).values(),
                              approximate_wiener(path, basis, n).values());
}

double diagonal_entry(const VectorField& field, const SamplePath& path,
                      const BasisElement& element) {
  if (field.dim() != path.dim() || element.dim() != path.dim()) {
    throw std::invalid_argument("diagonal_entry: dimension mismatch");
  }
  const SampledElement sampled(element, path.grid());
  return sampled.integrate_jacobian_form(sample_jacobian(field, path.values()));
}

std::vector<double> diagonal_entries(const VectorField& field, const SamplePath& path,
                                     const SampledBasis& basis, std::size_t n) {
  check(path, field.dim(), basis, n, "diagonal_entries");
  std::vector<double> out(n);
  if (field.has_constant_jacobian()) {
    const auto jac = constant_jacobian(field);
    for (std::size_t i = 0; i < n; ++i) out[i] = basis[i].integrate_jacobian_form(jac);
  } else {
    const GridFunction jac = sample_jacobian(field, path.values());
    for (std::size_t i = 0; i < n; ++i) out[i] = basis[i].integrate_jacobian_form(jac);
  }
  return out;
}

double renormalization_term(const VectorField& field, const SamplePath& path,
                            const SampledBasis& basis, std::size_t n) {
  const auto entries = diagonal_entries(field, path, basis, n);
  double r = 0.0;
  for (double e : entries) r += e;
  return r;
}

double renormalization_term(const VectorField& field, const SamplePath& path,
                            const BasisFamily& basis, std::size_t n) {
  return renormalization_term(field, path, sample_prefix(basis, n, path.grid()), n);
}

double renormalized_sum(const VectorField& field, const SamplePath& path,
                        const SampledBasis& basis, std::size_t n) {
  return ogawa_partial_sum(Integrand::from_field(field), path, basis, n) -
         renormalization_term(field, path, basis, n);
}

double renormalized_sum(const VectorField& field, const SamplePath& path,
                        const BasisFamily& basis, std::size_t n) {
  return renormalized_sum(field, path, sample_prefix(basis, n, path.grid()), n);
}

double wong_zakai_sum(const VectorField& field, const SamplePath& path,
                      const SampledBasis& basis, std::size_t n) {
  check(path, field.dim(), basis, n, "wong_zakai_sum");
  GridFunction approx(path.grid(), path.dim());
  CellFunction derivative(path.grid(), path.dim());
  for (std::size_t i = 0; i < n; ++i) {
    const double c = basis[i].paley_wiener(path.values());
    basis[i].add_primitive(c, approx);
    basis[i].add_derivative(c, derivative);
  }
  return wong_zakai_from(field, approx, derivative);
}

double wong_zakai_sum(const VectorField& field, const SamplePath& path,
                      const BasisFamily& basis, std::size_t n) {
  return wong_zakai_sum(field, path, sample_prefix(basis, n, path.grid()), n);
}

double ito_integral(const VectorField& field, const SamplePath& path) {
  if (field.dim() != path.dim()) throw std::invalid_argument("ito_integral: dimension mismatch");
  const GridFunction alpha = sample_field(field, path.values());
  double sum = 0.0;
  for (std::size_t j = 0; j < path.dim(); ++j) {
    const auto a = alpha.coord(j);
    const auto w = path.coord(j);
    for (std::size_t k = 0; k + 1 < w.size(); ++k) sum += a[k] * (w[k + 1] - w[k]);
  }
  return sum;
}

double stratonovich_integral(const VectorField& field, const SamplePath& path) {
  if (field.dim() != path.dim()) {
    throw std::invalid_argument("stratonovich_integral: dimension mismatch");
  }
  const std::size_t d = path.dim();
  std::vector<double> mid(d);
  std::vector<double> a(d);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < path.grid().num_nodes(); ++k) {
    for (std::size_t j = 0; j < d; ++j) mid[j] = 0.5 * (path(j, k) + path(j, k + 1));
    field.value(mid, a);
    for (std::size_t j = 0; j < d; ++j) sum += a[j] * path.increment(j, k);
  }
  return sum;
}

double half_divergence_integral(const VectorField& field, const SamplePath& path) {
  if (field.dim() != path.dim()) {
    throw std::invalid_argument("half_divergence_integral: dimension mismatch");
  }
  std::vector<double> x(path.dim());
  std::vector<double> div(path.grid().num_nodes());
  for (std::size_t k = 0; k < div.size(); ++k) {
    path.values().node(k, x);
    div[k] = field.divergence(x);
  }
  return 0.5 * trapezoid(div, path.grid().step());
}

OgawaLedger build_ledger(const VectorField& field, const SamplePath& path,
                         const SampledBasis& basis, std::span<const std::size_t> schedule,
                         std::uint64_t path_index, std::span<const double> diagonal) {
  if (schedule.empty()) throw std::invalid_argument("build_ledger: empty schedule");
  if (!std::is_sorted(schedule.begin(), schedule.end()) ||
      std::adjacent_find(schedule.begin(), schedule.end()) != schedule.end()) {
    throw std::invalid_argument("build_ledger: schedule must be strictly increasing");
  }
  const std::size_t max_n = schedule.back();
  check(path, field.dim(), basis, max_n, "build_ledger");
  if (!diagonal.empty() && diagonal.size() < max_n) {
    throw std::invalid_argument("build_ledger: too few precomputed diagonal entries");
  }

  OgawaLedger ledger;
  ledger.basis = basis.family_name();
  ledger.order = basis.order().name();
  ledger.path_index = path_index;
  ledger.ito = ito_integral(field, path);
  ledger.strat = stratonovich_integral(field, path);

  const GridFunction alpha = sample_field(field, path.values());
  std::vector<double> const_jac;
  std::optional<GridFunction> path_jac;
  if (diagonal.empty()) {
    if (field.has_constant_jacobian()) {
      const_jac = constant_jacobian(field);
    } else {
      path_jac = sample_jacobian(field, path.values());
    }
  }

  GridFunction approx(path.grid(), path.dim());
  CellFunction derivative(path.grid(), path.dim());
  double g = 0.0;
  double r = 0.0;
  auto next = schedule.begin();
  for (std::size_t i = 0; i < max_n; ++i) {
    const SampledElement& e = basis[i];
    const double c = e.paley_wiener(path.values());
    g += c * e.integrate(alpha);
    if (!diagonal.empty()) {
      r += diagonal[i];
    } else if (path_jac) {
      r += e.integrate_jacobian_form(*path_jac);
    } else {
      r += e.integrate_jacobian_form(const_jac);
    }
    e.add_primitive(c, approx);
    e.add_derivative(c, derivative);
    if (i + 1 == *next) {
      ledger.rows.push_back(LedgerRow{*next, g, r, g - r, wong_zakai_from(field, approx, derivative)});
      ++next;
    }
  }
  return ledger;
}

void write_ledger_csv(std::span<const OgawaLedger> ledgers, std::ostream& out) {
  out << "path_index,n,g,r,h,gprime,ito,strat\n" << std::setprecision(17);
  for (const auto& ledger : ledgers) {
    for (const auto& row : ledger.rows) {
      out << ledger.path_index << ',' << row.n << ',' << row.g << ',' << row.r << ',' << row.h
          << ',' << row.gprime << ',' << ledger.ito << ',' << ledger.strat << '\n';
    }
  }
}

}  // namespace ogawa
