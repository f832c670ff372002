#include "ogawa/vector_fields.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ogawa {
namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& x) {
  MeanSe out;
  if (x.empty()) return out;
  for (double v : x) out.mean += v;
  out.mean /= static_cast<double>(x.size());
  if (x.size() < 2) return out;
  double ss = 0.0;
  for (double v : x) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
  return out;
}

}  // namespace

VectorField::VectorField(std::string label, std::size_t dim, Map value, Map jacobian,
                         bool constant_jacobian)
    : label_(std::move(label)),
      dim_(dim),
      value_(std::move(value)),
      jacobian_(std::move(jacobian)),
      constant_jacobian_(constant_jacobian) {
  if (dim == 0) throw std::invalid_argument("VectorField: dim must be >= 1");
}

VectorField VectorField::with_finite_difference_jacobian(std::string label, std::size_t dim,
                                                         Map value, double step) {
  auto jac = [dim, value, step](std::span<const double> x, std::span<double> out) {
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> plus(dim);
    std::vector<double> minus(dim);
    for (std::size_t m = 0; m < dim; ++m) {
      probe[m] = x[m] + step;
      value(probe, plus);
      probe[m] = x[m] - step;
      value(probe, minus);
      probe[m] = x[m];
      for (std::size_t j = 0; j < dim; ++j) out[j * dim + m] = (plus[j] - minus[j]) / (2.0 * step);
    }
  };
  return VectorField(std::move(label), dim, std::move(value), jac);
}

double VectorField::divergence(std::span<const double> x) const {
  std::vector<double> jac(dim_ * dim_);
  jacobian_(x, jac);
  double div = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) div += jac[j * dim_ + j];
  return div;
}

double VectorField::curl(std::span<const double> x) const {
  if (dim_ != 2) throw std::invalid_argument("VectorField::curl: defined for d = 2 only");
  std::array<double, 4> jac{};
  jacobian_(x, jac);
  return jac[2] - jac[1];
}

VectorField LinearField::field() const {
  const LinearField c = *this;
  auto value = [c](std::span<const double> x, std::span<double> out) {
    out[0] = c.h1 * x[0] + c.k1 * x[1];
    out[1] = c.h2 * x[0] + c.k2 * x[1];
  };
  auto jac = [c](std::span<const double>, std::span<double> out) {
    out[0] = c.h1;
    out[1] = c.k1;
    out[2] = c.h2;
    out[3] = c.k2;
  };
  auto fmt = [](double v) {
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
  };
  return VectorField("linear:" + fmt(h1) + "," + fmt(k1) + "," + fmt(h2) + "," + fmt(k2), 2,
                     value, jac, true);
}

VectorField identity_1d() {
  return VectorField(
      "id1d", 1, [](std::span<const double> x, std::span<double> out) { out[0] = x[0]; },
      [](std::span<const double>, std::span<double> out) { out[0] = 1.0; }, true);
}

VectorField constant_field(std::vector<double> value) {
  const std::size_t d = value.size();
  return VectorField(
      "const", d,
      [value](std::span<const double>, std::span<double> out) {
        std::copy(value.begin(), value.end(), out.begin());
      },
      [d](std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(d * d), 0.0);
      },
      true);
}

LinearField parse_linear_field(std::string_view spec) {
  constexpr std::string_view prefix = "linear:";
  if (!spec.starts_with(prefix)) {
    throw std::invalid_argument("not a linear field spec: '" + std::string(spec) + "'");
  }
  std::string_view rest = spec.substr(prefix.size());
  std::array<double, 4> c{};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto comma = rest.find(',');
    const std::string_view token = rest.substr(0, comma);
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), c[i]);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
      throw std::invalid_argument("linear field: bad coefficient '" + std::string(token) + "'");
    }
    if ((i < 3) != (comma != std::string_view::npos)) {
      throw std::invalid_argument("linear field: expected exactly four coefficients");
    }
    if (comma != std::string_view::npos) rest = rest.substr(comma + 1);
  }
  return LinearField{c[0], c[1], c[2], c[3]};
}

VectorField parse_field(std::string_view spec) {
  if (spec == "id1d") return identity_1d();
  if (spec.starts_with("linear:")) return parse_linear_field(spec).field();
  throw std::invalid_argument("unknown field spec '" + std::string(spec) + "'");
}

GridFunction sample_field(const VectorField& field, const GridFunction& points) {
  require_same_dim(field.dim(), points.dim(), "sample_field");
  const std::size_t d = field.dim();
  GridFunction out(points.grid(), d);
  std::vector<double> x(d);
  std::vector<double> y(d);
  for (std::size_t k = 0; k < points.grid().num_nodes(); ++k) {
    points.node(k, x);
    field.value(x, y);
    for (std::size_t j = 0; j < d; ++j) out(j, k) = y[j];
  }
  return out;
}

GridFunction sample_jacobian(const VectorField& field, const GridFunction& points) {
  require_same_dim(field.dim(), points.dim(), "sample_jacobian");
  const std::size_t d = field.dim();
  GridFunction out(points.grid(), d * d);
  std::vector<double> x(d);
  std::vector<double> jac(d * d);
  for (std::size_t k = 0; k < points.grid().num_nodes(); ++k) {
    points.node(k, x);
    field.jacobian(x, jac);
    for (std::size_t r = 0; r < d * d; ++r) out(r, k) = jac[r];
  }
  return out;
}

SamplePath evaluate_G(const VectorField& field, const SamplePath& path) {
  require_same_dim(field.dim(), path.dim(), "evaluate_G");
  const GridFunction alpha = sample_field(field, path.values());
  GridFunction out(path.grid(), path.dim());
  for (std::size_t j = 0; j < path.dim(); ++j) {
    const auto cum = cumulative_trapezoid(alpha.coord(j), path.grid().step());
    std::copy(cum.begin(), cum.end(), out.coord(j).begin());
  }
  return SamplePath(std::move(out));
}

SamplePath apply_DG(const VectorField& field, const SamplePath& path, const SamplePath& gamma) {
  require_same_dim(field.dim(), path.dim(), "apply_DG");
  require_same_dim(path.dim(), gamma.dim(), "apply_DG");
  if (!(path.grid() == gamma.grid())) throw std::invalid_argument("apply_DG: grid mismatch");
  const std::size_t d = path.dim();
  const GridFunction jac = sample_jacobian(field, path.values());
  GridFunction out(path.grid(), d);
  std::vector<double> integrand(path.grid().num_nodes());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < integrand.size(); ++k) {
      double s = 0.0;
      for (std::size_t m = 0; m < d; ++m) s += jac(j * d + m, k) * gamma(m, k);
      integrand[k] = s;
    }
    const auto cum = cumulative_trapezoid(integrand, path.grid().step());
    std::copy(cum.begin(), cum.end(), out.coord(j).begin());
  }
  return SamplePath(std::move(out));
}

SamplePath unitary_map(const BasisElement& element, const TimeGrid& grid) {
  GridFunction out(grid, element.dim());
  std::vector<double> e(element.dim());
  for (std::size_t k = 0; k < grid.num_nodes(); ++k) {
    element.primitive(grid.time(k), e);
    for (std::size_t j = 0; j < e.size(); ++j) out(j, k) = e[j];
  }
  return SamplePath(std::move(out));
}

CellFunction inverse_unitary_map(const GridFunction& gamma) {
  CellFunction out(gamma.grid(), gamma.dim());
  const double inv = 1.0 / gamma.grid().step();
  for (std::size_t j = 0; j < gamma.dim(); ++j) {
    auto g = gamma.coord(j);
    auto right = out.right(j);
    auto left = out.left(j);
    for (std::size_t k = 0; k + 1 < g.size(); ++k) right[k] = left[k] = (g[k + 1] - g[k]) * inv;
  }
  return out;
}

DiscreteKernel::DiscreteKernel(GridFunction jacobian, std::size_t dim)
    : jacobian_(std::move(jacobian)), dim_(dim) {
  if (jacobian_.dim() != dim * dim) {
    throw std::invalid_argument("DiscreteKernel: jacobian samples must have d*d components");
  }
}

void DiscreteKernel::at(std::size_t j, std::size_t k, std::size_t l, std::span<double> out) const {
  const bool inside = l < k;  // cell [t_l, t_{l+1}] lies in [0, t_k]
  for (std::size_t m = 0; m < dim_; ++m) out[m] = inside ? jacobian_(j * dim_ + m, k) : 0.0;
}

GridFunction DiscreteKernel::apply(const CellFunction& phi) const {
  if (phi.dim() != dim_ || !(phi.grid() == grid())) {
    throw std::invalid_argument("DiscreteKernel::apply: mismatched argument");
  }
  const std::size_t nodes = grid().num_nodes();
  const double dt = grid().step();
  // running[m][k] = sum_{l<k} avg_l(phi_m) dt
  std::vector<std::vector<double>> running(dim_, std::vector<double>(nodes, 0.0));
  for (std::size_t m = 0; m < dim_; ++m) {
    auto right = phi.right(m);
    auto left = phi.left(m);
    for (std::size_t l = 0; l + 1 < nodes; ++l) {
      running[m][l + 1] = running[m][l] + 0.5 * (right[l] + left[l]) * dt;
    }
  }
  GridFunction out(grid(), dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    for (std::size_t k = 0; k < nodes; ++k) {
      double s = 0.0;
      for (std::size_t m = 0; m < dim_; ++m) s += jacobian_(j * dim_ + m, k) * running[m][k];
      out(j, k) = s;
    }
  }
  return out;
}

double DiscreteKernel::frobenius_norm_squared() const {
  const std::size_t nodes = grid().num_nodes();
  const double dt = grid().step();
  std::vector<double> cell(dim_);
  double total = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double row_weight = (k == 0 || k + 1 == nodes) ? 0.5 * dt : dt;
    double row = 0.0;
    for (std::size_t l = 0; l + 1 < nodes; ++l) {
      for (std::size_t j = 0; j < dim_; ++j) {
        at(j, k, l, cell);
        for (double v : cell) row += v * v;
      }
    }
    total += row_weight * row * dt;
  }
  return total;
}

DiscreteKernel kernel_T(const VectorField& field, const SamplePath& path) {
  require_same_dim(field.dim(), path.dim(), "kernel_T");
  return DiscreteKernel(sample_jacobian(field, path.values()), field.dim());
}

double hs_norm_squared(const VectorField& field, const SamplePath& path) {
  require_same_dim(field.dim(), path.dim(), "hs_norm_squared");
  const std::size_t d = field.dim();
  const GridFunction jac = sample_jacobian(field, path.values());
  std::vector<double> integrand(path.grid().num_nodes());
  for (std::size_t k = 0; k < integrand.size(); ++k) {
    double sq = 0.0;
    for (std::size_t r = 0; r < d * d; ++r) sq += jac(r, k) * jac(r, k);
    integrand[k] = path.grid().time(k) * sq;
  }
  return trapezoid(integrand, path.grid().step());
}

double hs_norm_squared_frobenius(const VectorField& field, const SamplePath& path) {
  return kernel_T(field, path).frobenius_norm_squared();
}

RamerResult gaussian_ramer_check(const VectorField& f, std::size_t samples, const RngSpec& rng,
                                 RamerVariant variant) {
  if (samples == 0) throw std::invalid_argument("gaussian_ramer_check: samples must be >= 1");
  const std::size_t n = f.dim();
  std::mt19937_64 engine(rng.stream_seed(0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n);
  std::vector<double> fx(n);
  std::vector<double> jac(n * n);
  std::vector<double> lhs(samples);
  std::vector<double> rhs(samples);
  std::vector<double> gap(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& v : x) v = normal(engine);
    f.value(x, fx);
    f.jacobian(x, jac);
    double dot = 0.0;
    double norm_sq = 0.0;
    double trace = 0.0;
    double hs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += fx[i] * x[i];
      norm_sq += fx[i] * fx[i];
      trace += jac[i * n + i];
    }
    for (double v : jac) hs += v * v;
    const double divergence_term = dot - trace;
    lhs[s] = divergence_term * divergence_term;
    rhs[s] = variant == RamerVariant::Linear ? norm_sq + hs : (norm_sq + hs) * (norm_sq + hs);
    gap[s] = rhs[s] - lhs[s];
  }
  const auto l = mean_se(lhs);
  const auto r = mean_se(rhs);
  const auto g = mean_se(gap);
  return RamerResult{l.mean, r.mean, l.se, r.se, g.mean, g.se, samples};
}

}  // namespace ogawa
