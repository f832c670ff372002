#include "ogawa/basis_catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ogawa {
namespace {

constexpr double kSnap = 1e-9;

// Rounds x to the nearest integer when it is within kSnap of it, so grid
// nodes that coincide with breakpoints land exactly on them.
double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) < kSnap ? r : x;
}

// Index of the unit interval [m, m+1) (Right) or (m, m+1] (Left) holding x.
long interval_index(double x, Side side) {
  x = snap(x);
  return side == Side::Right ? static_cast<long>(std::floor(x))
                             : static_cast<long>(std::ceil(x)) - 1;
}

std::size_t parse_size(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("invalid " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

ScalarPiece piece(ScalarPiece::Kind kind, double scale, std::size_t index = 0,
                  std::size_t shift = 0) {
  return ScalarPiece{kind, scale, index, shift};
}

}  // namespace

double ScalarPiece::value(double t, Side side) const {
  using std::numbers::pi;
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return scale;
    case Kind::Cos:
      return scale * std::cos(2.0 * pi * static_cast<double>(index) * t);
    case Kind::Sin:
      return scale * std::sin(2.0 * pi * static_cast<double>(index) * t);
    case Kind::Haar: {
      const double width = std::ldexp(1.0, -static_cast<int>(index));
      const double half = (t / width - static_cast<double>(shift)) * 2.0;
      const long slot = interval_index(half, side);
      const double height = scale * std::sqrt(1.0 / width);
      if (slot == 0) return height;
      if (slot == 1) return -height;
      return 0.0;
    }
    case Kind::Box: {
      const double n = static_cast<double>(index);
      const double u = t * n - static_cast<double>(shift);
      return interval_index(u, side) == 0 ? scale * std::sqrt(n) : 0.0;
    }
  }
  return 0.0;
}

double ScalarPiece::primitive(double t) const {
  using std::numbers::pi;
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return scale * t;
    case Kind::Cos: {
      const double w = 2.0 * pi * static_cast<double>(index);
      return scale * std::sin(w * t) / w;
    }
    case Kind::Sin: {
      const double w = 2.0 * pi * static_cast<double>(index);
      return scale * (1.0 - std::cos(w * t)) / w;
    }
    case Kind::Haar: {
      const double width = std::ldexp(1.0, -static_cast<int>(index));
      const double u = snap(t / width - static_cast<double>(shift));
      if (u <= 0.0 || u >= 1.0) return 0.0;
      const double ramp = u <= 0.5 ? u : 1.0 - u;
      return scale * std::sqrt(width) * ramp;
    }
    case Kind::Box: {
      const double n = static_cast<double>(index);
      const double u = snap(t * n - static_cast<double>(shift));
      return scale * std::clamp(u, 0.0, 1.0) / std::sqrt(n);
    }
  }
  return 0.0;
}

std::pair<double, double> ScalarPiece::support() const {
  switch (kind) {
    case Kind::Zero:
      return {1.0, 0.0};
    case Kind::Haar: {
      const double width = std::ldexp(1.0, -static_cast<int>(index));
      return {static_cast<double>(shift) * width, static_cast<double>(shift + 1) * width};
    }
    case Kind::Box: {
      const double n = static_cast<double>(index);
      return {static_cast<double>(shift) / n, static_cast<double>(shift + 1) / n};
    }
    default:
      return {0.0, 1.0};
  }
}

void BasisElement::value(double t, std::span<double> out, Side side) const {
  for (std::size_t j = 0; j < slots.size(); ++j) out[j] = slots[j].value(t, side);
}

void BasisElement::primitive(double t, std::span<double> out) const {
  for (std::size_t j = 0; j < slots.size(); ++j) out[j] = slots[j].primitive(t);
}

EnumerationOrder EnumerationOrder::adversarial(std::size_t k) {
  if (k == 0) throw std::invalid_argument("adversarial order needs K >= 1");
  return EnumerationOrder(Kind::Adversarial, k);
}

EnumerationOrder EnumerationOrder::parse(std::string_view text) {
  if (text == "balanced") return balanced();
  constexpr std::string_view prefix = "adversarial:";
  if (text.starts_with(prefix)) {
    return adversarial(parse_size(text.substr(prefix.size()), "adversarial K"));
  }
  throw std::invalid_argument("unknown enumeration order '" + std::string(text) + "'");
}

std::string EnumerationOrder::name() const {
  return kind_ == Kind::Balanced ? "balanced" : "adversarial:" + std::to_string(k_);
}

std::pair<std::size_t, std::size_t> EnumerationOrder::four_slot_index(std::size_t p) const {
  if (p < 2) return {0, p};
  const std::size_t q = p - 2;
  if (kind_ == Kind::Adversarial) {
    if (q < 2 * k_) return {q / 2 + 1, q % 2 == 0 ? 1 : 4};
    if (q < 4 * k_) {
      const std::size_t r = q - 2 * k_;
      return {r / 2 + 1, r % 2 == 0 ? 2 : 3};
    }
    const std::size_t r = q - 4 * k_;
    return {k_ + 1 + r / 4, r % 4 + 1};
  }
  return {q / 4 + 1, q % 4 + 1};
}

BasisFamily::BasisFamily(std::string name, std::size_t dim, EnumerationOrder order,
                         std::optional<std::size_t> size, Generator generator)
    : name_(std::move(name)),
      dim_(dim),
      order_(order),
      size_(size),
      generator_(std::move(generator)) {}

BasisElement BasisFamily::element(std::size_t position) const {
  if (size_ && position >= *size_) {
    throw std::out_of_range(name_ + ": element " + std::to_string(position) +
                            " requested from a family of " + std::to_string(*size_));
  }
  return generator_(position);
}

std::vector<BasisElement> BasisFamily::prefix(std::size_t count) const {
  std::vector<BasisElement> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(element(i));
  return out;
}

BasisFamily component_trig_basis(std::size_t dim, EnumerationOrder order) {
  using K = ScalarPiece::Kind;
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("psi-trig: supported dimensions are 1 and 2");
  }
  if (dim == 1 && order.kind() != EnumerationOrder::Kind::Balanced) {
    throw std::invalid_argument("psi-trig: adversarial orders need d = 2");
  }
  const double r2 = std::numbers::sqrt2;
  auto generator = [dim, order, r2](std::size_t p) {
    BasisElement e;
    e.slots.assign(dim, ScalarPiece{});
    if (dim == 1) {
      if (p == 0) {
        e.slots[0] = piece(K::Constant, 1.0);
        e.label = "psi(0,x)";
      } else {
        const std::size_t m = (p - 1) / 2 + 1;
        const std::size_t s = (p - 1) % 2 + 1;
        e.slots[0] = piece(s == 1 ? K::Cos : K::Sin, r2, m);
        e.label = "psi(" + std::to_string(m) + "," + std::to_string(s) + ")";
      }
      return e;
    }
    const auto [m, s] = order.four_slot_index(p);
    if (m == 0) {
      e.slots[s] = piece(K::Constant, 1.0);
      e.label = s == 0 ? "psi(0,x)" : "psi(0,y)";
      return e;
    }
    const std::size_t slot = s <= 2 ? 0 : 1;
    const bool cosine = s % 2 == 1;
    e.slots[slot] = piece(cosine ? K::Cos : K::Sin, r2, m);
    e.label = "psi(" + std::to_string(m) + "," + std::to_string(s) + ")";
    return e;
  };
  return BasisFamily("psi-trig", dim, order, std::nullopt, generator);
}

BasisFamily mixed_trig_basis(EnumerationOrder order) {
  using K = ScalarPiece::Kind;
  auto generator = [order](std::size_t p) {
    BasisElement e;
    e.slots.assign(2, ScalarPiece{});
    const auto [m, s] = order.four_slot_index(p);
    if (m == 0) {
      e.slots[s] = piece(K::Constant, 1.0);
      e.label = s == 0 ? "xi(0,x)" : "xi(0,y)";
      return e;
    }
    switch (s) {
      case 1:  // (cos, sin)
        e.slots = {piece(K::Cos, 1.0, m), piece(K::Sin, 1.0, m)};
        break;
      case 2:  // (sin, cos)
        e.slots = {piece(K::Sin, 1.0, m), piece(K::Cos, 1.0, m)};
        break;
      case 3:  // (-cos, sin)
        e.slots = {piece(K::Cos, -1.0, m), piece(K::Sin, 1.0, m)};
        break;
      default:  // (-sin, cos)
        e.slots = {piece(K::Sin, -1.0, m), piece(K::Cos, 1.0, m)};
        break;
    }
    e.label = "xi(" + std::to_string(m) + "," + std::to_string(s) + ")";
    return e;
  };
  return BasisFamily("xi-mixed", 2, order, std::nullopt, generator);
}

BasisFamily haar_basis(std::size_t dim) {
  using K = ScalarPiece::Kind;
  if (dim == 0) throw std::invalid_argument("haar: dim must be >= 1");
  auto generator = [dim](std::size_t p) {
    BasisElement e;
    e.slots.assign(dim, ScalarPiece{});
    if (p < dim) {
      e.slots[p] = piece(K::Constant, 1.0);
      e.label = "haar(const,slot=" + std::to_string(p) + ")";
      return e;
    }
    const std::size_t q = p - dim;
    const std::size_t f = q / dim;
    const std::size_t slot = q % dim;
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= f + 1) ++level;
    const std::size_t shift = f + 1 - (std::size_t{1} << level);
    e.slots[slot] = piece(K::Haar, 1.0, level, shift);
    e.label = "haar(j=" + std::to_string(level) + ",k=" + std::to_string(shift) +
              ",slot=" + std::to_string(slot) + ")";
    return e;
  };
  return BasisFamily("haar", dim, EnumerationOrder::balanced(), std::nullopt, generator);
}

BasisFamily piecewise_linear_basis(std::size_t level, std::size_t dim) {
  using K = ScalarPiece::Kind;
  if (level == 0) throw std::invalid_argument("plin: level must be >= 1");
  if (dim == 0) throw std::invalid_argument("plin: dim must be >= 1");
  auto generator = [level, dim](std::size_t p) {
    BasisElement e;
    e.slots.assign(dim, ScalarPiece{});
    const std::size_t i = p / dim;
    const std::size_t slot = p % dim;
    e.slots[slot] = piece(K::Box, 1.0, level, i);
    e.label = "plin(n=" + std::to_string(level) + ",i=" + std::to_string(i) +
              ",slot=" + std::to_string(slot) + ")";
    return e;
  };
  return BasisFamily("plin:" + std::to_string(level), dim, EnumerationOrder::balanced(),
                     dim * level, generator);
}

BasisFamily make_family(std::string_view name, std::size_t dim, EnumerationOrder order) {
  const bool balanced = order.kind() == EnumerationOrder::Kind::Balanced;
  if (name == "psi-trig") return component_trig_basis(dim, order);
  if (name == "xi-mixed") {
    if (dim != 2) throw std::invalid_argument("xi-mixed: requires d = 2");
    return mixed_trig_basis(order);
  }
  if (!balanced) {
    throw std::invalid_argument(std::string(name) + ": only the balanced order is supported");
  }
  if (name == "haar") return haar_basis(dim);
  if (name.starts_with("plin:")) {
    return piecewise_linear_basis(parse_size(name.substr(5), "plin level"), dim);
  }
  throw std::invalid_argument("unknown basis family '" + std::string(name) + "'");
}

SampledElement::SampledElement(BasisElement element, const TimeGrid& grid)
    : element_(std::move(element)),
      grid_(grid),
      phi_right_(element_.dim()),
      phi_left_(element_.dim()),
      primitive_(element_.dim()),
      tail_(element_.dim(), 0.0) {
  const auto steps = static_cast<double>(grid.num_steps());
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& s : element_.slots) {
    if (s.is_zero()) continue;
    const auto [a, b] = s.support();
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  if (lo > hi) {  // identically zero element
    first_cell_ = last_cell_ = 0;
    return;
  }
  first_cell_ = static_cast<std::size_t>(std::max(0.0, std::floor(snap(lo * steps))));
  last_cell_ = std::min(grid.num_steps(),
                        static_cast<std::size_t>(std::ceil(snap(hi * steps))));
  const std::size_t cells = last_cell_ - first_cell_;
  for (std::size_t j = 0; j < element_.dim(); ++j) {
    const auto& s = element_.slots[j];
    if (s.is_zero()) continue;
    phi_right_[j].resize(cells);
    phi_left_[j].resize(cells);
    primitive_[j].resize(cells + 1);
    for (std::size_t c = 0; c < cells; ++c) {
      const std::size_t k = first_cell_ + c;
      phi_right_[j][c] = s.value(grid.time(k), Side::Right);
      phi_left_[j][c] = s.value(grid.time(k + 1), Side::Left);
    }
    for (std::size_t c = 0; c <= cells; ++c) primitive_[j][c] = s.primitive(grid.time(first_cell_ + c));
    tail_[j] = primitive_[j].back();
  }
}

double SampledElement::phi_right(std::size_t j, std::size_t cell) const {
  if (!active(j) || cell < first_cell_ || cell >= last_cell_) return 0.0;
  return phi_right_[j][cell - first_cell_];
}

double SampledElement::phi_left(std::size_t j, std::size_t cell) const {
  if (!active(j) || cell < first_cell_ || cell >= last_cell_) return 0.0;
  return phi_left_[j][cell - first_cell_];
}

double SampledElement::primitive(std::size_t j, std::size_t node) const {
  if (!active(j) || node < first_cell_) return 0.0;
  if (node > last_cell_) return tail_[j];
  return primitive_[j][node - first_cell_];
}

double SampledElement::paley_wiener(const GridFunction& path) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < dim(); ++j) {
    if (!active(j)) continue;
    const auto w = path.coord(j);
    const auto& phi = phi_right_[j];
    for (std::size_t c = 0; c < phi.size(); ++c) {
      const std::size_t k = first_cell_ + c;
      sum += phi[c] * (w[k + 1] - w[k]);
    }
  }
  return sum;
}

double SampledElement::integrate(const GridFunction& f) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < dim(); ++j) {
    if (!active(j)) continue;
    const auto v = f.coord(j);
    const auto& right = phi_right_[j];
    const auto& left = phi_left_[j];
    for (std::size_t c = 0; c < right.size(); ++c) {
      const std::size_t k = first_cell_ + c;
      sum += right[c] * v[k] + left[c] * v[k + 1];
    }
  }
  return 0.5 * grid_.step() * sum;
}

double SampledElement::integrate_jacobian_form(const GridFunction& jacobian) const {
  const std::size_t d = dim();
  double sum = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    if (!active(j)) continue;
    for (std::size_t m = 0; m < d; ++m) {
      if (!active(m)) continue;
      const auto jac = jacobian.coord(j * d + m);
      const auto& right = phi_right_[j];
      const auto& left = phi_left_[j];
      const auto& e = primitive_[m];
      for (std::size_t c = 0; c < right.size(); ++c) {
        const std::size_t k = first_cell_ + c;
        sum += right[c] * jac[k] * e[c] + left[c] * jac[k + 1] * e[c + 1];
      }
    }
  }
  return 0.5 * grid_.step() * sum;
}

double SampledElement::integrate_jacobian_form(std::span<const double> jacobian) const {
  const std::size_t d = dim();
  double sum = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    if (!active(j)) continue;
    for (std::size_t m = 0; m < d; ++m) {
      const double jac = jacobian[j * d + m];
      if (!active(m) || jac == 0.0) continue;
      const auto& right = phi_right_[j];
      const auto& left = phi_left_[j];
      const auto& e = primitive_[m];
      double part = 0.0;
      for (std::size_t c = 0; c < right.size(); ++c) part += right[c] * e[c] + left[c] * e[c + 1];
      sum += jac * part;
    }
  }
  return 0.5 * grid_.step() * sum;
}

void SampledElement::add_primitive(double c, GridFunction& out) const {
  const std::size_t nodes = grid_.num_nodes();
  for (std::size_t j = 0; j < dim(); ++j) {
    if (!active(j)) continue;
    auto dst = out.coord(j);
    const auto& e = primitive_[j];
    for (std::size_t i = 0; i < e.size(); ++i) dst[first_cell_ + i] += c * e[i];
    const double tail = c * tail_[j];
    if (tail == 0.0) continue;
    for (std::size_t k = last_cell_ + 1; k < nodes; ++k) dst[k] += tail;
  }
}

void SampledElement::add_derivative(double c, CellFunction& out) const {
  for (std::size_t j = 0; j < dim(); ++j) {
    if (!active(j)) continue;
    auto right = out.right(j);
    auto left = out.left(j);
    for (std::size_t i = 0; i < phi_right_[j].size(); ++i) {
      right[first_cell_ + i] += c * phi_right_[j][i];
      left[first_cell_ + i] += c * phi_left_[j][i];
    }
  }
}

SampledBasis::SampledBasis(const BasisFamily& family, std::size_t count, const TimeGrid& grid)
    : family_name_(family.name()), order_(family.order()), dim_(family.dim()), grid_(grid) {
  elements_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) elements_.emplace_back(family.element(i), grid);
}

std::vector<double> regularity_diagnostic(const BasisFamily& family, std::size_t count,
                                          const TimeGrid& grid) {
  if (count == 0) throw std::invalid_argument("regularity_diagnostic: count must be >= 1");
  const std::size_t steps = grid.num_steps();
  std::vector<double> right(steps, 0.0);
  std::vector<double> left(steps, 0.0);
  std::vector<double> norms;
  norms.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const SampledElement e(family.element(i), grid);
    for (std::size_t j = 0; j < e.dim(); ++j) {
      if (!e.active(j)) continue;
      for (std::size_t k = e.first_cell(); k < e.last_cell(); ++k) {
        right[k] += e.phi_right(j, k) * e.primitive(j, k);
        left[k] += e.phi_left(j, k) * e.primitive(j, k + 1);
      }
    }
    double sq = 0.0;
    for (std::size_t k = 0; k < steps; ++k) sq += right[k] * right[k] + left[k] * left[k];
    norms.push_back(std::sqrt(0.5 * grid.step() * sq));
  }
  return norms;
}

}  // namespace ogawa
