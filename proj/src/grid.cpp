#include "ogawa/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ogawa {

TimeGrid::TimeGrid(std::size_t num_steps) : num_steps_(num_steps) {
  if (num_steps == 0) throw std::invalid_argument("TimeGrid: num_steps must be >= 1");
}

GridFunction::GridFunction(TimeGrid grid, std::size_t dim)
    : grid_(grid), dim_(dim), values_(dim * grid.num_nodes(), 0.0) {
  if (dim == 0) throw std::invalid_argument("GridFunction: dim must be >= 1");
}

GridFunction::GridFunction(TimeGrid grid, std::size_t dim, std::vector<double> values)
    : grid_(grid), dim_(dim), values_(std::move(values)) {
  if (dim == 0) throw std::invalid_argument("GridFunction: dim must be >= 1");
  if (values_.size() != dim * grid.num_nodes()) {
    throw std::invalid_argument("GridFunction: expected " + std::to_string(dim * grid.num_nodes()) +
                                " values, got " + std::to_string(values_.size()));
  }
}

void GridFunction::node(std::size_t k, std::span<double> out) const {
  for (std::size_t j = 0; j < dim_; ++j) out[j] = (*this)(j, k);
}

double GridFunction::sup_norm() const {
  double best = 0.0;
  for (std::size_t k = 0; k < grid_.num_nodes(); ++k) {
    double sq = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) sq += (*this)(j, k) * (*this)(j, k);
    best = std::max(best, sq);
  }
  return std::sqrt(best);
}

CellFunction::CellFunction(TimeGrid grid, std::size_t dim)
    : grid_(grid),
      dim_(dim),
      right_(dim * grid.num_steps(), 0.0),
      left_(dim * grid.num_steps(), 0.0) {}

SamplePath::SamplePath(GridFunction values) : values_(std::move(values)) {
  for (std::size_t j = 0; j < values_.dim(); ++j) {
    if (values_(j, 0) != 0.0) {
      throw std::invalid_argument("SamplePath: path must start at the origin");
    }
  }
}

SamplePath SamplePath::zero(TimeGrid grid, std::size_t dim) {
  return SamplePath(GridFunction(grid, dim));
}

SamplePath SamplePath::linear(TimeGrid grid, std::span<const double> slope) {
  GridFunction values(grid, slope.size());
  for (std::size_t j = 0; j < slope.size(); ++j) {
    for (std::size_t k = 0; k < grid.num_nodes(); ++k) values(j, k) = slope[j] * grid.time(k);
  }
  return SamplePath(std::move(values));
}

double trapezoid(std::span<const double> values, double step) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t k = 1; k + 1 < values.size(); ++k) sum += values[k];
  return sum * step;
}

std::vector<double> cumulative_trapezoid(std::span<const double> values, double step) {
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t k = 1; k < values.size(); ++k) {
    out[k] = out[k - 1] + 0.5 * step * (values[k - 1] + values[k]);
  }
  return out;
}

double cameron_martin_inner(const GridFunction& a, const GridFunction& b) {
  if (a.dim() != b.dim() || !(a.grid() == b.grid())) {
    throw std::invalid_argument("cameron_martin_inner: mismatched paths");
  }
  const std::size_t steps = a.grid().num_steps();
  double sum = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) {
    auto x = a.coord(j);
    auto y = b.coord(j);
    for (std::size_t k = 0; k < steps; ++k) sum += (x[k + 1] - x[k]) * (y[k + 1] - y[k]);
  }
  return sum / a.grid().step();
}

}  // namespace ogawa
