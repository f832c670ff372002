#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ogawa {

/// Uniform grid t_k = k / num_steps on [0, 1].
class TimeGrid {
 public:
  explicit TimeGrid(std::size_t num_steps);

  std::size_t num_steps() const { return num_steps_; }
  std::size_t num_nodes() const { return num_steps_ + 1; }
  double step() const { return 1.0 / static_cast<double>(num_steps_); }
  double time(std::size_t k) const {
    return static_cast<double>(k) / static_cast<double>(num_steps_);
  }
  bool divisible_by(std::size_t m) const { return m != 0 && num_steps_ % m == 0; }

  bool operator==(const TimeGrid&) const = default;

 private:
  std::size_t num_steps_;
};

/// R^d-valued function sampled on the nodes of a grid. Storage is
/// coordinate-major: coord(j)[k] is the j-th component at t_k.
class GridFunction {
 public:
  GridFunction(TimeGrid grid, std::size_t dim);
  GridFunction(TimeGrid grid, std::size_t dim, std::vector<double> values);

  const TimeGrid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }

  std::span<const double> coord(std::size_t j) const {
    return {values_.data() + j * grid_.num_nodes(), grid_.num_nodes()};
  }
  std::span<double> coord(std::size_t j) {
    return {values_.data() + j * grid_.num_nodes(), grid_.num_nodes()};
  }
  double operator()(std::size_t j, std::size_t k) const {
    return values_[j * grid_.num_nodes() + k];
  }
  double& operator()(std::size_t j, std::size_t k) { return values_[j * grid_.num_nodes() + k]; }

  void node(std::size_t k, std::span<double> out) const;
  std::span<const double> data() const { return values_; }

  /// Largest Euclidean norm over all nodes.
  double sup_norm() const;

 private:
  TimeGrid grid_;
  std::size_t dim_;
  std::vector<double> values_;
};

/// One-sided values of a piecewise-continuous R^d-valued function on each
/// grid cell [t_k, t_{k+1}]: right(j)[k] is the limit at t_k from the right,
/// left(j)[k] the limit at t_{k+1} from the left.
class CellFunction {
 public:
  CellFunction(TimeGrid grid, std::size_t dim);

  const TimeGrid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }

  std::span<const double> right(std::size_t j) const {
    return {right_.data() + j * grid_.num_steps(), grid_.num_steps()};
  }
  std::span<double> right(std::size_t j) {
    return {right_.data() + j * grid_.num_steps(), grid_.num_steps()};
  }
  std::span<const double> left(std::size_t j) const {
    return {left_.data() + j * grid_.num_steps(), grid_.num_steps()};
  }
  std::span<double> left(std::size_t j) {
    return {left_.data() + j * grid_.num_steps(), grid_.num_steps()};
  }

 private:
  TimeGrid grid_;
  std::size_t dim_;
  std::vector<double> right_;
  std::vector<double> left_;
};

/// A continuous path starting at the origin, sampled on a grid. Immutable.
class SamplePath {
 public:
  /// Throws std::invalid_argument unless every coordinate vanishes at t_0.
  explicit SamplePath(GridFunction values);

  static SamplePath zero(TimeGrid grid, std::size_t dim);
  /// omega(t) = t * slope.
  static SamplePath linear(TimeGrid grid, std::span<const double> slope);

  const TimeGrid& grid() const { return values_.grid(); }
  std::size_t dim() const { return values_.dim(); }
  std::span<const double> coord(std::size_t j) const { return values_.coord(j); }
  double operator()(std::size_t j, std::size_t k) const { return values_(j, k); }
  double increment(std::size_t j, std::size_t k) const {
    return values_(j, k + 1) - values_(j, k);
  }
  const GridFunction& values() const { return values_; }

 private:
  GridFunction values_;
};

/// Trapezoidal integral of a node-sampled scalar over [0, 1].
double trapezoid(std::span<const double> values, double step);

/// Trapezoidal running integral; result[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> values, double step);

/// Cameron-Martin inner product of two paths, sum_k (da_k . db_k) / dt.
double cameron_martin_inner(const GridFunction& a, const GridFunction& b);

}  // namespace ogawa
