#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "ogawa/basis_catalog.hpp"
#include "ogawa/grid.hpp"

namespace ogawa {

/// Per-path random streams. The stream of path i is seeded with a hash of
/// (master_seed, i), so a path never depends on which other paths were drawn.
struct RngSpec {
  std::uint64_t master_seed = 0;

  std::uint64_t stream_seed(std::uint64_t path_index) const;
};

/// Brownian path on `grid`: independent N(0, dt) increments per coordinate.
SamplePath sample_brownian(const TimeGrid& grid, std::size_t dim, const RngSpec& rng,
                           std::uint64_t path_index);

/// Discrete Paley-Wiener integral int_0^1 phi dW (left-point sum).
double paley_wiener(const SamplePath& path, const BasisElement& element);

/// (n_{e_1}(w), ..., n_{e_n}(w)) for the first n elements of `basis`.
std::vector<double> project_coefficients(const SamplePath& path, const BasisFamily& basis,
                                         std::size_t n);
std::vector<double> project_coefficients(const SamplePath& path, const SampledBasis& basis,
                                         std::size_t n);

/// Ito-Nisio approximation t -> sum_{i<=n} e_i(t) n_{e_i}(w).
SamplePath approximate_wiener(const SamplePath& path, const BasisFamily& basis, std::size_t n);
SamplePath approximate_wiener(const SamplePath& path, const SampledBasis& basis, std::size_t n);

/// CSV dump with header t,w1[,w2,...] and 17 significant digits.
void write_path_csv(const SamplePath& path, std::ostream& out);

}  // namespace ogawa
