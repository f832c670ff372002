#include "ogawa/path_model.hpp"

#include <cmath>
#include <iomanip>
#include <random>
#include <stdexcept>
#include <string>

namespace ogawa {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_prefix(const SamplePath& path, std::size_t basis_dim, std::size_t n,
                  std::size_t available, const char* op) {
  if (path.dim() != basis_dim) {
    throw std::invalid_argument(std::string(op) + ": path dim " + std::to_string(path.dim()) +
                                " != basis dim " + std::to_string(basis_dim));
  }
  if (n == 0) throw std::invalid_argument(std::string(op) + ": n must be >= 1");
  if (n > available) {
    throw std::out_of_range(std::string(op) + ": n = " + std::to_string(n) + " exceeds " +
                            std::to_string(available) + " available elements");
  }
}

std::size_t available(const BasisFamily& basis, std::size_t n) {
  return basis.size().value_or(n);
}

}  // namespace

std::uint64_t RngSpec::stream_seed(std::uint64_t path_index) const {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(path_index + 0x632be59bd9b4e019ULL));
}

SamplePath sample_brownian(const TimeGrid& grid, std::size_t dim, const RngSpec& rng,
                           std::uint64_t path_index) {
  if (dim == 0) throw std::invalid_argument("sample_brownian: dim must be >= 1");
  std::mt19937_64 engine(rng.stream_seed(path_index));
  std::normal_distribution<double> normal(0.0, std::sqrt(grid.step()));
  GridFunction values(grid, dim);
  for (std::size_t k = 1; k < grid.num_nodes(); ++k) {
    for (std::size_t j = 0; j < dim; ++j) values(j, k) = values(j, k - 1) + normal(engine);
  }
  return SamplePath(std::move(values));
}

double paley_wiener(const SamplePath& path, const BasisElement& element) {
  if (element.dim() != path.dim()) {
    throw std::invalid_argument("paley_wiener: dimension mismatch");
  }
  return SampledElement(element, path.grid()).paley_wiener(path.values());
}

std::vector<double> project_coefficients(const SamplePath& path, const SampledBasis& basis,
                                         std::size_t n) {
  check_prefix(path, basis.dim(), n, basis.size(), "project_coefficients");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = basis[i].paley_wiener(path.values());
  return out;
}

std::vector<double> project_coefficients(const SamplePath& path, const BasisFamily& basis,
                                         std::size_t n) {
  check_prefix(path, basis.dim(), n, available(basis, n), "project_coefficients");
  return project_coefficients(path, SampledBasis(basis, n, path.grid()), n);
}

SamplePath approximate_wiener(const SamplePath& path, const SampledBasis& basis, std::size_t n) {
  check_prefix(path, basis.dim(), n, basis.size(), "approximate_wiener");
  GridFunction out(path.grid(), path.dim());
  for (std::size_t i = 0; i < n; ++i) {
    basis[i].add_primitive(basis[i].paley_wiener(path.values()), out);
  }
  return SamplePath(std::move(out));
}

SamplePath approximate_wiener(const SamplePath& path, const BasisFamily& basis, std::size_t n) {
  check_prefix(path, basis.dim(), n, available(basis, n), "approximate_wiener");
  return approximate_wiener(path, SampledBasis(basis, n, path.grid()), n);
}

void write_path_csv(const SamplePath& path, std::ostream& out) {
  out << "t";
  for (std::size_t j = 0; j < path.dim(); ++j) out << ",w" << (j + 1);
  out << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < path.grid().num_nodes(); ++k) {
    out << path.grid().time(k);
    for (std::size_t j = 0; j < path.dim(); ++j) out << ',' << path(j, k);
    out << '\n';
  }
}

}  // namespace ogawa
