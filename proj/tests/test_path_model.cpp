#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "ogawa/path_model.hpp"

using namespace ogawa;

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& x) {
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.se = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
  return m;
}

SamplePath identity_path(std::size_t steps, std::size_t dim = 1) {
  std::vector<double> slope(dim, 1.0);
  return SamplePath::linear(TimeGrid(steps), slope);
}

BasisFamily constant_basis() {
  return BasisFamily("const", 1, EnumerationOrder::balanced(), 1, [](std::size_t) {
    BasisElement e;
    e.slots = {ScalarPiece{ScalarPiece::Kind::Constant, 1.0}};
    e.label = "one";
    return e;
  });
}

}  // namespace

TEST_CASE("grid and path basics") {
  CHECK_THROWS(TimeGrid(0));
  const TimeGrid g(8);
  CHECK(g.time(0) == 0.0);
  CHECK(g.time(8) == 1.0);
  CHECK(g.divisible_by(4));
  CHECK_FALSE(g.divisible_by(3));
  GridFunction bad(g, 1);
  bad(0, 0) = 0.5;
  CHECK_THROWS_AS(SamplePath{bad}, std::invalid_argument);
}

TEST_CASE("sample_brownian starts at the origin and is reproducible") {
  const TimeGrid grid(64);
  const RngSpec rng{42};
  for (std::size_t dim : {1u, 2u, 3u}) {
    const auto p = sample_brownian(grid, dim, rng, 7);
    for (std::size_t j = 0; j < dim; ++j) CHECK(p(j, 0) == 0.0);
  }
  const auto a = sample_brownian(grid, 2, rng, 3);
  const auto b = sample_brownian(grid, 2, rng, 3);
  CHECK(std::ranges::equal(a.values().data(), b.values().data()));
  const auto c = sample_brownian(grid, 2, rng, 4);
  CHECK_FALSE(std::ranges::equal(a.values().data(), c.values().data()));
  CHECK_THROWS(sample_brownian(grid, 0, rng, 0));
}

TEST_CASE("stream seeds do not depend on generation order") {
  const RngSpec rng{99};
  const TimeGrid grid(16);
  std::vector<std::vector<double>> forward, backward(10);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto path = sample_brownian(grid, 1, rng, i);
    forward.emplace_back(path.values().data().begin(), path.values().data().end());
  }
  for (std::size_t i = 10; i-- > 0;) {
    const auto path = sample_brownian(grid, 1, rng, i);
    backward[i].assign(path.values().data().begin(), path.values().data().end());
  }
  CHECK(forward == backward);
}

TEST_CASE("Brownian second moments") {
  const TimeGrid grid(16);
  const RngSpec rng{2024};
  const std::size_t m = 100000;
  std::vector<double> w1sq(m), cov(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto p = sample_brownian(grid, 1, rng, i);
    w1sq[i] = p(0, 16) * p(0, 16);
    cov[i] = p(0, 4) * p(0, 12);
  }
  const auto v = moments(w1sq);
  CHECK(std::abs(v.mean - 1.0) <= 3.0 * v.se);
  const auto c = moments(cov);
  CHECK(std::abs(c.mean - 0.25) <= 3.0 * c.se);
}

TEST_CASE("paley_wiener on deterministic paths") {
  const auto one = constant_basis().element(0);
  const auto p = sample_brownian(TimeGrid(128), 1, RngSpec{5}, 0);
  CHECK(paley_wiener(p, one) == doctest::Approx(p(0, 128)).epsilon(1e-13));

  const auto cosine = component_trig_basis(1).element(1);
  CHECK(std::abs(paley_wiener(identity_path(4096), cosine)) <= 1e-12);

  CHECK_THROWS(paley_wiener(sample_brownian(TimeGrid(8), 2, RngSpec{1}, 0), one));
}

TEST_CASE("Paley-Wiener coefficients are orthonormal Gaussians") {
  const TimeGrid grid(64);
  const auto basis = haar_basis(1);
  const SampledBasis sampled(basis, 4, grid);
  const RngSpec rng{11};
  const std::size_t m = 100000;
  std::vector<std::vector<double>> prod(16, std::vector<double>(m));
  std::vector<double> first(m);
  for (std::size_t s = 0; s < m; ++s) {
    const auto c = project_coefficients(sample_brownian(grid, 1, rng, s), sampled, 4);
    first[s] = c[1];
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) prod[i * 4 + j][s] = c[i] * c[j];
    }
  }
  const auto mean = moments(first);
  CHECK(std::abs(mean.mean) <= 3.0 * mean.se);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const auto e = moments(prod[i * 4 + j]);
      CHECK(std::abs(e.mean - (i == j ? 1.0 : 0.0)) <= 3.0 * e.se);
    }
  }
}

TEST_CASE("approximate_wiener with a single constant") {
  const auto p = sample_brownian(TimeGrid(32), 1, RngSpec{3}, 1);
  const auto a = approximate_wiener(p, constant_basis(), 1);
  for (std::size_t k = 0; k <= 32; ++k) {
    CHECK(a(0, k) == doctest::Approx(p.grid().time(k) * p(0, 32)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(approximate_wiener(p, constant_basis(), 2), std::out_of_range);
  CHECK_THROWS(approximate_wiener(p, constant_basis(), 0));

  const auto line = approximate_wiener(identity_path(256), component_trig_basis(1), 1);
  for (std::size_t k = 0; k <= 256; ++k) CHECK(std::abs(line(0, k) - k / 256.0) <= 1e-14);
}

TEST_CASE("project_coefficients") {
  const auto p = sample_brownian(TimeGrid(32), 1, RngSpec{3}, 2);
  const auto c = project_coefficients(p, constant_basis(), 1);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == doctest::Approx(p(0, 32)).epsilon(1e-13));

  const auto two = project_coefficients(identity_path(512, 2), component_trig_basis(2), 2);
  CHECK(two[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(two[1] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("reconstruction equals the coefficient sum of primitives") {
  const TimeGrid grid(256);
  const auto family = component_trig_basis(2);
  const auto p = sample_brownian(grid, 2, RngSpec{8}, 0);
  const auto c = project_coefficients(p, family, 10);
  const auto w = approximate_wiener(p, family, 10);
  std::vector<double> e(2);
  for (std::size_t k = 0; k <= 256; k += 7) {
    double x = 0.0, y = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      family.element(i).primitive(grid.time(k), e);
      x += c[i] * e[0];
      y += c[i] * e[1];
    }
    CHECK(std::abs(w(0, k) - x) <= 1e-12);
    CHECK(std::abs(w(1, k) - y) <= 1e-12);
  }
}

TEST_CASE("Ito-Nisio: Haar approximations converge uniformly") {
  const TimeGrid grid(1024);
  const auto family = haar_basis(1);
  const SampledBasis sampled(family, 128, grid);
  const std::vector<std::size_t> levels{2, 8, 32, 128};
  std::vector<std::vector<double>> errors(levels.size());
  for (std::size_t s = 0; s < 100; ++s) {
    const auto p = sample_brownian(grid, 1, RngSpec{77}, s);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const auto a = approximate_wiener(p, sampled, levels[l]);
      double sup = 0.0;
      for (std::size_t k = 0; k <= 1024; ++k) sup = std::max(sup, std::abs(a(0, k) - p(0, k)));
      errors[l].push_back(sup);
    }
  }
  std::vector<double> medians;
  for (auto& e : errors) {
    std::ranges::nth_element(e, e.begin() + 50);
    medians.push_back(e[50]);
  }
  for (std::size_t l = 1; l < medians.size(); ++l) CHECK(medians[l] <= medians[l - 1]);
}

TEST_CASE("path csv") {
  std::ostringstream out;
  write_path_csv(identity_path(2, 2), out);
  CHECK(out.str() == "t,w1,w2\n0,0,0\n0.5,0.5,0.5\n1,1,1\n");
}
