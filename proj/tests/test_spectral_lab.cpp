#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ogawa/path_model.hpp"
#include "ogawa/spectral_lab.hpp"

using namespace ogawa;

namespace {

const double kPi = std::numbers::pi;

// Independent oracle: the unsymmetrized Nystrom matrix K W with K = min(t_k, t_l)
// on nodes t_1..t_N, solved by Eigen's general eigensolver.
std::vector<double> nystrom_oracle(std::size_t n, std::size_t count) {
  const double h = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd m(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      const double w = l + 1 == n ? 0.5 * h : h;
      m(k, l) = std::min(k + 1, l + 1) * h * w;
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  std::vector<double> ev;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i).real());
  std::sort(ev.rbegin(), ev.rend());
  ev.resize(count);
  return ev;
}

}  // namespace

TEST_CASE("matrix A") {
  const auto id = matrix_A({1.0, 0.0, 0.0, 1.0});
  CHECK(id.a11 == 1.0);
  CHECK(id.a12 == 0.0);
  CHECK(id.a22 == 1.0);
  CHECK(id.eigenvalues == std::array{1.0, 1.0});

  const auto h2 = matrix_A({0.0, 0.0, 1.0, 0.0});
  CHECK(h2.a11 == 1.0);
  CHECK(h2.a22 == 0.0);
  CHECK(h2.eigenvalues == std::array{1.0, 0.0});

  const auto zero = matrix_A({});
  CHECK(zero.eigenvalues == std::array{0.0, 0.0});

  const auto g = matrix_A({1.0, 2.0, -0.5, 0.7});
  CHECK(g.a12 == doctest::Approx(1.0 * 2.0 - 0.5 * 0.7));
  for (std::size_t j = 0; j < 2; ++j) {
    const auto& u = g.eigenvectors[j];
    CHECK(std::hypot(u[0], u[1]) == doctest::Approx(1.0));
    CHECK(g.a11 * u[0] + g.a12 * u[1] == doctest::Approx(g.eigenvalues[j] * u[0]));
    CHECK(g.a12 * u[0] + g.a22 * u[1] == doctest::Approx(g.eigenvalues[j] * u[1]));
  }
  CHECK(g.eigenvalues[0] >= g.eigenvalues[1]);
  CHECK(g.eigenvalues[1] >= 0.0);
}

TEST_CASE("closed-form spectrum") {
  CHECK(closed_form_eigenvalue(1.0, 0) == doctest::Approx(4.0 / (kPi * kPi)));
  CHECK(closed_form_eigenvalue(1.0, 0) == doctest::Approx(0.405285).epsilon(1e-6));
  CHECK(closed_form_eigenvalue(1.0, 1) == doctest::Approx(4.0 / (9.0 * kPi * kPi)));
  const auto pairs = closed_form_spectrum(matrix_A({0.0, 0.0, 1.0, 0.0}), 5);
  REQUIRE(pairs.size() == 10);
  for (const auto& p : pairs) {
    if (p.j == 2) CHECK(p.lambda == 0.0);
  }
  for (std::size_t i = 2; i < pairs.size(); ++i) CHECK(pairs[i].lambda <= pairs[i - 2].lambda);

  // The eigenfunction satisfies (K f)(t) = lambda f(t) for the min kernel.
  const auto pair = closed_form_spectrum(matrix_A({1.0, 0.0, 0.0, 1.0}), 3)[4];
  for (double t : {0.2, 0.5, 0.9}) {
    const double c = (0.5 + pair.n) * kPi;
    // int_0^1 min(t, r) sin(c r) dr in closed form.
    const double kf = (std::sin(c * t) - c * t * std::cos(c)) / (c * c) + t * std::cos(c) / c;
    CHECK(kf == doctest::Approx(pair.lambda * pair.eigenfunction(t)[0] / pair.direction[0]));
  }
}

TEST_CASE("scalar min-kernel spectrum against an independent solver") {
  const auto oracle = nystrom_oracle(256, 6);
  const auto dense = min_kernel_spectrum(TimeGrid(256), 6, SpectralSolver::Dense);
  const auto tri = min_kernel_spectrum(TimeGrid(256), 6, SpectralSolver::Tridiagonal);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(dense.eigenvalues[i] == doctest::Approx(oracle[i]).epsilon(1e-10));
    CHECK(tri.eigenvalues[i] == doctest::Approx(oracle[i]).epsilon(1e-10));
  }
  CHECK(dense.trace == doctest::Approx(tri.trace));
  CHECK_THROWS_AS(min_kernel_spectrum(TimeGrid(16), 17), std::invalid_argument);
}

TEST_CASE("discretized L spectrum") {
  const TimeGrid grid(1024);
  const auto report = discretized_L_spectrum({1.0, 0.0, 0.0, 1.0}, grid, 5);
  for (const auto& row : report.rows) {
    CHECK(row.rel_err <= 1e-3);
    CHECK(row.numeric >= 0.0);
  }
  const auto zero = discretized_L_spectrum({}, TimeGrid(512), 4);
  for (const auto& row : zero.rows) CHECK(std::abs(row.numeric) <= 1e-12);

  // Top eigenvector lines up with sin(pi t / 2).
  const auto s = min_kernel_spectrum(grid, 1);
  std::vector<double> prod(grid.num_nodes()), ref(grid.num_nodes());
  for (std::size_t k = 0; k <= grid.num_steps(); ++k) {
    const double v = std::sin(0.5 * kPi * grid.time(k));
    prod[k] = s.eigenfunctions[0][k] * v;
    ref[k] = v * v;
  }
  const double cosine = trapezoid(prod, grid.step()) / std::sqrt(trapezoid(ref, grid.step()));
  CHECK(std::abs(cosine) >= 0.999);
}

TEST_CASE("refinement reduces the spectral error") {
  const LinearField f{1.0, 0.3, -0.2, 0.8};
  const auto coarse = discretized_L_spectrum(f, TimeGrid(2048), 5, SpectralSolver::Tridiagonal);
  const auto fine = discretized_L_spectrum(f, TimeGrid(8192), 5, SpectralSolver::Tridiagonal);
  for (std::size_t i = 0; i < coarse.rows.size(); ++i) {
    CHECK(fine.rows[i].rel_err <= coarse.rows[i].rel_err);
  }
}

TEST_CASE("trace of L matches the Hilbert-Schmidt norm") {
  const LinearField f{0.5, -1.5, 2.0, 1.0};
  const auto report = discretized_L_spectrum(f, TimeGrid(2048), 2, SpectralSolver::Tridiagonal);
  const double hs = hs_norm_squared(f.field(), SamplePath::zero(TimeGrid(2048), 2));
  CHECK(std::abs(report.numeric_trace / hs - 1.0) <= 0.01);
}

TEST_CASE("spectrum csv") {
  std::ostringstream out;
  write_spectrum_csv(discretized_L_spectrum({1.0, 0.0, 0.0, 1.0}, TimeGrid(64), 1), out);
  CHECK(out.str().rfind("n,j,lambda_closed,lambda_numeric,rel_err\n0,1,", 0) == 0);
}

TEST_CASE("trace-class diagnostic") {
  const auto id = matrix_A({1.0, 0.0, 0.0, 1.0});
  const auto s = trace_class_diagnostic(id, 10000);
  // S_N = (4/pi) sum_{n<N} 1/(2n+1), summed independently here.
  double odd = 0.0;
  for (std::size_t n = 0; n < 10000; ++n) {
    odd += 1.0 / (2.0 * n + 1.0);
    if (n + 1 == 10 || n + 1 == 10000) CHECK(s[n] == doctest::Approx(4.0 / kPi * odd).epsilon(1e-12));
  }
  // Unbounded growth: each doubling adds about (sqrt a1 + sqrt a2) ln 2 / pi.
  const double step = 2.0 * std::log(2.0) / kPi;
  for (std::size_t n : {100u, 1000u, 5000u}) {
    CHECK(std::abs((s[2 * n - 1] - s[n - 1]) - step) <= 1e-3);
  }
  CHECK(s[9999] > s[999]);

  const auto zero = trace_class_diagnostic(matrix_A({}), 100);
  CHECK(zero.back() == 0.0);

  const auto hs = hilbert_schmidt_partial_sums(id, 10000);
  CHECK(std::abs(hs.back() - 1.0) <= 1e-3);
  const LinearField f{0.5, -1.5, 2.0, 1.0};
  CHECK(std::abs(hilbert_schmidt_partial_sums(matrix_A(f), 10000).back() -
                 (0.25 + 2.25 + 4.0 + 1.0) / 2.0) <= 1e-3 * 7.5);
}
