#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "ogawa/ogawa_engine.hpp"
#include "ogawa/path_model.hpp"

using namespace ogawa;

namespace {

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

double harmonic(std::size_t k) {
  double h = 0.0;
  for (std::size_t i = k; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h;
}

const double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("partial sums on trivial inputs") {
  const TimeGrid grid(512);
  const auto p = sample_brownian(grid, 2, RngSpec{1}, 0);
  const auto zero = Integrand::from_field(constant_field({0.0, 0.0}));
  for (std::size_t n : {1u, 5u, 17u}) {
    CHECK(ogawa_partial_sum(zero, p, component_trig_basis(2), n) == 0.0);
  }

  const auto id = Integrand::from_field(identity_1d());
  const auto line = identity_path(4096);
  CHECK(ogawa_partial_sum(id, line, constant_basis(), 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(renormalized_sum(identity_1d(), line, constant_basis(), 1) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(renormalization_term(identity_1d(), line, constant_basis(), 1) ==
        doctest::Approx(0.5).epsilon(1e-12));

  const Integrand bad(1, [](const SamplePath&, std::size_t, std::span<double> out) {
    out[0] = std::numeric_limits<double>::infinity();
  });
  CHECK_THROWS_AS(bad.sample(line), std::domain_error);
}

TEST_CASE("coefficient, Stieltjes and inner-product routes agree") {
  const TimeGrid grid(1024);
  const auto field = LinearField{1.0, -0.5, 2.0, 0.3}.field();
  const auto f = Integrand::from_field(field);
  for (const auto& family : {haar_basis(2), piecewise_linear_basis(16, 2)}) {
    const SampledBasis b(family, 32, grid);
    for (std::size_t s = 0; s < 5; ++s) {
      const auto p = sample_brownian(grid, 2, RngSpec{19}, s);
      for (std::size_t n : {8u, 32u}) {
        const double g = ogawa_partial_sum(f, p, b, n);
        CHECK(std::abs(g - ogawa_partial_sum_stieltjes(f, p, b, n)) <= 1e-10);
        CHECK(std::abs(g - ogawa_partial_sum_inner_product(field, p, b, n)) <= 1e-10);
      }
    }
  }
  // Trigonometric elements are not piecewise linear; the routes agree up to quadrature.
  const SampledBasis trig(component_trig_basis(2), 9, grid);
  const auto p = sample_brownian(grid, 2, RngSpec{19}, 9);
  const double g = ogawa_partial_sum(f, p, trig, 9);
  CHECK(std::abs(g - ogawa_partial_sum_stieltjes(f, p, trig, 9)) <= 1e-3);
}

TEST_CASE("psi diagonal entries") {
  const TimeGrid grid(4096);
  const LinearField lf{1.3, -0.7, 0.4, 2.1};
  const auto psi = component_trig_basis(2);
  const auto origin = SamplePath::zero(grid, 2);
  const SampledBasis b(psi, 2 + 4 * 20, grid);
  const auto d = diagonal_entries(lf.field(), origin, b, b.size());
  CHECK(std::abs(d[0] - lf.h1 / 2) <= 1e-8);
  CHECK(std::abs(d[1] - lf.k2 / 2) <= 1e-8);
  for (std::size_t i = 2; i < d.size(); ++i) CHECK(std::abs(d[i]) <= 1e-8);
  CHECK(std::abs(diagonal_entry(lf.field(), origin, psi.element(0)) - lf.h1 / 2) <= 1e-8);

  for (std::size_t n : {2u, 3u, 10u, 50u}) {
    CHECK(std::abs(renormalization_term(lf.field(), origin, psi, n) - lf.divergence() / 2) <= 1e-8);
  }
}

TEST_CASE("xi diagonal entries") {
  const TimeGrid grid(4096);
  const LinearField lf{0.5, -1.0, 1.5, 2.0};
  const auto origin = SamplePath::zero(grid, 2);
  const SampledBasis b(mixed_trig_basis(), 2 + 4 * 50, grid);
  const auto d = diagonal_entries(lf.field(), origin, b, b.size());
  for (std::size_t n = 1; n <= 50; ++n) {
    const double v = lf.curl() / (4.0 * n * kPi);
    const std::size_t base = 2 + 4 * (n - 1);
    CHECK(std::abs(d[base + 0] - v) <= 1e-8);
    CHECK(std::abs(d[base + 1] + v) <= 1e-8);
    CHECK(std::abs(d[base + 2] + v) <= 1e-8);
    CHECK(std::abs(d[base + 3] - v) <= 1e-8);
  }
}

TEST_CASE("xi renormalization depends on the order") {
  const TimeGrid grid(1024);
  const LinearField lf{1.0, 0.0, 1.0, 1.0};  // curl 1
  const auto origin = SamplePath::zero(grid, 2);
  const double half_div = lf.divergence() / 2;

  const SampledBasis bal(mixed_trig_basis(), 2 + 4 * 30, grid);
  const auto db = diagonal_entries(lf.field(), origin, bal, bal.size());
  double r = 0.0;
  for (std::size_t i = 0; i < db.size(); ++i) {
    r += db[i];
    if (i >= 1 && (i - 1) % 4 == 0) CHECK(std::abs(r - half_div) <= 1e-10);
  }

  for (std::size_t k : {1u, 10u, 100u}) {
    const SampledBasis adv(mixed_trig_basis(EnumerationOrder::adversarial(k)), 2 + 2 * k, grid);
    const double ra = renormalization_term(lf.field(), origin, adv, adv.size());
    CHECK(std::abs(ra - (half_div + harmonic(k) / (2.0 * kPi))) <= 1e-8);
  }

  // Curl-free fields do not see the order.
  const LinearField sym{1.0, 0.7, 0.7, -0.4};
  const SampledBasis a(mixed_trig_basis(), 120, grid);
  const SampledBasis c(mixed_trig_basis(EnumerationOrder::adversarial(20)), 120, grid);
  const auto da = diagonal_entries(sym.field(), origin, a, 120);
  const auto dc = diagonal_entries(sym.field(), origin, c, 120);
  double ra = 0.0, rc = 0.0;
  for (std::size_t i = 0; i < 120; ++i) {
    ra += da[i];
    rc += dc[i];
    CHECK(std::abs(ra - rc) <= 1e-10);
  }
}

TEST_CASE("piecewise-linear diagonal entries and trace") {
  const TimeGrid grid(1024);
  const LinearField lf{2.0, 1.0, -1.0, 3.0};
  const auto p = sample_brownian(grid, 2, RngSpec{23}, 0);
  for (std::size_t level : {1u, 2u, 8u, 64u, 256u}) {
    const auto family = piecewise_linear_basis(level, 2);
    const SampledBasis b(family, 2 * level, grid);
    const auto d = diagonal_entries(lf.field(), p, b, b.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double expect = (i % 2 == 0 ? lf.h1 : lf.k2) / (2.0 * level);
      CHECK(std::abs(d[i] - expect) <= 1e-10);
    }
    CHECK(std::abs(renormalization_term(lf.field(), p, b, b.size()) - lf.divergence() / 2) <= 1e-10);
  }
}

TEST_CASE("linear-field renormalization is path independent") {
  const TimeGrid grid(512);
  const auto field = LinearField{0.3, 1.2, -0.8, 0.9}.field();
  const SampledBasis b(mixed_trig_basis(EnumerationOrder::adversarial(5)), 40, grid);
  const double r0 = renormalization_term(field, SamplePath::zero(grid, 2), b, 40);
  for (std::size_t s = 0; s < 20; ++s) {
    const auto p = sample_brownian(grid, 2, RngSpec{2}, s);
    CHECK(std::abs(renormalization_term(field, p, b, 40) - r0) <= 1e-10);
  }
}

TEST_CASE("constant fields") {
  const TimeGrid grid(256);
  const auto c = constant_field({0.7, -1.1});
  const auto p = sample_brownian(grid, 2, RngSpec{4}, 0);
  const auto expect = 0.7 * p(0, 256) - 1.1 * p(1, 256);
  CHECK(renormalization_term(c, p, haar_basis(2), 10) == 0.0);
  CHECK(std::abs(renormalized_sum(c, p, haar_basis(2), 2) - expect) <= 1e-12);
  CHECK(std::abs(ito_integral(c, p) - expect) <= 1e-12);
  CHECK(std::abs(wong_zakai_sum(c, p, piecewise_linear_basis(8, 2), 16) - expect) <= 1e-12);
}

TEST_CASE("Wong-Zakai sums for the identity field") {
  const TimeGrid grid(1024);
  for (std::size_t s = 0; s < 10; ++s) {
    const auto p = sample_brownian(grid, 1, RngSpec{5}, s);
    const double half_sq = 0.5 * p(0, 1024) * p(0, 1024);
    for (std::size_t level : {1u, 4u, 32u, 1024u}) {
      CHECK(std::abs(wong_zakai_sum(identity_1d(), p, piecewise_linear_basis(level, 1), level) -
                     half_sq) <= 1e-10);
    }
    CHECK(std::abs(stratonovich_integral(identity_1d(), p) - half_sq) <= 1e-12);
  }
}

TEST_CASE("reference integrals on the identity path") {
  const auto line = identity_path(1000);
  CHECK(std::abs(ito_integral(identity_1d(), line) - 0.5) <= 1e-3);
  CHECK(std::abs(ito_integral(identity_1d(), line) - 0.5) >= 1e-4);
  CHECK(std::abs(stratonovich_integral(identity_1d(), line) - 0.5) <= 1e-12);

  // Ito sums are martingales: mean zero over an ensemble.
  const TimeGrid grid(256);
  const std::size_t m = 20000;
  double sum = 0.0, sq = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    const double v = ito_integral(identity_1d(), sample_brownian(grid, 1, RngSpec{6}, s));
    sum += v;
    sq += v * v;
  }
  const double mean = sum / m;
  const double se = std::sqrt((sq / m - mean * mean) / (m - 1));
  CHECK(std::abs(mean) <= 3.0 * se);
}

TEST_CASE("ledger") {
  const TimeGrid grid(512);
  const auto field = LinearField{1.0, 1.0, 1.0, 1.0}.field();
  const auto p = sample_brownian(grid, 2, RngSpec{8}, 3);
  const SampledBasis b(component_trig_basis(2), 64, grid);
  const std::vector<std::size_t> schedule{4, 16, 64};
  const auto ledger = build_ledger(field, p, b, schedule, 3);
  REQUIRE(ledger.rows.size() == 3);
  for (const auto& row : ledger.rows) {
    CHECK(row.h == row.g - row.r);
    CHECK(std::abs(row.g - ogawa_partial_sum(Integrand::from_field(field), p, b, row.n)) <= 1e-10);
    CHECK(std::abs(row.r - renormalization_term(field, p, b, row.n)) <= 1e-12);
    CHECK(std::abs(row.gprime - wong_zakai_sum(field, p, b, row.n)) <= 1e-10);
  }
  CHECK(ledger.ito == ito_integral(field, p));
  CHECK(ledger.strat == stratonovich_integral(field, p));

  const std::vector<double> diag = diagonal_entries(field, p, b, 64);
  const auto pre = build_ledger(field, p, b, schedule, 3, diag);
  for (std::size_t i = 0; i < 3; ++i) CHECK(pre.rows[i].r == doctest::Approx(ledger.rows[i].r));

  const std::vector<std::size_t> bad{4, 4};
  CHECK_THROWS(build_ledger(field, p, b, bad));
  const std::vector<std::size_t> long_schedule{128};
  CHECK_THROWS(build_ledger(field, p, b, long_schedule));

  std::ostringstream out;
  const std::vector<OgawaLedger> ledgers{ledger};
  write_ledger_csv(ledgers, out);
  CHECK(out.str().rfind("path_index,n,g,r,h,gprime,ito,strat\n3,4,", 0) == 0);
}

TEST_CASE("Ito-Stratonovich conversion for a linear field") {
  const TimeGrid grid(4096);
  const LinearField lf{1.0, 1.0, 1.0, 1.0};
  const auto field = lf.field();
  const std::size_t m = 2000;
  double sum = 0.0, sq = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    const auto p = sample_brownian(grid, 2, RngSpec{14}, s);
    CHECK(half_divergence_integral(field, p) == doctest::Approx(lf.divergence() / 2));
    const double v = stratonovich_integral(field, p) - ito_integral(field, p) - lf.divergence() / 2;
    sum += v;
    sq += v * v;
  }
  const double mean = sum / m;
  const double se = std::sqrt((sq / m - mean * mean) / (m - 1));
  CHECK(std::abs(mean) <= 3.0 * se);
}
