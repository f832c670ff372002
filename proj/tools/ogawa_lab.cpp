// ogawa_lab: command-line driver for the Ogawa-integral experiments.

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "ogawa/experiment_harness.hpp"
#include "ogawa/path_model.hpp"
#include "ogawa/spectral_lab.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kAssertionFailed = 3;

struct Overrides {
  std::string config_file;
  std::optional<std::string> field, basis_a, basis_b, order_a, order_b, schedule, out;
  std::optional<std::size_t> grid, paths, threads;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "key = value configuration file");
    app.add_option("--field", field, "linear:h1,k1,h2,k2 or id1d");
    app.add_option("--basis-a", basis_a, "psi-trig, xi-mixed, haar, plin or plin:<level>");
    app.add_option("--basis-b", basis_b, "second basis, or none");
    app.add_option("--order-a", order_a, "balanced or adversarial:<K>");
    app.add_option("--order-b", order_b, "balanced or adversarial:<K>");
    app.add_option("--schedule", schedule, "comma-separated truncation points");
    app.add_option("--grid", grid, "number of grid steps");
    app.add_option("--paths", paths, "ensemble size M");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--threads", threads, "worker threads");
    app.add_option("--out", out, "output CSV (stdout when empty)");
  }

  ogawa::ExperimentConfig resolve(ogawa::ExperimentConfig base) const {
    if (!config_file.empty()) base = ogawa::load_config(config_file, std::move(base));
    auto set = [&](const char* key, const auto& value) {
      if (!value) return;
      if constexpr (std::is_same_v<std::decay_t<decltype(*value)>, std::string>) {
        ogawa::apply_setting(base, key, *value);
      } else {
        ogawa::apply_setting(base, key, std::to_string(*value));
      }
    };
    set("field", field);
    set("basis.a", basis_a);
    set("basis.b", basis_b);
    set("order.a", order_a);
    set("order.b", order_b);
    set("schedule", schedule);
    set("grid", grid);
    set("paths", paths);
    set("seed", seed);
    set("threads", threads);
    set("out", out);
    base.validate();
    return base;
  }
};

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    std::cout << std::setprecision(17);
    fn(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << std::setprecision(17);
  fn(file);
  if (!file.flush()) throw std::runtime_error("write to " + path + " failed");
}

int assert_against(const std::string& expectations, const ogawa::ExperimentConfig& config,
                   const ogawa::ConvergenceReport& report) {
  for (const auto& set : ogawa::load_expectations(expectations)) {
    if (set.fingerprint != config.fingerprint()) continue;
    const auto failures = ogawa::check_expectations(set, report);
    for (const auto& f : failures) std::cerr << "assert: " << f << '\n';
    if (!failures.empty()) return kAssertionFailed;
    std::cerr << "assert: " << set.name << " matched (" << set.entries.size() << " entries)\n";
    return 0;
  }
  std::cerr << "assert: no recorded expectations for " << config.fingerprint() << '\n';
  return kAssertionFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and spectral experiments for Ogawa integrals"};
  app.require_subcommand(1);
  int status = 0;

  Overrides converge_opts;
  bool converge_assert = false;
  std::string converge_expectations = OGAWA_DEFAULT_EXPECTATIONS;
  auto* converge = app.add_subcommand("converge", "convergence estimators along a schedule");
  converge_opts.attach(*converge);
  converge->add_flag("--assert", converge_assert, "compare against recorded expectations");
  converge->add_option("--expectations", converge_expectations, "expectations JSON");
  converge->callback([&] {
    const auto config = converge_opts.resolve({});
    const auto report = ogawa::run_convergence(config);
    with_output(config.out, [&](std::ostream& os) { ogawa::write_report(report, os); });
    if (converge_assert) status = assert_against(converge_expectations, config, report);
  });

  Overrides order_opts;
  std::string trajectory_out;
  auto* order = app.add_subcommand("order", "order dependence of the renormalization term");
  order_opts.attach(*order);
  order->add_option("--trajectory", trajectory_out, "CSV n,r_a,r_b for every prefix length");
  order->callback([&] {
    ogawa::ExperimentConfig base;
    base.field = "linear:1,0,1,1";
    base.basis_a = {"xi-mixed", ogawa::EnumerationOrder::balanced()};
    base.basis_b = ogawa::BasisSpec{"xi-mixed", ogawa::EnumerationOrder::adversarial(100)};
    base.schedule = {6, 42, 202, 402};
    base.paths = 200;
    const auto config = order_opts.resolve(base);
    const auto result = ogawa::run_order_dependence(config);
    with_output(config.out, [&](std::ostream& os) { ogawa::write_report(result.report, os); });
    if (!trajectory_out.empty()) {
      with_output(trajectory_out,
                  [&](std::ostream& os) { ogawa::write_trajectory(result.trajectory, os); });
    }
  });

  std::string spectrum_field = "linear:1,0,0,1";
  std::size_t spectrum_grid = 4096;
  std::size_t spectrum_count = 8;
  std::string spectrum_solver = "dense";
  std::string spectrum_out;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the discretized L");
  spectrum->add_option("--field", spectrum_field, "linear:h1,k1,h2,k2");
  spectrum->add_option("--grid", spectrum_grid, "number of grid steps");
  spectrum->add_option("--count", spectrum_count, "eigenvalues per direction");
  spectrum->add_option("--solver", spectrum_solver, "dense or tridiagonal")
      ->check(CLI::IsMember({"dense", "tridiagonal"}));
  spectrum->add_option("--out", spectrum_out, "output CSV");
  spectrum->callback([&] {
    const auto field = ogawa::parse_linear_field(spectrum_field);
    const auto report = ogawa::discretized_L_spectrum(
        field, ogawa::TimeGrid(spectrum_grid), spectrum_count,
        spectrum_solver == "dense" ? ogawa::SpectralSolver::Dense
                                   : ogawa::SpectralSolver::Tridiagonal);
    with_output(spectrum_out, [&](std::ostream& os) { ogawa::write_spectrum_csv(report, os); });
  });

  std::string trace_field = "linear:1,0,1,1";
  std::string trace_basis = "xi-mixed";
  std::string trace_order = "balanced";
  std::size_t trace_count = 64;
  std::size_t trace_grid = 4096;
  std::uint64_t trace_seed = 20150601;
  std::optional<std::uint64_t> trace_path;
  std::string trace_out;
  auto* trace = app.add_subcommand("trace", "diagonal entries and renormalization prefix sums");
  trace->add_option("--field", trace_field, "linear:h1,k1,h2,k2 or id1d");
  trace->add_option("--basis", trace_basis, "basis family");
  trace->add_option("--order", trace_order, "balanced or adversarial:<K>");
  trace->add_option("--count", trace_count, "number of elements");
  trace->add_option("--grid", trace_grid, "number of grid steps");
  trace->add_option("--seed", trace_seed, "master seed");
  trace->add_option("--path", trace_path, "Brownian path index (origin path when omitted)");
  trace->add_option("--out", trace_out, "output CSV");
  trace->callback([&] {
    const auto field = ogawa::parse_field(trace_field);
    const auto family =
        ogawa::make_family(trace_basis, field.dim(), ogawa::EnumerationOrder::parse(trace_order));
    const ogawa::TimeGrid grid(trace_grid);
    const auto path = trace_path ? ogawa::sample_brownian(grid, field.dim(),
                                                          ogawa::RngSpec{trace_seed}, *trace_path)
                                 : ogawa::SamplePath::zero(grid, field.dim());
    const auto rows = ogawa::renormalization_trace(field, path, family, trace_count);
    with_output(trace_out, [&](std::ostream& os) {
      os << "n,label,entry,r\n";
      for (const auto& r : rows) os << r.n << ',' << r.label << ',' << r.entry << ',' << r.r << '\n';
    });
  });

  std::size_t ramer_dim = 0;
  std::size_t ramer_samples = 100000;
  std::uint64_t ramer_seed = 20150601;
  bool ramer_squared = false;
  bool ramer_assert = false;
  std::string ramer_out;
  auto* ramer = app.add_subcommand("ramer", "Gaussian trace inequality on a test battery");
  ramer->add_option("--dim", ramer_dim, "dimension n (all of 1..3 when omitted)");
  ramer->add_option("--samples", ramer_samples, "Gaussian samples per case");
  ramer->add_option("--seed", ramer_seed, "master seed");
  ramer->add_flag("--squared", ramer_squared, "use the squared right-hand side");
  ramer->add_flag("--assert", ramer_assert, "exit 3 unless every case passes");
  ramer->add_option("--out", ramer_out, "output CSV");
  ramer->callback([&] {
    if (ramer_dim > 3) throw ogawa::ConfigError("ramer: --dim must be 1, 2 or 3");
    const auto variant = ramer_squared ? ogawa::RamerVariant::Squared : ogawa::RamerVariant::Linear;
    bool ok = true;
    with_output(ramer_out, [&](std::ostream& os) {
      os << "case,n,lhs,rhs,gap,gap_se,holds,equality_expected,equality_ok\n";
      for (std::size_t n = 1; n <= 3; ++n) {
        if (ramer_dim != 0 && n != ramer_dim) continue;
        for (const auto& c : ogawa::ramer_battery(n)) {
          const auto r = ogawa::gaussian_ramer_check(c.map, ramer_samples,
                                                     ogawa::RngSpec{ramer_seed + n}, variant);
          const bool eq = !c.equality_expected || r.equality_within();
          ok = ok && r.holds() && eq;
          os << c.name << ',' << n << ',' << r.lhs << ',' << r.rhs << ',' << r.gap << ','
             << r.gap_se << ',' << r.holds() << ',' << c.equality_expected << ',' << eq << '\n';
        }
      }
    });
    if (ramer_assert && !ok) status = kAssertionFailed;
  });

  std::string expectations_out = OGAWA_DEFAULT_EXPECTATIONS;
  std::size_t expectations_threads = 1;
  auto* expectations =
      app.add_subcommand("expectations", "rerun the pilot configurations and record them");
  expectations->add_option("--out", expectations_out, "expectations JSON to write");
  expectations->add_option("--threads", expectations_threads, "worker threads");
  expectations->callback([&] {
    std::vector<ogawa::ExpectationSet> sets;
    for (auto [name, config] : ogawa::pilot_configs()) {
      config.threads = expectations_threads;
      std::cerr << "pilot " << name << ": " << config.fingerprint() << '\n';
      sets.push_back(ogawa::expectations_from(name, config, ogawa::run_convergence(config)));
    }
    ogawa::save_expectations(sets, expectations_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  } catch (const ogawa::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
