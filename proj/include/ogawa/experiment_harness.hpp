#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ogawa/basis_catalog.hpp"
#include "ogawa/ogawa_engine.hpp"
#include "ogawa/vector_fields.hpp"

namespace ogawa {

/// Unresolvable names, malformed values or inconsistent settings.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A basis choice. The family name `plin` (no level) means the projector
/// onto piecewise-linear paths of level n at schedule point n.
struct BasisSpec {
  std::string family;
  EnumerationOrder order = EnumerationOrder::balanced();

  bool schedule_indexed() const { return family == "plin"; }
  std::string name() const;
};

struct ExperimentConfig {
  std::string field = "linear:1,1,1,1";
  BasisSpec basis_a{"psi-trig"};
  std::optional<BasisSpec> basis_b = BasisSpec{"haar"};
  std::vector<std::size_t> schedule{4, 16, 64, 256};
  std::size_t grid = 4096;
  std::size_t paths = 10000;
  std::uint64_t seed = 20150601;
  std::string out;
  std::size_t threads = 1;

  /// Throws ConfigError on any inconsistency.
  void validate() const;
  /// Canonical text of everything that affects results (not out/threads).
  std::string fingerprint() const;
};

/// Applies one `key = value` setting. Keys: field, basis.a, basis.b, order.a,
/// order.b, grid, paths, seed, schedule, out, threads.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);
/// Reads flat key-value text; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

struct ReportRow {
  std::string estimator;
  std::size_t n = 0;
  double value = 0.0;
  double stderr_value = 0.0;
  std::size_t samples = 0;

  bool operator==(const ReportRow&) const = default;
};

struct ConvergenceReport {
  std::vector<ReportRow> rows;

  const ReportRow* find(std::string_view estimator, std::size_t n) const;
  bool operator==(const ConvergenceReport&) const = default;
};

/// Monte Carlo estimates of
///   h_a_minus_h_b       E[(h_n^a - h_n^b)^2]        (with a second basis)
///   g_minus_gprime.X    E[(g_n - g'_n)^2]
///   gprime_minus_strat.X E[(g'_n - Strat)^2]
///   h_minus_ito.X       E[(h_n - Ito)^2]
///   g_minus_strat.X     E[(g_n - Strat)^2]
/// for X in {a, b}, plus at n = 0 the conversion residual
/// Strat - Ito - (1/2) int div alpha (mean and mean absolute value).
/// All bases consume the same path ensemble.
ConvergenceReport run_convergence(const ExperimentConfig& config);

struct TrajectoryRow {
  std::size_t n = 0;
  double r_a = 0.0;
  double r_b = 0.0;
};

struct OrderDependenceResult {
  ConvergenceReport report;  // r.a, r.b, r_a_minus_r_b, h_a_minus_h_b at schedule points
  std::vector<TrajectoryRow> trajectory;  // ensemble-mean r at every prefix length
};

/// Compares two enumeration orders of one family (basis.b defaults to the
/// same family as basis.a).
OrderDependenceResult run_order_dependence(const ExperimentConfig& config);

/// CSV `estimator,n,value,stderr,M`, 17 significant digits.
void write_report(const ConvergenceReport& report, std::ostream& out);
void emit_report(const ConvergenceReport& report, const std::filesystem::path& path);
ConvergenceReport parse_report(std::istream& in);

void write_trajectory(const std::vector<TrajectoryRow>& rows, std::ostream& out);

/// Renormalization trajectory of one basis: diagonal entries and their prefix sums.
struct TraceRow {
  std::size_t n = 0;
  std::string label;
  double entry = 0.0;
  double r = 0.0;
};
std::vector<TraceRow> renormalization_trace(const VectorField& field, const SamplePath& path,
                                            const BasisFamily& basis, std::size_t count);

/// Named maps R^n -> R^n for the Gaussian trace inequality check.
struct RamerCase {
  std::string name;
  VectorField map;
  bool equality_expected = false;
};
/// f = 0, identity, constant and a bounded sinusoidal perturbation of the identity.
std::vector<RamerCase> ramer_battery(std::size_t n);

/// Recorded pilot values with tolerance bands.
struct Expectation {
  std::string estimator;
  std::size_t n = 0;
  double value = 0.0;
  double band = 0.0;
};

struct ExpectationSet {
  std::string name;
  std::string fingerprint;
  std::vector<Expectation> entries;
};

std::vector<ExpectationSet> load_expectations(const std::filesystem::path& path);
void save_expectations(const std::vector<ExpectationSet>& sets, const std::filesystem::path& path);
/// Expectation entries with 3-SE bands (plus a 1e-12 floor) for every row of `report`.
ExpectationSet expectations_from(const std::string& name, const ExperimentConfig& config,
                                 const ConvergenceReport& report);
/// Failure messages; empty when every entry is matched within its band.
std::vector<std::string> check_expectations(const ExpectationSet& set,
                                            const ConvergenceReport& report);

/// Pilot configurations whose results are stored in the expectations file.
std::vector<std::pair<std::string, ExperimentConfig>> pilot_configs();

}  // namespace ogawa
