#include "ogawa/experiment_harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <thread>

#include "ogawa/path_model.hpp"

namespace ogawa {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(std::string_view text, std::string_view key) {
  T value{};
  const std::string t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError("config: bad value '" + t + "' for " + std::string(key));
  }
  return value;
}

std::vector<std::size_t> parse_schedule(std::string_view text) {
  std::vector<std::size_t> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    out.push_back(parse_number<std::size_t>(rest.substr(0, comma), "schedule"));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Sequential, index-ordered reduction.
MeanSe mean_se(const std::vector<double>& x) {
  MeanSe out;
  if (x.empty()) return out;
  for (double v : x) out.mean += v;
  out.mean /= static_cast<double>(x.size());
  if (x.size() < 2) return out;
  double ss = 0.0;
  for (double v : x) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
  return out;
}

// Builds ledgers for one basis spec against many paths. Sampled tables and,
// for constant-Jacobian fields, the diagonal entries are computed once.
class LedgerBuilder {
 public:
  LedgerBuilder(const BasisSpec& spec, const VectorField& field, const TimeGrid& grid,
                const std::vector<std::size_t>& schedule)
      : field_(field) {
    const std::size_t d = field.dim();
    const SamplePath origin = SamplePath::zero(grid, d);
    auto add_stage = [&](const BasisFamily& family, std::size_t count,
                         std::vector<std::size_t> points, std::optional<std::size_t> relabel) {
      Stage stage{SampledBasis(family, count, grid), std::move(points), {}, relabel};
      if (field.has_constant_jacobian()) {
        stage.diagonal = diagonal_entries(field, origin, stage.basis, count);
      }
      stages_.push_back(std::move(stage));
    };
    if (spec.schedule_indexed()) {
      for (std::size_t level : schedule) {
        add_stage(piecewise_linear_basis(level, d), d * level, {d * level}, level);
      }
    } else {
      add_stage(make_family(spec.family, d, spec.order), schedule.back(), schedule, std::nullopt);
    }
  }

  OgawaLedger build(const SamplePath& path, std::uint64_t index) const {
    OgawaLedger out;
    for (const auto& stage : stages_) {
      OgawaLedger part =
          build_ledger(field_, path, stage.basis, stage.schedule, index, stage.diagonal);
      if (stage.relabel) {
        for (auto& row : part.rows) row.n = *stage.relabel;
      }
      if (out.rows.empty()) {
        out = std::move(part);
      } else {
        out.rows.insert(out.rows.end(), part.rows.begin(), part.rows.end());
      }
    }
    return out;
  }

  /// Diagonal entries of the first nested stage on `path`.
  std::vector<double> diagonal(const SamplePath& path) const {
    const auto& stage = stages_.front();
    if (!stage.diagonal.empty()) return stage.diagonal;
    return diagonal_entries(field_, path, stage.basis, stage.basis.size());
  }

 private:
  struct Stage {
    SampledBasis basis;
    std::vector<std::size_t> schedule;
    std::vector<double> diagonal;
    std::optional<std::size_t> relabel;
  };
  const VectorField& field_;
  std::vector<Stage> stages_;
};

// Runs `work(i)` for i in [0, count) on `threads` workers; each index is
// handled by exactly one worker.
template <typename Work>
void for_each_path(std::size_t count, std::size_t threads, const Work& work) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += threads) work(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

VectorField resolve_field(const std::string& spec) {
  try {
    return parse_field(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void push(ConvergenceReport& report, std::string name, std::size_t n,
          const std::vector<double>& samples) {
  const auto s = mean_se(samples);
  report.rows.push_back({std::move(name), n, s.mean, s.se, samples.size()});
}

}  // namespace

std::string BasisSpec::name() const {
  return family + "/" + order.name();
}

void ExperimentConfig::validate() const {
  const VectorField f = resolve_field(field);
  if (grid == 0) throw ConfigError("config: grid must be >= 1");
  if (paths == 0) throw ConfigError("config: paths must be >= 1");
  if (threads == 0) throw ConfigError("config: threads must be >= 1");
  if (schedule.empty()) throw ConfigError("config: schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0) throw ConfigError("config: schedule entries must be >= 1");
    if (i > 0 && schedule[i] <= schedule[i - 1]) {
      throw ConfigError("config: schedule must be strictly increasing");
    }
  }
  const TimeGrid g(grid);
  auto check_basis = [&](const BasisSpec& spec, const char* which) {
    if (spec.schedule_indexed()) {
      if (spec.order.kind() != EnumerationOrder::Kind::Balanced) {
        throw ConfigError(std::string("config: ") + which + ": plin has no enumeration presets");
      }
      for (std::size_t level : schedule) {
        if (!g.divisible_by(level)) {
          throw ConfigError(std::string("config: ") + which + ": plin level " +
                            std::to_string(level) + " does not divide grid " +
                            std::to_string(grid));
        }
      }
      return;
    }
    try {
      const BasisFamily family = make_family(spec.family, f.dim(), spec.order);
      if (family.size() && schedule.back() > *family.size()) {
        throw ConfigError(std::string("config: ") + which + ": schedule reaches " +
                          std::to_string(schedule.back()) + " but " + family.name() + " has " +
                          std::to_string(*family.size()) + " elements");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + which + ": " + e.what());
    }
  };
  check_basis(basis_a, "basis.a");
  if (basis_b) check_basis(*basis_b, "basis.b");
}

std::string ExperimentConfig::fingerprint() const {
  std::ostringstream s;
  s << "field=" << field << ";a=" << basis_a.name()
    << ";b=" << (basis_b ? basis_b->name() : std::string("none")) << ";schedule=";
  for (std::size_t i = 0; i < schedule.size(); ++i) s << (i ? "," : "") << schedule[i];
  s << ";grid=" << grid << ";paths=" << paths << ";seed=" << seed;
  return s.str();
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  try {
    if (key == "field") {
      config.field = value;
    } else if (key == "basis.a") {
      config.basis_a.family = value;
    } else if (key == "basis.b") {
      if (value == "none") {
        config.basis_b.reset();
      } else {
        if (!config.basis_b) config.basis_b = BasisSpec{};
        config.basis_b->family = value;
      }
    } else if (key == "order.a") {
      config.basis_a.order = EnumerationOrder::parse(value);
    } else if (key == "order.b") {
      if (!config.basis_b) config.basis_b = BasisSpec{config.basis_a.family};
      config.basis_b->order = EnumerationOrder::parse(value);
    } else if (key == "grid") {
      config.grid = parse_number<std::size_t>(value, key);
    } else if (key == "paths") {
      config.paths = parse_number<std::size_t>(value, key);
    } else if (key == "seed") {
      config.seed = parse_number<std::uint64_t>(value, key);
    } else if (key == "schedule") {
      config.schedule = parse_schedule(value);
    } else if (key == "out") {
      config.out = value;
    } else if (key == "threads") {
      config.threads = parse_number<std::size_t>(value, key);
    } else {
      throw ConfigError("config: unknown key '" + std::string(key) + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig config) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string text = trim(std::string_view(line).substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    apply_setting(config, trim(std::string_view(text).substr(0, eq)),
                  std::string_view(text).substr(eq + 1));
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, std::move(base));
}

const ReportRow* ConvergenceReport::find(std::string_view estimator, std::size_t n) const {
  for (const auto& row : rows) {
    if (row.estimator == estimator && row.n == n) return &row;
  }
  return nullptr;
}

ConvergenceReport run_convergence(const ExperimentConfig& config) {
  config.validate();
  const VectorField field = resolve_field(config.field);
  const TimeGrid grid(config.grid);
  const RngSpec rng{config.seed};
  const std::size_t m = config.paths;
  const std::size_t d = field.dim();

  const LedgerBuilder builder_a(config.basis_a, field, grid, config.schedule);
  std::optional<LedgerBuilder> builder_b;
  if (config.basis_b) builder_b.emplace(*config.basis_b, field, grid, config.schedule);

  struct PathResult {
    OgawaLedger a;
    OgawaLedger b;
    double half_div = 0.0;
  };
  std::vector<PathResult> results(m);
  for_each_path(m, config.threads, [&](std::size_t i) {
    const SamplePath path = sample_brownian(grid, d, rng, i);
    results[i].a = builder_a.build(path, i);
    if (builder_b) results[i].b = builder_b->build(path, i);
    results[i].half_div = half_divergence_integral(field, path);
  });

  ConvergenceReport report;
  const std::size_t points = config.schedule.size();
  std::vector<double> x(m);
  auto collect = [&](auto&& fn) {
    for (std::size_t i = 0; i < m; ++i) x[i] = fn(results[i]);
    return x;
  };
  for (std::size_t s = 0; s < points; ++s) {
    const std::size_t n = config.schedule[s];
    if (builder_b) {
      push(report, "h_a_minus_h_b", n, collect([s](const PathResult& p) {
             const double diff = p.a.rows[s].h - p.b.rows[s].h;
             return diff * diff;
           }));
    }
    for (const char* which : {"a", "b"}) {
      const bool is_a = which[0] == 'a';
      if (!is_a && !builder_b) continue;
      auto ledger = [is_a](const PathResult& p) -> const OgawaLedger& { return is_a ? p.a : p.b; };
      auto sq = [](double v) { return v * v; };
      const std::string suffix = std::string(".") + which;
      push(report, "g_minus_gprime" + suffix, n, collect([&](const PathResult& p) {
             return sq(ledger(p).rows[s].g - ledger(p).rows[s].gprime);
           }));
      push(report, "gprime_minus_strat" + suffix, n, collect([&](const PathResult& p) {
             return sq(ledger(p).rows[s].gprime - ledger(p).strat);
           }));
      push(report, "h_minus_ito" + suffix, n, collect([&](const PathResult& p) {
             return sq(ledger(p).rows[s].h - ledger(p).ito);
           }));
      push(report, "g_minus_strat" + suffix, n, collect([&](const PathResult& p) {
             return sq(ledger(p).rows[s].g - ledger(p).strat);
           }));
    }
  }
  push(report, "conversion_residual", 0, collect([](const PathResult& p) {
         return p.a.strat - p.a.ito - p.half_div;
       }));
  push(report, "conversion_abs_residual", 0, collect([](const PathResult& p) {
         return std::abs(p.a.strat - p.a.ito - p.half_div);
       }));
  return report;
}

OrderDependenceResult run_order_dependence(const ExperimentConfig& input) {
  ExperimentConfig config = input;
  if (!config.basis_b) {
    throw ConfigError("order: a second order (order.b) is required");
  }
  config.validate();
  const VectorField field = resolve_field(config.field);
  const TimeGrid grid(config.grid);
  const RngSpec rng{config.seed};
  const std::size_t m = config.paths;
  const std::size_t max_n = config.schedule.back();

  const LedgerBuilder builder_a(config.basis_a, field, grid, config.schedule);
  const LedgerBuilder builder_b(*config.basis_b, field, grid, config.schedule);

  struct PathResult {
    OgawaLedger a;
    OgawaLedger b;
    std::vector<double> diag_a;
    std::vector<double> diag_b;
  };
  std::vector<PathResult> results(m);
  const bool path_free = field.has_constant_jacobian();
  for_each_path(m, config.threads, [&](std::size_t i) {
    const SamplePath path = sample_brownian(grid, field.dim(), rng, i);
    results[i].a = builder_a.build(path, i);
    results[i].b = builder_b.build(path, i);
    if (!path_free || i == 0) {
      results[i].diag_a = builder_a.diagonal(path);
      results[i].diag_b = builder_b.diagonal(path);
    }
  });

  OrderDependenceResult out;
  std::vector<double> x(m);
  for (std::size_t s = 0; s < config.schedule.size(); ++s) {
    const std::size_t n = config.schedule[s];
    for (std::size_t i = 0; i < m; ++i) x[i] = results[i].a.rows[s].r;
    push(out.report, "r.a", n, x);
    for (std::size_t i = 0; i < m; ++i) x[i] = results[i].b.rows[s].r;
    push(out.report, "r.b", n, x);
    for (std::size_t i = 0; i < m; ++i) x[i] = results[i].a.rows[s].r - results[i].b.rows[s].r;
    push(out.report, "r_a_minus_r_b", n, x);
    for (std::size_t i = 0; i < m; ++i) {
      const double diff = results[i].a.rows[s].h - results[i].b.rows[s].h;
      x[i] = diff * diff;
    }
    push(out.report, "h_a_minus_h_b", n, x);
  }

  const std::size_t sources = path_free ? 1 : m;
  std::vector<double> sum_a(max_n, 0.0);
  std::vector<double> sum_b(max_n, 0.0);
  for (std::size_t i = 0; i < sources; ++i) {
    double ra = 0.0;
    double rb = 0.0;
    for (std::size_t k = 0; k < max_n; ++k) {
      ra += results[i].diag_a[k];
      rb += results[i].diag_b[k];
      sum_a[k] += ra;
      sum_b[k] += rb;
    }
  }
  for (std::size_t k = 0; k < max_n; ++k) {
    out.trajectory.push_back({k + 1, sum_a[k] / static_cast<double>(sources),
                              sum_b[k] / static_cast<double>(sources)});
  }
  return out;
}

void write_report(const ConvergenceReport& report, std::ostream& out) {
  out << "estimator,n,value,stderr,M\n" << std::setprecision(17);
  for (const auto& r : report.rows) {
    out << r.estimator << ',' << r.n << ',' << r.value << ',' << r.stderr_value << ','
        << r.samples << '\n';
  }
}

void emit_report(const ConvergenceReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_report: cannot open " + path.string() + " for writing");
  write_report(report, out);
  out.flush();
  if (!out) throw std::runtime_error("emit_report: write to " + path.string() + " failed");
}

ConvergenceReport parse_report(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "estimator,n,value,stderr,M") {
    throw std::runtime_error("parse_report: missing header");
  }
  ConvergenceReport report;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() != 5) throw std::runtime_error("parse_report: bad row '" + line + "'");
    ReportRow row;
    row.estimator = cells[0];
    row.n = std::stoull(cells[1]);
    row.value = std::stod(cells[2]);
    row.stderr_value = std::stod(cells[3]);
    row.samples = std::stoull(cells[4]);
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_trajectory(const std::vector<TrajectoryRow>& rows, std::ostream& out) {
  out << "n,r_a,r_b\n" << std::setprecision(17);
  for (const auto& r : rows) out << r.n << ',' << r.r_a << ',' << r.r_b << '\n';
}

std::vector<TraceRow> renormalization_trace(const VectorField& field, const SamplePath& path,
                                            const BasisFamily& basis, std::size_t count) {
  const SampledBasis sampled(basis, count, path.grid());
  const auto entries = diagonal_entries(field, path, sampled, count);
  std::vector<TraceRow> out;
  double r = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    r += entries[i];
    out.push_back({i + 1, sampled[i].element().label, entries[i], r});
  }
  return out;
}

std::vector<RamerCase> ramer_battery(std::size_t n) {
  std::vector<RamerCase> cases;
  auto zero = [n](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
  };
  auto zero_jac = [n](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n * n), 0.0);
  };
  cases.push_back({"zero", VectorField("zero", n, zero, zero_jac, true), true});
  cases.push_back({"identity",
                   VectorField(
                       "identity", n,
                       [](std::span<const double> x, std::span<double> out) {
                         std::copy(x.begin(), x.end(), out.begin());
                       },
                       [n](std::span<const double>, std::span<double> out) {
                         for (std::size_t i = 0; i < n * n; ++i) out[i] = i % (n + 1) == 0 ? 1.0 : 0.0;
                       },
                       true),
                   true});
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = 0.5 + static_cast<double>(i);
  cases.push_back({"constant", constant_field(c), n == 1});
  // f_i(x) = x_i + 0.5 sin(x_{i+1 mod n}); non-symmetric Jacobian for n >= 2.
  cases.push_back({"sinusoidal",
                   VectorField(
                       "sinusoidal", n,
                       [n](std::span<const double> x, std::span<double> out) {
                         for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + 0.5 * std::sin(x[(i + 1) % n]);
                       },
                       [n](std::span<const double> x, std::span<double> out) {
                         std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n * n), 0.0);
                         for (std::size_t i = 0; i < n; ++i) {
                           out[i * n + i] += 1.0;
                           out[i * n + (i + 1) % n] += 0.5 * std::cos(x[(i + 1) % n]);
                         }
                       }),
                   false});
  return cases;
}

std::vector<ExpectationSet> load_expectations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open expectations file " + path.string());
  const auto doc = nlohmann::json::parse(in);
  std::vector<ExpectationSet> sets;
  for (const auto& s : doc.at("experiments")) {
    ExpectationSet set;
    set.name = s.at("name").get<std::string>();
    set.fingerprint = s.at("fingerprint").get<std::string>();
    for (const auto& e : s.at("expect")) {
      set.entries.push_back({e.at("estimator").get<std::string>(), e.at("n").get<std::size_t>(),
                             e.at("value").get<double>(), e.at("band").get<double>()});
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

void save_expectations(const std::vector<ExpectationSet>& sets, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["generated_by"] = "ogawa_lab expectations";
  doc["experiments"] = nlohmann::json::array();
  for (const auto& set : sets) {
    nlohmann::json s;
    s["name"] = set.name;
    s["fingerprint"] = set.fingerprint;
    s["expect"] = nlohmann::json::array();
    for (const auto& e : set.entries) {
      s["expect"].push_back({{"estimator", e.estimator}, {"n", e.n}, {"value", e.value}, {"band", e.band}});
    }
    doc["experiments"].push_back(std::move(s));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write expectations file " + path.string());
  out << doc.dump(2) << '\n';
}

// Absolute slack so rows that vanish up to rounding survive compiler and BLAS changes.
constexpr double kBandFloor = 1e-12;

ExpectationSet expectations_from(const std::string& name, const ExperimentConfig& config,
                                 const ConvergenceReport& report) {
  ExpectationSet set{name, config.fingerprint(), {}};
  for (const auto& row : report.rows) {
    set.entries.push_back({row.estimator, row.n, row.value, 3.0 * row.stderr_value + kBandFloor});
  }
  return set;
}

std::vector<std::string> check_expectations(const ExpectationSet& set,
                                            const ConvergenceReport& report) {
  std::vector<std::string> failures;
  for (const auto& e : set.entries) {
    const ReportRow* row = report.find(e.estimator, e.n);
    if (!row) {
      failures.push_back(e.estimator + " n=" + std::to_string(e.n) + ": missing from report");
      continue;
    }
    if (std::abs(row->value - e.value) > e.band) {
      std::ostringstream msg;
      msg << std::setprecision(6) << e.estimator << " n=" << e.n << ": " << row->value
          << " outside " << e.value << " +/- " << e.band;
      failures.push_back(msg.str());
    }
  }
  return failures;
}

std::vector<std::pair<std::string, ExperimentConfig>> pilot_configs() {
  ExperimentConfig itostrat;  // defaults: unit linear field, psi-trig vs haar
  ExperimentConfig stratonovich;
  stratonovich.field = "id1d";
  stratonovich.basis_a = BasisSpec{"haar"};
  stratonovich.basis_b = BasisSpec{"plin"};
  return {{"ito-limit-unit-linear", itostrat}, {"stratonovich-limit-id1d", stratonovich}};
}

}  // namespace ogawa
