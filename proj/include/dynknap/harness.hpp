#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dynknap/advanced.hpp"
#include "dynknap/dynamics.hpp"
#include "dynknap/ea_core.hpp"
#include "dynknap/instance.hpp"
#include "dynknap/metrics.hpp"
#include "dynknap/moea.hpp"
#include "dynknap/oracle.hpp"
#include "dynknap/rng.hpp"
#include "dynknap/stats.hpp"

namespace dynknap {

inline constexpr std::size_t kMoPopulationSize = 20;  // N = archive size = 20

inline const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names = {
      "1+1EA", "MOEA", "MOEA_D", "NSGA2", "SPEA2", "NSGA2we", "SPEA2we"};
  return names;
}

inline std::unique_ptr<DynAlgorithm> make_algorithm(const std::string& name,
                                                    std::int64_t delta) {
  if (name == "1+1EA") return std::make_unique<OnePlusOneEa>();
  if (name == "MOEA") return std::make_unique<MoeaBaseline>(MoeaVariant::moea, delta);
  if (name == "MOEA_D") return std::make_unique<MoeaBaseline>(MoeaVariant::moea_d, delta);
  if (name == "NSGA2") return std::make_unique<Nsga2>(kMoPopulationSize, delta, false);
  if (name == "NSGA2we") return std::make_unique<Nsga2>(kMoPopulationSize, delta, true);
  if (name == "SPEA2")
    return std::make_unique<Spea2>(kMoPopulationSize, kMoPopulationSize, delta, false);
  if (name == "SPEA2we")
    return std::make_unique<Spea2>(kMoPopulationSize, kMoPopulationSize, delta, true);
  throw std::invalid_argument("make_algorithm: unknown algorithm '" + name + "'");
}

/// Fitness evaluations per generation, recorded for audit: the population
/// algorithms evaluate a full offspring population per generation.
inline std::uint64_t evaluations_per_generation(const std::string& name) {
  if (name == "NSGA2" || name == "NSGA2we" || name == "SPEA2" || name == "SPEA2we")
    return kMoPopulationSize;
  return 1;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  // Instance: either a file to load or a generator class + seed. The
  // initial capacity always comes from `capacity`.
  std::string instance_file;
  std::string instance_class = "uncorr";  // uncorr | unc-s-w | bou-s-c
  std::size_t n = 100;
  std::uint64_t instance_seed = 1;
  std::int64_t capacity = 0;
  bool unit_weights = false;

  // Change model. Change files are loaded from change_dir when set
  // (one `changes_<run>.txt` per run), otherwise generated from the
  // master seed.
  std::string change_kind = "uniform";  // uniform | normal
  std::int64_t magnitude = 2000;        // r for uniform, sigma for normal
  std::int64_t tau = 1000;
  std::string change_dir;

  // Protocol (full-scale defaults; see apply_desk_scale).
  std::vector<std::string> algorithms = {"1+1EA"};
  std::size_t runs = 30;
  std::int64_t warmup = 10000;
  std::int64_t horizon = 1000000;
  std::uint64_t master_seed = 42;
  std::string output_dir = "out";
  bool write_traces = false;
  double alpha = 0.05;
  std::size_t workers = 0;  // 0 = hardware concurrency

  void validate() const {
    if (instance_file.empty()) {
      if (instance_class != "uncorr" && instance_class != "unc-s-w" &&
          instance_class != "bou-s-c")
        throw std::invalid_argument("config: unknown instance class '" + instance_class + "'");
      if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    }
    if (capacity < 0) throw std::invalid_argument("config: capacity must be >= 0");
    if (change_kind != "uniform" && change_kind != "normal")
      throw std::invalid_argument("config: unknown change kind '" + change_kind + "'");
    if (magnitude < 1) throw std::invalid_argument("config: magnitude must be >= 1");
    if (tau < 1) throw std::invalid_argument("config: tau must be >= 1");
    if (algorithms.empty()) throw std::invalid_argument("config: no algorithms selected");
    for (const auto& a : algorithms) make_algorithm(a, 1);  // name check
    if (runs < 1) throw std::invalid_argument("config: runs must be >= 1");
    if (warmup < 0) throw std::invalid_argument("config: warmup must be >= 0");
    if (horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
    if (alpha <= 0.0 || alpha >= 1.0)
      throw std::invalid_argument("config: alpha must be in (0, 1)");
  }

  ChangeModel change_model() const {
    ChangeModel m;
    m.kind = change_kind == "uniform" ? ChangeModel::Kind::uniform : ChangeModel::Kind::normal;
    m.magnitude = magnitude;
    m.tau = tau;
    return m;
  }
};

/// Shrinks the protocol to laptop scale: same warmup, a tenth of the
/// horizon and a third of the runs.
inline void apply_desk_scale(ExperimentConfig& cfg) {
  cfg.horizon = 100000;
  cfg.runs = 10;
  cfg.warmup = 10000;
}

namespace detail {

inline bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config: key '" + key + "': expected a boolean, got '" +
                              value + "'");
}

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
  std::istringstream in(value);
  T out{};
  char extra = 0;
  if (!(in >> out) || (in >> extra))
    throw std::invalid_argument("config: key '" + key + "': bad value '" + value + "'");
  return out;
}

inline std::vector<std::string> split_csv(const std::string& value) {
  std::vector<std::string> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    // trim surrounding whitespace
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace detail

/// Applies one `key = value` assignment; shared by the config parser and
/// the CLI flag overrides.
inline void set_config_key(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value) {
  if (key == "instance_file") cfg.instance_file = value;
  else if (key == "instance_class") cfg.instance_class = value;
  else if (key == "n") cfg.n = detail::parse_number<std::size_t>(value, key);
  else if (key == "instance_seed")
    cfg.instance_seed = detail::parse_number<std::uint64_t>(value, key);
  else if (key == "capacity") cfg.capacity = detail::parse_number<std::int64_t>(value, key);
  else if (key == "unit_weights") cfg.unit_weights = detail::parse_bool(value, key);
  else if (key == "change_kind") cfg.change_kind = value;
  else if (key == "magnitude") cfg.magnitude = detail::parse_number<std::int64_t>(value, key);
  else if (key == "tau") cfg.tau = detail::parse_number<std::int64_t>(value, key);
  else if (key == "change_dir") cfg.change_dir = value;
  else if (key == "algorithms") cfg.algorithms = detail::split_csv(value);
  else if (key == "runs") cfg.runs = detail::parse_number<std::size_t>(value, key);
  else if (key == "warmup") cfg.warmup = detail::parse_number<std::int64_t>(value, key);
  else if (key == "horizon") cfg.horizon = detail::parse_number<std::int64_t>(value, key);
  else if (key == "master_seed")
    cfg.master_seed = detail::parse_number<std::uint64_t>(value, key);
  else if (key == "output_dir") cfg.output_dir = value;
  else if (key == "write_traces") cfg.write_traces = detail::parse_bool(value, key);
  else if (key == "alpha") cfg.alpha = detail::parse_number<double>(value, key);
  else if (key == "workers") cfg.workers = detail::parse_number<std::size_t>(value, key);
  else if (key == "preset") {
    if (value == "desk") apply_desk_scale(cfg);
    else if (value == "full") { /* defaults */ }
    else throw std::invalid_argument("config: unknown preset '" + value + "'");
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

/// Plain-text config: one `key = value` per line, `#` comments, blank
/// lines ignored.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("load_config: " + path + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    auto trim = [](std::string s) {
      const auto x = s.find_first_not_of(" \t\r");
      if (x == std::string::npos) return std::string();
      const auto y = s.find_last_not_of(" \t\r");
      return s.substr(x, y - x + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_config_key(cfg, key, value);
    } catch (const std::exception& e) {
      throw std::runtime_error("load_config: " + path + ":" + std::to_string(lineno) +
                               ": " + e.what());
    }
  }
  return cfg;
}

inline Instance build_instance(const ExperimentConfig& cfg) {
  Instance inst;
  if (!cfg.instance_file.empty()) {
    inst = load_instance(cfg.instance_file);
  } else if (cfg.instance_class == "uncorr") {
    inst = gen_uncorrelated(cfg.n, cfg.instance_seed);
  } else if (cfg.instance_class == "unc-s-w") {
    inst = gen_uncorr_similar_weights(cfg.n, cfg.instance_seed);
  } else {
    inst = gen_bounded_strongly_correlated(cfg.n, cfg.instance_seed);
  }
  inst.capacity = cfg.capacity;
  if (cfg.unit_weights) inst = to_unit_weights(inst);
  inst.validate();
  return inst;
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

struct RunResult {
  std::string algorithm;
  std::size_t run_index = 0;
  std::string change_file;  // path or "seed:<value>" when generated
  double total_error = 0.0;
  double partial_error = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t evaluations = 0;
  std::string trace_path;
};

/// One experiment: a fixed instance, one change file per run shared by all
/// algorithms, and a per-cell deterministic seed stream.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    instance_ = build_instance(cfg_);
    const std::size_t changes_needed = needed_changes();
    for (std::size_t run = 0; run < cfg_.runs; ++run) {
      if (!cfg_.change_dir.empty()) {
        const auto path = std::filesystem::path(cfg_.change_dir) /
                          ("changes_" + std::to_string(run) + ".txt");
        if (!std::filesystem::exists(path))
          throw std::runtime_error("experiment: missing change file " + path.string());
        auto seq = load_changes(path.string());
        if (seq.deltas.size() < changes_needed)
          throw std::runtime_error("experiment: change file " + path.string() +
                                   " has too few deltas");
        changes_.push_back(std::move(seq));
        change_ids_.push_back(path.string());
      } else {
        const std::uint64_t seed = derive_seed(cfg_.master_seed, "changes", run);
        changes_.push_back(cfg_.change_kind == "uniform"
                               ? gen_uniform_changes(cfg_.magnitude, changes_needed, seed)
                               : gen_normal_changes(cfg_.magnitude, changes_needed, seed));
        change_ids_.push_back("seed:" + std::to_string(seed));
      }
    }
    // One oracle per run: shared read-only by every algorithm cell on the
    // same change file.
    oracles_.reserve(cfg_.runs);
    for (std::size_t run = 0; run < cfg_.runs; ++run) {
      const auto series =
          trajectory(instance_.capacity, changes_[run], cfg_.tau, cfg_.horizon);
      oracles_.push_back(std::make_unique<OracleTable>(instance_, *std::max_element(series.begin(), series.end())));
    }
  }

  const ExperimentConfig& config() const { return cfg_; }
  const Instance& instance() const { return instance_; }
  const ChangeSequence& changes(std::size_t run) const { return changes_.at(run); }
  const OracleTable& oracle(std::size_t run) const { return *oracles_.at(run); }

  std::uint64_t cell_seed(const std::string& algorithm, std::size_t run) const {
    return derive_seed(cfg_.master_seed, algorithm, run);
  }

  /// Warmup at fixed C0, then the dynamic phase: one step per generation,
  /// a record per generation, a capacity change every tau generations.
  RunResult run_single(const std::string& algorithm, std::size_t run,
                       RunTrace* trace_out = nullptr) const {
    if (run >= cfg_.runs) throw std::invalid_argument("run_single: run index out of range");
    const auto start = std::chrono::steady_clock::now();
    const std::int64_t delta = delta_for(cfg_.change_model());
    auto algo = make_algorithm(algorithm, delta);
    Rng rng(cell_seed(algorithm, run));
    algo->init(instance_, instance_.capacity, rng);
    for (std::int64_t g = 0; g < cfg_.warmup; ++g)
      algo->step(instance_.capacity, rng);

    const ChangeSequence& seq = changes_[run];
    RunTrace trace;
    trace.records.reserve(static_cast<std::size_t>(cfg_.horizon));
    std::int64_t capacity = instance_.capacity;
    std::size_t next_delta = 0;
    for (std::int64_t g = 1; g <= cfg_.horizon; ++g) {
      algo->step(capacity, rng);
      const GenerationReport rep = algo->report(capacity);
      trace.records.push_back({capacity, rep.feasible, rep.profit, rep.min_violation});
      if (g % cfg_.tau == 0) {
        if (next_delta >= seq.deltas.size())
          throw std::runtime_error("run_single: change sequence exhausted");
        capacity = apply_change(capacity, seq.deltas[next_delta++]);
        algo->on_change(capacity, rng);
      }
    }

    RunResult result;
    result.algorithm = algorithm;
    result.run_index = run;
    result.change_file = change_ids_[run];
    result.total_error = total_offline_error(trace, *oracles_[run]);
    result.partial_error = cfg_.horizon >= cfg_.tau
                               ? partial_offline_error(trace, *oracles_[run], cfg_.tau)
                               : result.total_error;
    result.evaluations = static_cast<std::uint64_t>(cfg_.warmup + cfg_.horizon) *
                         evaluations_per_generation(algorithm);
    if (cfg_.write_traces) {
      const auto dir = std::filesystem::path(cfg_.output_dir) / "traces";
      std::filesystem::create_directories(dir);
      const auto path = dir / (algorithm + "_run" + std::to_string(run) + ".csv");
      save_trace_csv(trace, path.string());
      result.trace_path = path.string();
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (trace_out) *trace_out = std::move(trace);
    return result;
  }

  std::size_t needed_changes() const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(cfg_.horizon / cfg_.tau));
  }

 private:
  ExperimentConfig cfg_;
  Instance instance_;
  std::vector<ChangeSequence> changes_;
  std::vector<std::string> change_ids_;
  std::vector<std::unique_ptr<OracleTable>> oracles_;
};

struct ExperimentOutcome {
  std::vector<RunResult> results;              // sorted (algorithm order, run)
  std::vector<std::string> failures;           // per-cell error messages
  ComparisonReport total_report;
  ComparisonReport partial_report;
};

namespace detail {

inline ComparisonReport report_for_metric(const ExperimentConfig& cfg,
                                          const std::vector<RunResult>& results,
                                          bool partial) {
  std::vector<std::vector<double>> groups(cfg.algorithms.size());
  for (const auto& r : results) {
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
      if (r.algorithm == cfg.algorithms[a])
        groups[a].push_back(partial ? r.partial_error : r.total_error);
    }
  }
  std::vector<std::string> names;
  std::vector<std::vector<double>> nonempty;
  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    if (!groups[a].empty()) {
      names.push_back(cfg.algorithms[a]);
      nonempty.push_back(std::move(groups[a]));
    }
  }
  // A single run per algorithm cannot feed the rank tests; report means
  // only (no marks).
  bool testable = nonempty.size() >= 2;
  for (const auto& g : nonempty)
    if (g.size() < 2) testable = false;
  if (testable) return make_comparison_report(names, nonempty, cfg.alpha);
  ComparisonReport rep;
  rep.algorithms = names;
  for (const auto& g : nonempty) {
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    double var = 0.0;
    for (double v : g) var += (v - mean) * (v - mean);
    rep.means.push_back(mean);
    rep.stddevs.push_back(g.size() > 1 ? std::sqrt(var / (g.size() - 1.0)) : 0.0);
  }
  rep.marks.assign(names.size(), std::vector<Mark>(names.size(), Mark::none));
  return rep;
}

}  // namespace detail

inline std::vector<std::string> experiment_setting_headers() {
  return {"class", "n", "change", "magnitude", "tau"};
}

inline std::vector<std::string> experiment_setting_row(const ExperimentConfig& cfg,
                                                       const Instance& inst) {
  std::string cls = cfg.instance_file.empty() ? cfg.instance_class : cfg.instance_file;
  if (cfg.unit_weights) cls += " (unit)";
  return {cls, std::to_string(inst.n()), cfg.change_kind,
          std::to_string(cfg.magnitude), std::to_string(cfg.tau)};
}

inline void save_results_csv(const std::vector<RunResult>& results,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_results_csv: cannot open " + path);
  out << "algorithm,run,change_file,total_error,partial_error,wall_seconds,"
         "evaluations,trace\n";
  for (const auto& r : results) {
    out << r.algorithm << ',' << r.run_index << ',' << r.change_file << ','
        << format_double(r.total_error) << ',' << format_double(r.partial_error) << ','
        << format_double(r.wall_seconds) << ',' << r.evaluations << ',' << r.trace_path
        << '\n';
  }
  if (!out) throw std::runtime_error("save_results_csv: write failed for " + path);
}

inline std::vector<RunResult> load_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_results_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_results_csv: " + path + ": empty file");
  std::vector<RunResult> results;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() < 7)
      throw std::runtime_error("load_results_csv: " + path + ":" +
                               std::to_string(lineno) + ": expected 8 fields");
    RunResult r;
    r.algorithm = fields[0];
    r.run_index = detail::parse_number<std::size_t>(fields[1], "run");
    r.change_file = fields[2];
    r.total_error = detail::parse_number<double>(fields[3], "total_error");
    r.partial_error = detail::parse_number<double>(fields[4], "partial_error");
    r.wall_seconds = detail::parse_number<double>(fields[5], "wall_seconds");
    r.evaluations = detail::parse_number<std::uint64_t>(fields[6], "evaluations");
    if (fields.size() > 7) r.trace_path = fields[7];
    results.push_back(std::move(r));
  }
  return results;
}

/// All (algorithm x run) cells, farmed over a worker pool. Failures are
/// collected per cell; surviving cells still contribute to the reports.
inline ExperimentOutcome run_experiment(const Experiment& exp) {
  const ExperimentConfig& cfg = exp.config();
  struct Cell {
    std::size_t alg;
    std::size_t run;
  };
  std::vector<Cell> cells;
  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a)
    for (std::size_t run = 0; run < cfg.runs; ++run) cells.push_back({a, run});

  std::vector<RunResult> slots(cells.size());
  std::vector<std::string> errors(cells.size());
  std::vector<bool> ok(cells.size(), false);
  std::atomic<std::size_t> next{0};
  const std::size_t workers =
      std::max<std::size_t>(1, cfg.workers ? cfg.workers
                                           : std::thread::hardware_concurrency());
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        slots[i] = exp.run_single(cfg.algorithms[cells[i].alg], cells[i].run);
        ok[i] = true;
      } catch (const std::exception& e) {
        errors[i] = cfg.algorithms[cells[i].alg] + "/run" +
                    std::to_string(cells[i].run) + ": " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w + 1 < workers && w + 1 < cells.size(); ++w)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ExperimentOutcome outcome;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (ok[i]) outcome.results.push_back(std::move(slots[i]));
    else outcome.failures.push_back(errors[i]);
  }
  outcome.total_report = detail::report_for_metric(cfg, outcome.results, false);
  outcome.partial_report = detail::report_for_metric(cfg, outcome.results, true);

  std::filesystem::create_directories(cfg.output_dir);
  const auto dir = std::filesystem::path(cfg.output_dir);
  save_results_csv(outcome.results, (dir / "results.csv").string());
  const auto headers = experiment_setting_headers();
  const auto setting = experiment_setting_row(cfg, exp.instance());
  for (const auto& [report, stem] :
       {std::pair{&outcome.total_report, "table"},
        std::pair{&outcome.partial_report, "table_partial"}}) {
    if (report->algorithms.empty()) continue;
    std::vector<ComparisonTableRow> rows{{setting, *report}};
    std::ofstream txt(dir / (std::string(stem) + ".txt"));
    txt << render_table(headers, rows);
    std::ofstream csv(dir / (std::string(stem) + ".csv"));
    csv << render_table_csv(headers, rows);
  }
  return outcome;
}

/// `generation,capacity` series for external plotting of one run's
/// capacity trajectory.
inline void emit_trajectory_plotdata(const Experiment& exp, std::size_t run,
                                     std::ostream& out) {
  const auto series = trajectory(exp.instance().capacity, exp.changes(run),
                                 exp.config().tau, exp.config().horizon);
  out << "generation,capacity\n";
  for (std::size_t g = 0; g < series.size(); ++g)
    out << (g + 1) << ',' << series[g] << '\n';
}

}  // namespace dynknap
