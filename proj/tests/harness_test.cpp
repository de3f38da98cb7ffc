#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dynknap/harness.hpp"

using namespace dynknap;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.instance_class = "uncorr";
  cfg.n = 25;
  cfg.instance_seed = 3;
  cfg.capacity = 4000;
  cfg.change_kind = "uniform";
  cfg.magnitude = 400;
  cfg.tau = 25;
  cfg.algorithms = {"1+1EA", "MOEA_D"};
  cfg.runs = 2;
  cfg.warmup = 100;
  cfg.horizon = 500;
  cfg.master_seed = 7;
  cfg.output_dir = "/tmp/dynknap_test_out";
  return cfg;
}

}  // namespace

TEST_CASE("config files parse, override, and validate") {
  const std::string path = "/tmp/dynknap_test.cfg";
  {
    std::ofstream out(path);
    out << "# demo config\n"
        << "instance_class = bou-s-c\n"
        << "n = 50\n"
        << "capacity = 1234\n"
        << "change_kind = normal\n"
        << "magnitude = 100   # sigma\n"
        << "tau = 500\n"
        << "algorithms = 1+1EA, SPEA2we\n"
        << "runs = 4\n"
        << "master_seed = 99\n";
  }
  ExperimentConfig cfg = load_config(path);
  CHECK(cfg.instance_class == "bou-s-c");
  CHECK(cfg.n == 50);
  CHECK(cfg.capacity == 1234);
  CHECK(cfg.magnitude == 100);
  CHECK(cfg.algorithms == std::vector<std::string>{"1+1EA", "SPEA2we"});
  CHECK(cfg.runs == 4);
  CHECK_NOTHROW(cfg.validate());

  set_config_key(cfg, "tau", "750");
  CHECK(cfg.tau == 750);
  CHECK_THROWS(set_config_key(cfg, "nonsense", "1"));
  CHECK_THROWS(set_config_key(cfg, "runs", "abc"));

  cfg.algorithms = {"NOPE"};
  CHECK_THROWS(cfg.validate());
  std::filesystem::remove(path);
}

TEST_CASE("desk-scale preset rescales the protocol") {
  ExperimentConfig cfg;
  CHECK(cfg.horizon == 1000000);
  CHECK(cfg.runs == 30);
  apply_desk_scale(cfg);
  CHECK(cfg.horizon == 100000);
  CHECK(cfg.runs == 10);
  CHECK(cfg.warmup == 10000);

  ExperimentConfig via_key;
  set_config_key(via_key, "preset", "desk");
  CHECK(via_key.horizon == 100000);
}

TEST_CASE("the algorithm factory knows exactly the documented names") {
  for (const auto& name : known_algorithms()) CHECK(make_algorithm(name, 10) != nullptr);
  CHECK_THROWS(make_algorithm("REPAIR", 10));
  CHECK(evaluations_per_generation("1+1EA") == 1);
  CHECK(evaluations_per_generation("SPEA2we") == kMoPopulationSize);
}

TEST_CASE("identical cells are bit-identical, distinct cells differ") {
  const Experiment exp(tiny_config());
  const RunResult a = exp.run_single("1+1EA", 0);
  const RunResult b = exp.run_single("1+1EA", 0);
  CHECK(a.total_error == b.total_error);
  CHECK(a.partial_error == b.partial_error);
  CHECK(exp.cell_seed("1+1EA", 0) != exp.cell_seed("1+1EA", 1));
  CHECK(exp.cell_seed("1+1EA", 0) != exp.cell_seed("MOEA_D", 0));
}

TEST_CASE("tau beyond the horizon means pure static optimization") {
  ExperimentConfig cfg = tiny_config();
  cfg.tau = 5000;  // > horizon: zero changes applied
  cfg.algorithms = {"1+1EA"};
  const Experiment exp(cfg);
  RunTrace trace;
  const RunResult res = exp.run_single("1+1EA", 0, &trace);
  REQUIRE(trace.records.size() == 500);
  for (const auto& rec : trace.records) CHECK(rec.capacity == 4000);
  CHECK(res.total_error >= 0.0);
  CHECK(res.partial_error == res.total_error);  // fallback when horizon < tau
}

TEST_CASE("a long static (1+1) run converges on a small instance") {
  ExperimentConfig cfg;
  cfg.instance_class = "uncorr";
  cfg.n = 20;
  cfg.instance_seed = 12;
  cfg.capacity = 3000;
  cfg.magnitude = 1;
  cfg.tau = 60000;  // single window
  cfg.algorithms = {"1+1EA"};
  cfg.runs = 1;
  cfg.warmup = 0;
  cfg.horizon = 60000;
  cfg.master_seed = 5;
  const Experiment exp(cfg);
  RunTrace trace;
  exp.run_single("1+1EA", 0, &trace);
  const std::int64_t optimum = exp.oracle(0).optimal_profit(3000);
  // Elitism at fixed capacity: the final generations sit at the optimum.
  const auto& last = trace.records.back();
  CHECK(last.feasible);
  CHECK(last.profit == optimum);
}

TEST_CASE("every algorithm sees the same capacity trajectory per run") {
  const ExperimentConfig cfg = tiny_config();
  const Experiment exp(cfg);
  RunTrace ea, moead;
  exp.run_single("1+1EA", 1, &ea);
  exp.run_single("MOEA_D", 1, &moead);
  REQUIRE(ea.records.size() == moead.records.size());
  for (std::size_t g = 0; g < ea.records.size(); ++g)
    CHECK(ea.records[g].capacity == moead.records[g].capacity);
  // And the recorded capacities equal the published trajectory.
  const auto series = trajectory(cfg.capacity, exp.changes(1), cfg.tau, cfg.horizon);
  for (std::size_t g = 0; g < series.size(); ++g)
    CHECK(ea.records[g].capacity == series[g]);
}

TEST_CASE("run_experiment writes results and tables; serial equals parallel") {
  ExperimentConfig cfg = tiny_config();
  cfg.workers = 1;
  const Experiment serial(cfg);
  const ExperimentOutcome a = run_experiment(serial);
  CHECK(a.failures.empty());
  CHECK(a.results.size() == 4);  // 2 algorithms x 2 runs

  cfg.workers = 4;
  cfg.output_dir = "/tmp/dynknap_test_out2";
  const Experiment parallel(cfg);
  const ExperimentOutcome b = run_experiment(parallel);
  REQUIRE(b.results.size() == a.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    CHECK(a.results[i].algorithm == b.results[i].algorithm);
    CHECK(a.results[i].total_error == b.results[i].total_error);
    CHECK(a.results[i].partial_error == b.results[i].partial_error);
  }

  // results.csv round-trips.
  const auto loaded = load_results_csv("/tmp/dynknap_test_out/results.csv");
  REQUIRE(loaded.size() == a.results.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].algorithm == a.results[i].algorithm);
    CHECK(loaded[i].total_error == a.results[i].total_error);
  }
  CHECK(std::filesystem::exists("/tmp/dynknap_test_out/table.txt"));
  CHECK(std::filesystem::exists("/tmp/dynknap_test_out/table.csv"));
  CHECK(std::filesystem::exists("/tmp/dynknap_test_out/table_partial.csv"));

  // Summary recomputation from per-run data matches the stored report.
  for (std::size_t alg = 0; alg < cfg.algorithms.size(); ++alg) {
    double mean = 0.0;
    std::size_t count = 0;
    for (const auto& r : a.results) {
      if (r.algorithm == cfg.algorithms[alg]) {
        mean += r.total_error;
        ++count;
      }
    }
    mean /= static_cast<double>(count);
    CHECK(a.total_report.means[alg] == doctest::Approx(mean));
  }
  std::filesystem::remove_all("/tmp/dynknap_test_out");
  std::filesystem::remove_all("/tmp/dynknap_test_out2");
}

TEST_CASE("single algorithm with two runs yields a markless report") {
  ExperimentConfig cfg = tiny_config();
  cfg.algorithms = {"1+1EA"};
  cfg.output_dir = "/tmp/dynknap_test_out3";
  const ExperimentOutcome out = run_experiment(Experiment(cfg));
  CHECK(out.results.size() == 2);
  REQUIRE(out.total_report.algorithms.size() == 1);
  CHECK(format_marks(out.total_report, 0).empty());
  std::filesystem::remove_all("/tmp/dynknap_test_out3");
}

TEST_CASE("change files from disk are honored and validated") {
  ExperimentConfig cfg = tiny_config();
  cfg.change_dir = "/tmp/dynknap_test_changes_dir";
  std::filesystem::create_directories(cfg.change_dir);
  // Only one of the two required files exists.
  save_changes(gen_uniform_changes(400, 20, 1), cfg.change_dir + "/changes_0.txt");
  CHECK_THROWS(Experiment(cfg));
  save_changes(gen_uniform_changes(400, 20, 2), cfg.change_dir + "/changes_1.txt");
  const Experiment exp(cfg);
  CHECK(exp.changes(0).deltas.size() == 20);
  // A too-short file is rejected up front.
  ExperimentConfig shorter = cfg;
  shorter.horizon = 5000;  // needs 200 deltas
  CHECK_THROWS(Experiment(shorter));
  std::filesystem::remove_all(cfg.change_dir);
}

TEST_CASE("trajectory plot data has one row per generation") {
  ExperimentConfig cfg = tiny_config();
  const Experiment exp(cfg);
  std::ostringstream out;
  emit_trajectory_plotdata(exp, 0, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "generation,capacity");
  std::size_t rows = 0;
  std::int64_t last_cap = -1;
  while (std::getline(in, line)) {
    ++rows;
    const auto comma = line.find(',');
    last_cap = std::stoll(line.substr(comma + 1));
    CHECK(last_cap >= 0);
  }
  CHECK(rows == static_cast<std::size_t>(cfg.horizon));
}

TEST_CASE("traces can be written to disk on request") {
  ExperimentConfig cfg = tiny_config();
  cfg.algorithms = {"1+1EA"};
  cfg.runs = 1;
  cfg.write_traces = true;
  cfg.output_dir = "/tmp/dynknap_test_out4";
  const Experiment exp(cfg);
  const RunResult res = exp.run_single("1+1EA", 0);
  REQUIRE(!res.trace_path.empty());
  CHECK(std::filesystem::exists(res.trace_path));
  std::filesystem::remove_all(cfg.output_dir);
}
