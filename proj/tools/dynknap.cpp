// Command-line front end: instance/change generation, experiment runs,
// statistical comparison, and plot-data export.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dynknap/harness.hpp"

namespace {

int cmd_gen(const std::string& cls, std::size_t n, std::uint64_t seed,
            std::int64_t capacity, bool unit_weights, const std::string& out_path) {
  dynknap::ExperimentConfig cfg;
  cfg.instance_class = cls;
  cfg.n = n;
  cfg.instance_seed = seed;
  cfg.capacity = capacity;
  cfg.unit_weights = unit_weights;
  const dynknap::Instance inst = dynknap::build_instance(cfg);
  dynknap::save_instance(inst, out_path);
  std::cout << "wrote " << out_path << " (n=" << inst.n() << ", C=" << inst.capacity
            << ")\n";
  return 0;
}

int cmd_changes_gen(const std::string& kind, std::int64_t magnitude, std::size_t count,
                    std::uint64_t seed, const std::string& out_path) {
  const dynknap::ChangeSequence seq =
      kind == "uniform" ? dynknap::gen_uniform_changes(magnitude, count, seed)
                        : dynknap::gen_normal_changes(magnitude, count, seed);
  dynknap::save_changes(seq, out_path);
  std::cout << "wrote " << out_path << " (" << seq.deltas.size() << " deltas)\n";
  return 0;
}

int cmd_run(const std::string& config_path, bool desk_scale,
            const std::vector<std::string>& overrides) {
  dynknap::ExperimentConfig cfg = dynknap::load_config(config_path);
  if (desk_scale) dynknap::apply_desk_scale(cfg);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    dynknap::set_config_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  dynknap::Experiment exp(std::move(cfg));
  const dynknap::ExperimentOutcome outcome = dynknap::run_experiment(exp);
  const auto headers = dynknap::experiment_setting_headers();
  const auto setting = dynknap::experiment_setting_row(exp.config(), exp.instance());
  if (!outcome.total_report.algorithms.empty()) {
    std::cout << "total offline error\n"
              << dynknap::render_table(headers, {{setting, outcome.total_report}})
              << "partial offline error\n"
              << dynknap::render_table(headers, {{setting, outcome.partial_report}});
  }
  std::cout << outcome.results.size() << " cells completed, " << outcome.failures.size()
            << " failed; outputs in " << exp.config().output_dir << "\n";
  for (const auto& f : outcome.failures) std::cerr << "cell failed: " << f << "\n";
  return outcome.failures.empty() ? 0 : 1;
}

int cmd_compare(const std::string& runs_dir, double alpha, bool partial) {
  const auto path = std::filesystem::path(runs_dir) / "results.csv";
  const auto results = dynknap::load_results_csv(path.string());
  if (results.empty()) {
    std::cerr << "no results in " << path << "\n";
    return 1;
  }
  std::vector<std::string> algorithms;
  for (const auto& r : results)
    if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end())
      algorithms.push_back(r.algorithm);
  std::vector<std::vector<double>> groups(algorithms.size());
  for (const auto& r : results) {
    const auto it = std::find(algorithms.begin(), algorithms.end(), r.algorithm);
    groups[static_cast<std::size_t>(it - algorithms.begin())].push_back(
        partial ? r.partial_error : r.total_error);
  }
  const auto report = dynknap::make_comparison_report(algorithms, groups, alpha);
  std::vector<std::string> headers = {"metric"};
  std::vector<std::string> setting = {partial ? "partial" : "total"};
  std::cout << dynknap::render_table(headers, {{setting, report}});
  if (report.algorithms.size() >= 2)
    std::cout << "H=" << dynknap::format_double(report.h)
              << " p=" << dynknap::format_double(report.p) << "\n";
  return 0;
}

int cmd_plotdata(const std::string& config_path, bool desk_scale, std::size_t run,
                 const std::string& out_path) {
  dynknap::ExperimentConfig cfg = dynknap::load_config(config_path);
  if (desk_scale) dynknap::apply_desk_scale(cfg);
  dynknap::Experiment exp(std::move(cfg));
  if (out_path.empty()) {
    dynknap::emit_trajectory_plotdata(exp, run, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    dynknap::emit_trajectory_plotdata(exp, run, out);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic-knapsack benchmarking toolkit"};
  app.require_subcommand(1);

  // gen
  std::string gen_class = "uncorr";
  std::size_t gen_n = 100;
  std::uint64_t gen_seed = 1;
  std::int64_t gen_capacity = 0;
  bool gen_unit = false;
  std::string gen_out = "instance.txt";
  auto* gen = app.add_subcommand("gen", "Generate a knapsack instance file");
  gen->add_option("--class", gen_class, "Instance class")
      ->check(CLI::IsMember({"uncorr", "unc-s-w", "bou-s-c"}));
  gen->add_option("--n", gen_n, "Item count")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--capacity", gen_capacity, "Initial capacity")
      ->check(CLI::NonNegativeNumber);
  gen->add_flag("--unit-weights", gen_unit, "Apply the unit-weight transform");
  gen->add_option("--out", gen_out, "Output path");

  // changes gen
  std::string ch_kind = "uniform";
  std::int64_t ch_magnitude = 2000;
  std::size_t ch_count = 1000;
  std::uint64_t ch_seed = 1;
  std::string ch_out = "changes.txt";
  auto* changes = app.add_subcommand("changes", "Capacity-change sequences");
  changes->require_subcommand(1);
  auto* changes_gen = changes->add_subcommand("gen", "Generate a change file");
  changes_gen->add_option("--kind", ch_kind, "Delta distribution")
      ->check(CLI::IsMember({"uniform", "normal"}));
  changes_gen->add_option("--magnitude", ch_magnitude, "r (uniform) or sigma (normal)")
      ->check(CLI::PositiveNumber);
  changes_gen->add_option("--count", ch_count, "Number of deltas")
      ->check(CLI::PositiveNumber);
  changes_gen->add_option("--seed", ch_seed, "Generator seed");
  changes_gen->add_option("--out", ch_out, "Output path");

  // run
  std::string run_config;
  bool run_desk = false;
  std::vector<std::string> run_overrides;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("--config", run_config, "Config file")->required()
      ->check(CLI::ExistingFile);
  run->add_flag("--desk-scale", run_desk, "Desk-scale preset (horizon 1e5, 10 runs)");
  run->add_option("--set", run_overrides, "Override a config key (key=value)");

  // compare
  std::string cmp_dir;
  double cmp_alpha = 0.05;
  bool cmp_partial = false;
  auto* compare = app.add_subcommand("compare", "Compare algorithms from results.csv");
  compare->add_option("--runs", cmp_dir, "Directory containing results.csv")->required();
  compare->add_option("--alpha", cmp_alpha, "Significance level");
  compare->add_flag("--partial", cmp_partial, "Compare partial instead of total error");

  // plotdata
  std::string plot_config;
  bool plot_desk = false;
  std::size_t plot_run = 0;
  std::string plot_out;
  auto* plotdata = app.add_subcommand("plotdata", "Emit a capacity trajectory CSV");
  plotdata->add_option("--config", plot_config, "Config file")->required()
      ->check(CLI::ExistingFile);
  plotdata->add_flag("--desk-scale", plot_desk, "Desk-scale preset");
  plotdata->add_option("--run", plot_run, "Run index (selects the change file)");
  plotdata->add_option("--out", plot_out, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen(gen_class, gen_n, gen_seed, gen_capacity, gen_unit, gen_out);
    if (changes->parsed())
      return cmd_changes_gen(ch_kind, ch_magnitude, ch_count, ch_seed, ch_out);
    if (run->parsed()) return cmd_run(run_config, run_desk, run_overrides);
    if (compare->parsed()) return cmd_compare(cmp_dir, cmp_alpha, cmp_partial);
    if (plotdata->parsed()) return cmd_plotdata(plot_config, plot_desk, plot_run, plot_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
