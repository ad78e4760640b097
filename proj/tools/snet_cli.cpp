// snet: experiment runner.
//
//   snet run --config <path> [--task T] [--mode M] [--seed S] [--out DIR] [--set key=value]...
//   snet compare <dir>... [--threshold name=value] [--merged-csv path]

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "snet/compare.hpp"
#include "snet/config.hpp"
#include "snet/experiment.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& task, const std::string& mode,
            const std::string& seed, const std::string& out,
            const std::vector<std::string>& sets) {
  snet::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = snet::parse_config(config_path);
  if (!task.empty()) snet::set_config_value(cfg, "task", task);
  if (!mode.empty()) snet::set_config_value(cfg, "mode", mode);
  if (!seed.empty()) snet::set_config_value(cfg, "seed", seed);
  if (!out.empty()) snet::set_config_value(cfg, "output_dir", out);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw snet::ConfigError("--set expects key=value, got '" + kv + "'", 0);
    snet::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  snet::run_experiment(cfg, std::cerr);
  std::cout << cfg.output_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ScreenerNet curriculum-learning experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one experiment");
  std::string config_path, task, mode, seed, out;
  std::vector<std::string> sets;
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--task", task, "cartpole | mnist | synthetic");
  run->add_option("--mode", mode, "Baseline | SN | PER | PER_SN | SN_Sampling");
  run->add_option("--seed", seed, "Global seed");
  run->add_option("--out", out, "Output directory");
  run->add_option("--set", sets, "Override any config key (key=value)");

  auto* cmp = app.add_subcommand("compare", "Summarize and align completed runs");
  std::vector<std::string> dirs;
  std::string threshold, merged;
  cmp->add_option("dirs", dirs, "Run directories")->required();
  cmp->add_option("--threshold", threshold, "Report first step with name >= value");
  cmp->add_option("--merged-csv", merged, "Write aligned curves of all runs here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, task, mode, seed, out, sets);
    snet::CompareOptions opts;
    if (!threshold.empty()) opts.threshold = snet::parse_threshold(threshold);
    if (!merged.empty()) opts.merged_csv = merged;
    std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
    snet::compare_runs(paths, opts, std::cout);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "snet: error: " << e.what() << '\n';
    return 1;
  }
}
