// Command-line front end: train hyperparameter schedules, evaluate them
// against baselines, and compute validation risk bounds, all driven by a
// JSON experiment config.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "schedopt/experiment/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", args.seed, "base seed (overrides config)");
  cmd->add_option("--threads", args.threads, "worker threads (overrides config)");
}

schedopt::ExperimentConfig load_config(const CommonArgs& args,
                                       const CLI::App* cmd) {
  auto cfg = schedopt::ExperimentConfig::load(args.config_path);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (cmd->count("--seed")) {
    cfg.seed = args.seed;
    cfg.family.seed = args.seed;
  }
  if (cmd->count("--threads")) cfg.threads = args.threads;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learned hyperparameter schedules for first-order solvers"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, bounds_args, all_args;
  std::vector<std::string> schedule_paths;

  CLI::App* train = app.add_subcommand("train", "fit a schedule");
  add_common(train, train_args);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "compare schedules and baselines");
  add_common(evaluate, eval_args);
  evaluate->add_option("--schedule", schedule_paths,
                       "schedule JSON files (default: <out>/schedule.json)");

  CLI::App* bounds = app.add_subcommand("bounds", "validation risk bounds");
  add_common(bounds, bounds_args);
  bounds->add_option("--schedule", schedule_paths,
                     "schedule JSON file (default: <out>/schedule.json)");

  CLI::App* all = app.add_subcommand("all", "train, evaluate, bounds");
  add_common(all, all_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      schedopt::ExperimentRunner runner(load_config(train_args, train));
      const auto sched = runner.run_train();
      std::cout << "wrote " << runner.path("schedule.json") << " (H="
                << sched.horizon() << ", K=" << sched.train_horizon << ")\n";
    } else if (evaluate->parsed()) {
      schedopt::ExperimentRunner runner(load_config(eval_args, evaluate));
      std::vector<std::pair<std::string, schedopt::Schedule>> learned;
      if (schedule_paths.empty())
        schedule_paths.push_back(runner.path("schedule.json"));
      for (const auto& p : schedule_paths) {
        const auto stem = std::filesystem::path(p).stem().string();
        learned.emplace_back(stem == "schedule" ? "learned" : stem,
                             schedopt::Schedule::load(p));
      }
      const auto result = runner.run_evaluate(learned);
      std::cout << "wrote " << runner.path("results.csv") << " ("
                << result.methods.size() << " methods, " << result.k_eval
                << " iterations)\n";
    } else if (bounds->parsed()) {
      schedopt::ExperimentRunner runner(load_config(bounds_args, bounds));
      const std::string p = schedule_paths.empty()
                                ? runner.path("schedule.json")
                                : schedule_paths.front();
      runner.run_bounds(schedopt::Schedule::load(p));
      std::cout << "wrote " << runner.path("bounds.csv") << "\n";
    } else if (all->parsed()) {
      schedopt::ExperimentRunner runner(load_config(all_args, all));
      runner.run_all();
      std::cout << "artifacts in " << runner.config().out_dir << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
