// Command line front end: runs the experiment recipes described by a
// configuration file and writes CSV/SVG artifacts plus checkpoints.
//
// Exit status is 0 only when every requested run succeeded (and, for
// `check`, every consistency check passed).
#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "zobeam/config.hpp"
#include "zobeam/harness.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string out = "out";
  std::string seeds;
  std::string checkpoints;
  int workers = 1;
  bool svg = false;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config,
                  "experiment configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args->out,
                  "output directory, created if missing (default: out)");
  cmd->add_option(
      "--seeds", args->seeds,
      "override the configured seeds: a count N (runs seeds 0..N-1) or a "
      "comma-separated list of seed indices (a single index needs a "
      "trailing comma, e.g. '7,')");
  cmd->add_option("--workers", args->workers,
                  "worker threads for independent runs (default: 1); results "
                  "are identical for any worker count")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--svg", args->svg, "also write SVG charts");
}

std::vector<int> parse_seed_list(const std::string& text) {
  std::vector<int> seeds;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(start, comma - start);
    if (!item.empty()) {
      std::size_t used = 0;
      int value = 0;
      try {
        value = std::stoi(item, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("--seeds: cannot parse '" + item + "'");
      }
      if (used != item.size() || value < 0) {
        throw std::invalid_argument("--seeds: invalid seed index '" + item +
                                    "'");
      }
      seeds.push_back(value);
    }
    start = comma + 1;
  }
  if (seeds.empty()) {
    throw std::invalid_argument("--seeds: no seed indices given");
  }
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (std::size_t j = i + 1; j < seeds.size(); ++j) {
      if (seeds[i] == seeds[j]) {
        throw std::invalid_argument("--seeds: duplicate seed index " +
                                    std::to_string(seeds[i]));
      }
    }
  }
  return seeds;
}

void apply_seed_override(zobeam::ExperimentSpec* spec,
                         const std::string& text) {
  if (text.empty()) return;
  if (text.find(',') != std::string::npos) {
    spec->seeds = parse_seed_list(text);
    return;
  }
  std::size_t used = 0;
  int count = 0;
  try {
    count = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("--seeds: cannot parse '" + text + "'");
  }
  if (used != text.size() || count < 1) {
    throw std::invalid_argument("--seeds: expected a positive count or a "
                                "comma-separated list, got '" +
                                text + "'");
  }
  spec->seeds.clear();
  for (int i = 0; i < count; ++i) spec->seeds.push_back(i);
}

zobeam::ExperimentSpec load_spec(const CommonArgs& args) {
  zobeam::ExperimentSpec spec = zobeam::load_experiment(args.config);
  apply_seed_override(&spec, args.seeds);
  std::filesystem::create_directories(args.out);
  return spec;
}

// Prints per-series summaries and failure details; returns the count of
// failed runs.
int report_series(const std::vector<zobeam::SeriesStats>& all) {
  int failed = 0;
  for (const zobeam::SeriesStats& stats : all) {
    std::printf("%-24s final-window mean %.6g +/- %.6g  (seeds ok %d, failed %d)\n",
                stats.name.c_str(), stats.final_mean, stats.final_std,
                stats.seeds_ok, stats.seeds_failed);
    failed += stats.seeds_failed;
    for (const std::string& message : stats.failures) {
      std::fprintf(stderr, "  failed run: %s\n", message.c_str());
    }
  }
  return failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Zeroth-order surface optimization: sweeps, budget schedules, "
      "train/deploy, and the physically coupled surface experiment"};
  app.require_subcommand(1);

  CommonArgs sweep_args, schedule_args, train_args, deploy_args,
      physical_args;

  CLI::App* sweep = app.add_subcommand(
      "sweep", "optimize under each configured inner-solver budget");
  add_common(sweep, &sweep_args);

  CLI::App* schedule = app.add_subcommand(
      "schedule", "optimize under each configured budget schedule");
  add_common(schedule, &schedule_args);

  CLI::App* train = app.add_subcommand(
      "train", "optimize at the train budget and write checkpoints");
  add_common(train, &train_args);

  CLI::App* deploy = app.add_subcommand(
      "deploy",
      "evaluate trained checkpoints under each deploy budget");
  add_common(deploy, &deploy_args);
  deploy->add_option("--checkpoints", deploy_args.checkpoints,
                     "directory holding checkpoint_seed_<s>.json files "
                     "(default: the --out directory)");

  CLI::App* physical = app.add_subcommand(
      "physical",
      "compare the varactor surface against an ideal twin and a random "
      "baseline");
  add_common(physical, &physical_args);

  CLI::App* check = app.add_subcommand(
      "check", "run the fast consistency suite and report PASS/FAIL lines");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      const zobeam::ExperimentSpec spec = load_spec(sweep_args);
      const auto stats = zobeam::run_sweep(spec, sweep_args.out,
                                           sweep_args.workers, sweep_args.svg);
      return report_series(stats) == 0 ? 0 : 1;
    }
    if (schedule->parsed()) {
      const zobeam::ExperimentSpec spec = load_spec(schedule_args);
      const auto stats = zobeam::run_schedule(
          spec, schedule_args.out, schedule_args.workers, schedule_args.svg);
      return report_series(stats) == 0 ? 0 : 1;
    }
    if (train->parsed()) {
      const zobeam::ExperimentSpec spec = load_spec(train_args);
      const auto stats = zobeam::run_train(spec, train_args.out,
                                           train_args.workers, train_args.svg);
      return report_series(stats) == 0 ? 0 : 1;
    }
    if (deploy->parsed()) {
      const zobeam::ExperimentSpec spec = load_spec(deploy_args);
      const std::string checkpoint_dir = deploy_args.checkpoints.empty()
                                             ? deploy_args.out
                                             : deploy_args.checkpoints;
      const auto rows = zobeam::run_deploy(spec, deploy_args.out,
                                           checkpoint_dir,
                                           deploy_args.workers);
      for (const zobeam::DeployRow& row : rows) {
        std::printf("deploy budget %-3d mean %.6g +/- %.6g  (seeds %d)\n",
                    row.budget, row.mean, row.stddev, row.seeds_ok);
      }
      return 0;
    }
    if (physical->parsed()) {
      const zobeam::ExperimentSpec spec = load_spec(physical_args);
      const auto stats =
          zobeam::run_physical(spec, physical_args.out, physical_args.workers,
                               physical_args.svg);
      return report_series(stats) == 0 ? 0 : 1;
    }
    if (check->parsed()) {
      const int failures = zobeam::run_check(std::cout);
      if (failures != 0) {
        std::fprintf(stderr, "%d check(s) failed\n", failures);
        return 1;
      }
      return 0;
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
