#include "zobeam/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "zobeam/checkpoint.hpp"
#include "zobeam/emit.hpp"
#include "zobeam/oracle.hpp"
#include "zobeam/utility.hpp"
#include "zobeam/zograd.hpp"

namespace zobeam {

std::uint64_t run_seed(std::uint64_t spec_seed, int seed_index,
                       std::uint64_t series) {
  if (seed_index < 0) {
    throw std::invalid_argument("run_seed: seed index must be >= 0");
  }
  return derive_seed(spec_seed, static_cast<std::uint64_t>(seed_index),
                     series);
}

FrozenEval evaluate_frozen(const TwoStageEnvironment& environment,
                           const Eigen::VectorXd& theta,
                           const OracleBudget& budget, int realizations,
                           std::uint64_t seed) {
  if (realizations < 1) {
    throw std::invalid_argument("evaluate_frozen: realizations must be >= 1");
  }
  validate_budget(budget);
  if (theta.size() != environment.theta_dim()) {
    throw std::invalid_argument(
        "evaluate_frozen: theta length " + std::to_string(theta.size()) +
        " does not match the environment dimension " +
        std::to_string(environment.theta_dim()));
  }
  Rng rng(derive_seed(seed, 0xe7a1, 0));
  const DownlinkProblem& problem = environment.problem();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(realizations));
  for (int i = 0; i < realizations; ++i) {
    const RealizedState state = environment.sample_state(rng);
    const Eigen::VectorXcd h = state.compose(theta);
    const Eigen::VectorXcd w = wmmse(h, problem, budget);
    values.push_back(sumrate(w, h, problem.weights, problem.noise_var));
  }
  FrozenEval out;
  mean_and_std(values, &out.mean, &out.stddev);
  out.realizations = realizations;
  return out;
}

void mean_and_std(const std::vector<double>& values, double* mean,
                  double* stddev) {
  if (values.empty()) {
    throw std::invalid_argument("mean_and_std: no values");
  }
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double m = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  *mean = m;
  *stddev = values.size() == 1 ? 0.0 : std::sqrt(ss / (n - 1.0));
}

void aggregate_curves(const std::vector<Eigen::VectorXd>& curves,
                      Eigen::VectorXd* mean, Eigen::VectorXd* stddev) {
  if (curves.empty()) {
    throw std::invalid_argument("aggregate_curves: no curves");
  }
  const Eigen::Index length = curves.front().size();
  for (const Eigen::VectorXd& c : curves) {
    if (c.size() != length) {
      throw std::invalid_argument("aggregate_curves: curve lengths disagree");
    }
  }
  const double n = static_cast<double>(curves.size());
  mean->setZero(length);
  for (const Eigen::VectorXd& c : curves) *mean += c;
  *mean /= n;
  stddev->setZero(length);
  if (curves.size() > 1) {
    for (const Eigen::VectorXd& c : curves) {
      stddev->array() += (c - *mean).array().square();
    }
    *stddev = (stddev->array() / (n - 1.0)).sqrt();
  }
}

double final_window_mean(const Eigen::VectorXd& curve, int window) {
  if (curve.size() == 0) {
    throw std::invalid_argument("final_window_mean: empty curve");
  }
  if (window < 1) {
    throw std::invalid_argument("final_window_mean: window must be >= 1");
  }
  const Eigen::Index w =
      std::min<Eigen::Index>(window, curve.size());
  return curve.tail(w).mean();
}

void parallel_run(int count, int workers,
                  const std::function<void(int)>& fn) {
  if (count < 0) throw std::invalid_argument("parallel_run: count must be >= 0");
  if (!fn) throw std::invalid_argument("parallel_run: empty function");
  if (count == 0) return;
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex guard;
  std::exception_ptr first_error;
  int first_index = std::numeric_limits<int>::max();
  auto body = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(guard);
        if (i < first_index) {
          first_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

struct SeedOutcomes {
  // One slot per seed index; disengaged slots failed with the matching
  // message in failures.
  std::vector<std::optional<RunResult>> results;
  std::vector<std::string> failures;
};

SeedOutcomes run_series(const ExperimentSpec& spec,
                        const TwoStageEnvironment& environment,
                        const ParameterBox& box,
                        const std::vector<BudgetStage>& schedule,
                        std::uint64_t series, int workers) {
  const int n = static_cast<int>(spec.seeds.size());
  SeedOutcomes outcomes;
  outcomes.results.resize(static_cast<std::size_t>(n));
  std::vector<std::string> errors(static_cast<std::size_t>(n));
  parallel_run(n, workers, [&](int i) {
    try {
      OptimizerConfig config = spec.optimizer;
      config.schedule = schedule;
      config.seed = run_seed(spec.spec_seed, spec.seeds[i], series);
      outcomes.results[static_cast<std::size_t>(i)] =
          izosga_run(environment, box, config);
    } catch (const std::exception& err) {
      errors[static_cast<std::size_t>(i)] =
          "seed " + std::to_string(spec.seeds[i]) + ": " + err.what();
    }
  });
  for (const std::string& message : errors) {
    if (!message.empty()) outcomes.failures.push_back(message);
  }
  return outcomes;
}

// Aggregates surviving seeds, writes the curve CSV, and builds the summary
// row. Throws when every seed failed.
SeriesStats finalize_series(const std::string& name,
                            const SeedOutcomes& outcomes,
                            const ExperimentSpec& spec,
                            const std::string& csv_path) {
  SeriesStats stats;
  stats.name = name;
  stats.failures = outcomes.failures;
  stats.seeds_failed = static_cast<int>(outcomes.failures.size());

  std::vector<Eigen::VectorXd> curves;
  std::vector<const Eigen::VectorXd*> error_curves;
  const Eigen::VectorXi* budget_curve = nullptr;
  for (const auto& slot : outcomes.results) {
    if (!slot) continue;
    curves.push_back(slot->sumrate_curve);
    stats.per_seed_final.push_back(
        final_window_mean(slot->sumrate_curve, spec.smoothing_window));
    if (slot->error_curve.size() != 0) error_curves.push_back(&slot->error_curve);
    if (budget_curve == nullptr) budget_curve = &slot->budget_curve;
  }
  stats.seeds_ok = static_cast<int>(curves.size());
  if (curves.empty()) {
    throw std::runtime_error(
        "series '" + name + "': every seed failed (" +
        (outcomes.failures.empty() ? "no detail" : outcomes.failures.front()) +
        ")");
  }

  Eigen::VectorXd mean, stddev;
  aggregate_curves(curves, &mean, &stddev);
  stats.mean_curve = mean;

  Eigen::VectorXd eps_mean;
  if (!error_curves.empty() &&
      error_curves.size() == curves.size()) {
    eps_mean.setZero(mean.size());
    for (const Eigen::VectorXd* e : error_curves) eps_mean += *e;
    eps_mean /= static_cast<double>(error_curves.size());
  }

  write_curve_csv(csv_path, mean, stddev, *budget_curve, eps_mean);
  mean_and_std(stats.per_seed_final, &stats.final_mean, &stats.final_std);
  return stats;
}

void write_summary_csv(const std::string& path,
                       const std::vector<SeriesStats>& rows) {
  CsvTable table;
  table.header = {"series", "final_window_mean", "final_window_std",
                  "seeds_ok", "seeds_failed"};
  for (const SeriesStats& row : rows) {
    table.rows.push_back({row.name, format_exact(row.final_mean),
                          format_exact(row.final_std),
                          std::to_string(row.seeds_ok),
                          std::to_string(row.seeds_failed)});
  }
  table.write(path);
}

// Random-surface baseline: one uniformly drawn configuration per seed that
// is never optimized, scored on fresh states under every listed budget. The
// draw and the evaluation states depend only on the seed, so all budgets
// score the same surfaces on the same states and differ purely in inner
// solver effort. Writes one row per (budget, seed) to csv_path and returns
// one summary entry per budget, named `<name_prefix>_<budget>` (or just
// `name_prefix` when suffix_budget is false).
std::vector<SeriesStats> random_baseline_table(
    const std::string& name_prefix, bool suffix_budget,
    const ExperimentSpec& spec, const TwoStageEnvironment& environment,
    const ParameterBox& box, const std::vector<int>& budgets,
    std::uint64_t series, int workers, const std::string& csv_path) {
  const int seed_count = static_cast<int>(spec.seeds.size());
  const int budget_count = static_cast<int>(budgets.size());
  std::vector<std::optional<FrozenEval>> evals(
      static_cast<std::size_t>(seed_count * budget_count));
  std::vector<std::string> errors(static_cast<std::size_t>(seed_count));
  parallel_run(seed_count * budget_count, workers, [&](int index) {
    const int si = index / budget_count;
    const int bi = index % budget_count;
    try {
      const std::uint64_t seed =
          run_seed(spec.spec_seed, spec.seeds[si], series);
      Rng rng(derive_seed(seed, 0x7e7a, 0));
      const Eigen::VectorXd theta = uniform_in_box(box, rng);
      evals[static_cast<std::size_t>(index)] =
          evaluate_frozen(environment, theta,
                          OracleBudget{budgets[static_cast<std::size_t>(bi)], {}},
                          spec.eval_realizations, seed);
    } catch (const std::exception& err) {
      errors[static_cast<std::size_t>(si)] =
          "seed " + std::to_string(spec.seeds[si]) + ": " + err.what();
    }
  });

  CsvTable table;
  table.header = {"budget", "seed", "mean_sumrate_bits", "std_sumrate_bits",
                  "realizations"};
  std::vector<SeriesStats> all;
  for (int bi = 0; bi < budget_count; ++bi) {
    const int budget = budgets[static_cast<std::size_t>(bi)];
    SeriesStats stats;
    stats.name = suffix_budget ? name_prefix + "_" + std::to_string(budget)
                               : name_prefix;
    for (int si = 0; si < seed_count; ++si) {
      const auto& slot =
          evals[static_cast<std::size_t>(si * budget_count + bi)];
      if (!slot) {
        stats.failures.push_back(errors[static_cast<std::size_t>(si)]);
        continue;
      }
      table.rows.push_back({std::to_string(budget),
                            std::to_string(spec.seeds[si]),
                            format_exact(slot->mean),
                            format_exact(slot->stddev),
                            std::to_string(slot->realizations)});
      stats.per_seed_final.push_back(slot->mean);
    }
    stats.seeds_ok = static_cast<int>(stats.per_seed_final.size());
    stats.seeds_failed = static_cast<int>(stats.failures.size());
    if (stats.per_seed_final.empty()) {
      throw std::runtime_error(
          "series '" + stats.name + "': every seed failed (" +
          (stats.failures.empty() ? "no detail" : stats.failures.front()) +
          ")");
    }
    mean_and_std(stats.per_seed_final, &stats.final_mean, &stats.final_std);
    all.push_back(std::move(stats));
  }
  table.write(csv_path);
  return all;
}

std::string kind_name(IrsKind kind) {
  return kind == IrsKind::ideal ? "ideal" : "varactor";
}

}  // namespace

std::vector<SeriesStats> run_sweep(const ExperimentSpec& spec,
                                   const std::string& out_dir, int workers,
                                   bool svg) {
  if (spec.sweep_budgets.empty()) {
    throw std::invalid_argument(
        "run_sweep: experiment.sweep_budgets is required for the sweep "
        "experiment");
  }
  const WirelessEnvironment environment(spec.scenario, spec.irs);
  const ParameterBox box = spec.irs.feasible_box();

  std::vector<SeriesStats> all;
  for (std::size_t bi = 0; bi < spec.sweep_budgets.size(); ++bi) {
    const int budget = spec.sweep_budgets[bi];
    const SeedOutcomes outcomes =
        run_series(spec, environment, box, {{0, OracleBudget{budget, {}}}},
                   kSweepSeriesBase + bi, workers);
    all.push_back(finalize_series(
        "budget_" + std::to_string(budget), outcomes, spec,
        join_path(out_dir, "sweep_budget_" + std::to_string(budget) + ".csv")));
  }

  const std::vector<SeriesStats> baselines = random_baseline_table(
      "baseline", true, spec, environment, box, spec.sweep_budgets,
      kBaselineSeries, workers, join_path(out_dir, "baseline.csv"));
  all.insert(all.end(), baselines.begin(), baselines.end());

  write_summary_csv(join_path(out_dir, "summary.csv"), all);

  if (svg) {
    std::vector<SvgSeries> series;
    const Eigen::Index length = all.front().mean_curve.size();
    for (std::size_t bi = 0; bi < spec.sweep_budgets.size(); ++bi) {
      series.push_back({"budget " + std::to_string(spec.sweep_budgets[bi]),
                        all[bi].mean_curve});
    }
    for (const SeriesStats& baseline : baselines) {
      series.push_back(
          {"random @ " + baseline.name.substr(baseline.name.rfind('_') + 1),
           Eigen::VectorXd::Constant(length, baseline.final_mean)});
    }
    write_progress_svg(join_path(out_dir, "sweep.svg"),
                       "Inner-solver budget sweep", "iteration",
                       "mean sum rate [bits]", series, spec.smoothing_window);
  }
  return all;
}

std::vector<SeriesStats> run_schedule(const ExperimentSpec& spec,
                                      const std::string& out_dir, int workers,
                                      bool svg) {
  if (spec.schedules.empty()) {
    throw std::invalid_argument(
        "run_schedule: the configuration declares no [schedule.<name>] "
        "sections");
  }
  const WirelessEnvironment environment(spec.scenario, spec.irs);
  const ParameterBox box = spec.irs.feasible_box();

  std::vector<SeriesStats> all;
  for (std::size_t si = 0; si < spec.schedules.size(); ++si) {
    const NamedSchedule& schedule = spec.schedules[si];
    const SeedOutcomes outcomes =
        run_series(spec, environment, box, schedule.stages,
                   kScheduleSeriesBase + si, workers);
    all.push_back(finalize_series(
        schedule.name, outcomes, spec,
        join_path(out_dir, "schedule_" + schedule.name + ".csv")));
  }
  write_summary_csv(join_path(out_dir, "schedule_summary.csv"), all);

  if (svg) {
    std::vector<SvgSeries> series;
    for (const SeriesStats& stats : all) {
      series.push_back({stats.name, stats.mean_curve});
    }
    write_progress_svg(join_path(out_dir, "schedule.svg"),
                       "Inner-solver budget schedules", "iteration",
                       "mean sum rate [bits]", series, spec.smoothing_window);
  }
  return all;
}

std::vector<SeriesStats> run_train(const ExperimentSpec& spec,
                                   const std::string& out_dir, int workers,
                                   bool svg) {
  if (spec.train_budget < 1) {
    throw std::invalid_argument(
        "run_train: experiment.train_budget is required for the train "
        "experiment");
  }
  const WirelessEnvironment environment(spec.scenario, spec.irs);
  const ParameterBox box = spec.irs.feasible_box();

  const SeedOutcomes outcomes = run_series(
      spec, environment, box, {{0, OracleBudget{spec.train_budget, {}}}},
      kTrainSeries, workers);

  for (std::size_t i = 0; i < outcomes.results.size(); ++i) {
    if (!outcomes.results[i]) continue;
    const RunResult& result = *outcomes.results[i];
    Checkpoint checkpoint;
    checkpoint.irs_kind = kind_name(spec.irs.kind);
    checkpoint.theta = result.final_theta;
    checkpoint.returned_theta = result.returned_theta;
    checkpoint.returned_index = result.returned_index;
    checkpoint.box = box;
    checkpoint.config_fingerprint = spec.config_fingerprint;
    checkpoint.train_budget = spec.train_budget;
    checkpoint.seed = spec.seeds[i];
    checkpoint.run_seed = run_seed(spec.spec_seed, spec.seeds[i], kTrainSeries);
    checkpoint.train_terminal_mean =
        final_window_mean(result.sumrate_curve, spec.smoothing_window);
    save_checkpoint(checkpoint,
                    join_path(out_dir, "checkpoint_seed_" +
                                           std::to_string(spec.seeds[i]) +
                                           ".json"));
  }

  SeriesStats stats = finalize_series(
      "train_budget_" + std::to_string(spec.train_budget), outcomes, spec,
      join_path(out_dir, "train.csv"));
  std::vector<SeriesStats> all = {stats};
  write_summary_csv(join_path(out_dir, "train_summary.csv"), all);
  if (svg) {
    write_progress_svg(join_path(out_dir, "train.svg"),
                       "Training at the train budget", "iteration",
                       "mean sum rate [bits]",
                       {{stats.name, stats.mean_curve}},
                       spec.smoothing_window);
  }
  return all;
}

std::vector<DeployRow> run_deploy(const ExperimentSpec& spec,
                                  const std::string& out_dir,
                                  const std::string& checkpoint_dir,
                                  int workers) {
  if (spec.deploy_budgets.empty()) {
    throw std::invalid_argument(
        "run_deploy: experiment.deploy_budgets is required for the deploy "
        "experiment");
  }
  const WirelessEnvironment environment(spec.scenario, spec.irs);
  const ParameterBox box = spec.irs.feasible_box();

  // Checkpoint problems are configuration errors, not stochastic failures:
  // they abort the experiment instead of being skipped.
  std::vector<Checkpoint> checkpoints;
  checkpoints.reserve(spec.seeds.size());
  for (int seed : spec.seeds) {
    const std::string path = join_path(
        checkpoint_dir, "checkpoint_seed_" + std::to_string(seed) + ".json");
    Checkpoint checkpoint = load_checkpoint(path);
    if (checkpoint.config_fingerprint != spec.config_fingerprint) {
      throw std::runtime_error(
          "checkpoint " + path +
          ": trained under a different configuration (fingerprint mismatch)");
    }
    if (checkpoint.irs_kind != kind_name(spec.irs.kind)) {
      throw std::runtime_error("checkpoint " + path + ": surface kind '" +
                               checkpoint.irs_kind +
                               "' does not match the configuration ('" +
                               kind_name(spec.irs.kind) + "')");
    }
    if (checkpoint.box.dim() != box.dim() ||
        checkpoint.box.lower != box.lower ||
        checkpoint.box.upper != box.upper) {
      throw std::runtime_error(
          "checkpoint " + path +
          ": feasible box does not match the configuration");
    }
    checkpoints.push_back(std::move(checkpoint));
  }

  const int budget_count = static_cast<int>(spec.deploy_budgets.size());
  const int seed_count = static_cast<int>(spec.seeds.size());
  std::vector<FrozenEval> grid(
      static_cast<std::size_t>(budget_count * seed_count));
  parallel_run(budget_count * seed_count, workers, [&](int index) {
    const int bi = index / seed_count;
    const int si = index % seed_count;
    const int budget = spec.deploy_budgets[static_cast<std::size_t>(bi)];
    const std::uint64_t eval_seed = derive_seed(
        run_seed(spec.spec_seed, spec.seeds[si], kDeployEvalSeries), 0,
        static_cast<std::uint64_t>(budget));
    grid[static_cast<std::size_t>(index)] = evaluate_frozen(
        environment, checkpoints[static_cast<std::size_t>(si)].theta,
        OracleBudget{budget, {}}, spec.eval_realizations, eval_seed);
  });

  CsvTable by_seed;
  by_seed.header = {"budget", "seed", "mean_sumrate_bits", "std_sumrate_bits",
                    "realizations"};
  CsvTable by_budget;
  by_budget.header = {"budget", "mean_sumrate_bits", "std_sumrate_bits",
                      "seeds"};
  std::vector<DeployRow> rows;
  for (int bi = 0; bi < budget_count; ++bi) {
    DeployRow row;
    row.budget = spec.deploy_budgets[static_cast<std::size_t>(bi)];
    for (int si = 0; si < seed_count; ++si) {
      const FrozenEval& ev =
          grid[static_cast<std::size_t>(bi * seed_count + si)];
      row.per_seed.push_back(ev.mean);
      by_seed.rows.push_back({std::to_string(row.budget),
                              std::to_string(spec.seeds[si]),
                              format_exact(ev.mean), format_exact(ev.stddev),
                              std::to_string(ev.realizations)});
    }
    row.seeds_ok = seed_count;
    mean_and_std(row.per_seed, &row.mean, &row.stddev);
    by_budget.rows.push_back({std::to_string(row.budget),
                              format_exact(row.mean),
                              format_exact(row.stddev),
                              std::to_string(row.seeds_ok)});
    rows.push_back(std::move(row));
  }
  by_budget.write(join_path(out_dir, "deploy.csv"));
  by_seed.write(join_path(out_dir, "deploy_by_seed.csv"));
  return rows;
}

std::vector<SeriesStats> run_physical(const ExperimentSpec& spec,
                                      const std::string& out_dir, int workers,
                                      bool svg) {
  if (spec.irs.kind != IrsKind::varactor) {
    throw std::invalid_argument(
        "run_physical: the physical experiment requires irs.kind = "
        "\"varactor\"");
  }
  const int budget = spec.physical_budget;

  const WirelessEnvironment varactor_env(spec.scenario, spec.irs);
  const ParameterBox varactor_box = spec.irs.feasible_box();

  IrsMap ideal_map;
  ideal_map.kind = IrsKind::ideal;
  ideal_map.elements = spec.irs.elements;
  const WirelessEnvironment ideal_env(spec.scenario, ideal_map);
  const ParameterBox ideal_box = ideal_map.feasible_box();

  std::vector<SeriesStats> all;
  {
    const SeedOutcomes outcomes = run_series(
        spec, varactor_env, varactor_box, {{0, OracleBudget{budget, {}}}},
        kPhysicalVaractorSeries, workers);
    all.push_back(finalize_series(
        "varactor", outcomes, spec,
        join_path(out_dir, "physical_varactor.csv")));
  }
  {
    const SeedOutcomes outcomes = run_series(
        spec, ideal_env, ideal_box, {{0, OracleBudget{budget, {}}}},
        kPhysicalIdealSeries, workers);
    all.push_back(finalize_series("ideal", outcomes, spec,
                                  join_path(out_dir, "physical_ideal.csv")));
  }
  const std::vector<SeriesStats> baseline = random_baseline_table(
      "random_capacitance", false, spec, varactor_env, varactor_box, {budget},
      kPhysicalRandomSeries, workers,
      join_path(out_dir, "physical_baseline.csv"));
  all.push_back(baseline.front());

  write_summary_csv(join_path(out_dir, "physical_summary.csv"), all);

  if (svg) {
    const Eigen::Index length = all.front().mean_curve.size();
    write_progress_svg(
        join_path(out_dir, "physical.svg"),
        "Physical surface vs ideal surface", "iteration",
        "mean sum rate [bits]",
        {{"varactor", all[0].mean_curve},
         {"ideal", all[1].mean_curve},
         {"random capacitance",
          Eigen::VectorXd::Constant(length, all[2].final_mean)}},
        spec.smoothing_window);
  }
  return all;
}

// --- Consistency suite ----------------------------------------------------------

namespace {

Scenario check_scenario(int m, int k, int s) {
  Scenario sc;
  sc.tx_antennas = m;
  sc.users = k;
  sc.irs_elements = s;
  sc.power_budget_watts = 10.0;
  sc.noise_var_watts = Eigen::VectorXd::Ones(k);
  sc.weights = Eigen::VectorXd::Ones(k);
  sc.geometry_seed = 3;
  return sc;
}

}  // namespace

int run_check(std::ostream& out) {
  int failures = 0;
  auto check = [&out, &failures](const std::string& name, auto&& body) {
    try {
      const std::string detail = body();
      if (detail.empty()) {
        out << "PASS " << name << "\n";
      } else {
        out << "FAIL " << name << ": " << detail << "\n";
        ++failures;
      }
    } catch (const std::exception& err) {
      out << "FAIL " << name << ": exception: " << err.what() << "\n";
      ++failures;
    }
  };

  check("seeded generator replays bit-identically", []() -> std::string {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
      if (a.normal() != b.normal()) return "normal draws diverged";
      if (a.uniform() != b.uniform()) return "uniform draws diverged";
    }
    return "";
  });

  check("box projection clamps and is idempotent", []() -> std::string {
    ParameterBox box;
    box.lower = Eigen::VectorXd::Constant(6, -1.0);
    box.upper = Eigen::VectorXd::Constant(6, 2.0);
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd theta(6);
      for (int i = 0; i < 6; ++i) theta(i) = rng.uniform(-5.0, 5.0);
      const Eigen::VectorXd p = project(theta, box);
      if (!box.contains(p, 0.0)) return "projection left the box";
      if ((project(p, box) - p).norm() != 0.0) return "not idempotent";
    }
    return "";
  });

  check("ideal reflection keeps the requested amplitudes", []() -> std::string {
    Eigen::VectorXd amplitude(3), phase(3);
    amplitude << 0.25, 0.5, 1.0;
    phase << 0.1, -2.0, 3.0;
    const Eigen::VectorXcd r = reflection_ideal(amplitude, phase);
    for (int i = 0; i < 3; ++i) {
      if (std::abs(std::abs(r(i)) - amplitude(i)) > 1e-12) {
        return "amplitude mismatch";
      }
    }
    return "";
  });

  check("varactor circuit is passive with a wide phase span",
        []() -> std::string {
          const VaractorCircuit circuit;
          const int points = 500;
          Eigen::VectorXd caps(points);
          for (int i = 0; i < points; ++i) {
            caps(i) = 1e-12 * (circuit.capacitance_min_picofarads +
                               (circuit.capacitance_max_picofarads -
                                circuit.capacitance_min_picofarads) *
                                   i / (points - 1.0));
          }
          const Eigen::VectorXcd gamma = reflection_varactor(caps, circuit);
          double unwrapped = std::arg(gamma(0));
          double previous = unwrapped;
          double lo = unwrapped, hi = unwrapped;
          for (int i = 1; i < points; ++i) {
            if (std::abs(gamma(i)) > 1.0 + 1e-12) return "not passive";
            double step = std::arg(gamma(i)) - std::arg(gamma(i - 1));
            while (step > M_PI) step -= 2.0 * M_PI;
            while (step <= -M_PI) step += 2.0 * M_PI;
            previous += step;
            lo = std::min(lo, previous);
            hi = std::max(hi, previous);
          }
          if (hi - lo < 1.5 * M_PI) return "phase span below 270 degrees";
          return "";
        });

  check("zero-direction probes are symmetric", []() -> std::string {
    const Scenario sc = check_scenario(2, 2, 3);
    const ChannelModel model(sc);
    Rng rng(9);
    const ChannelRealization realization = model.sample(rng);
    IrsMap map;
    map.kind = IrsKind::ideal;
    map.elements = 3;
    const Eigen::VectorXd theta =
        uniform_in_box(map.feasible_box(), rng);
    const auto [plus, minus] = probe_pair(
        realization, map, theta, Eigen::VectorXd::Zero(theta.size()), 1e-3);
    return (plus - minus).norm() == 0.0 ? "" : "probe sides differ";
  });

  check("inner solver improves monotonically within its budget",
        []() -> std::string {
          const Scenario sc = check_scenario(2, 3, 2);
          const ChannelModel model(sc);
          Rng rng(11);
          const ChannelRealization realization = model.sample(rng);
          IrsMap map;
          map.kind = IrsKind::ideal;
          map.elements = 2;
          const Eigen::VectorXd theta =
              uniform_in_box(map.feasible_box(), rng);
          const Eigen::VectorXcd h =
              effective_channel(realization, map.reflection(theta));
          const DownlinkProblem problem = problem_of(sc);
          OracleTrace trace;
          const Eigen::VectorXcd w =
              wmmse(h, problem, OracleBudget{8, {}}, &trace);
          for (int i = 1; i < trace.iterations_used; ++i) {
            if (trace.sumrate_per_iteration(i) <
                trace.sumrate_per_iteration(i - 1) - 1e-9) {
              return "trace decreased";
            }
          }
          if (w.squaredNorm() > problem.power_budget * (1.0 + 1e-9)) {
            return "power budget violated";
          }
          return "";
        });

  check("zero probe difference gives a zero gradient sample",
        []() -> std::string {
          Rng rng(13);
          const Eigen::VectorXd u = sample_direction(5, rng);
          Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(4);
          Eigen::VectorXcd g(4);
          for (int i = 0; i < 4; ++i) g(i) = rng.complex_normal();
          const Eigen::VectorXd d = sample_gradient(delta, u, 1e-2, g);
          return d.norm() == 0.0 ? "" : "nonzero sample";
        });

  check("tuning rules reproduce their worked examples", []() -> std::string {
    if (std::abs(gradient_envelope_constant(1.0, 1.0, 1) - 12.0) > 1e-12) {
      return "envelope constant";
    }
    if (std::abs(step_size_analytic(12.0, 3.0, 4.0, 0) - 1.0) > 1e-12) {
      return "step size";
    }
    if (std::abs(smoothing_dimension_rule(1.0, 4, 0) - 0.5) > 1e-12) {
      return "smoothing";
    }
    return "";
  });

  check("budget schedules pick the stage in force", []() -> std::string {
    const std::vector<BudgetStage> schedule = {{0, OracleBudget{20, {}}},
                                               {10, OracleBudget{5, {}}}};
    validate_schedule(schedule);
    if (budget_at(schedule, 9).max_iterations != 20) return "stage 0";
    if (budget_at(schedule, 10).max_iterations != 5) return "stage 1";
    return "";
  });

  check("micro ascent run replays bit-identically", []() -> std::string {
    const Scenario sc = check_scenario(2, 2, 4);
    IrsMap map;
    map.kind = IrsKind::ideal;
    map.elements = 4;
    OptimizerConfig config;
    config.iterations = 15;
    config.step_size = 0.02;
    config.smoothing = 1e-2;
    config.schedule = {{0, OracleBudget{2, {}}}};
    config.seed = 23;
    const RunResult a = izosga_run(sc, map, map.feasible_box(), config);
    const RunResult b = izosga_run(sc, map, map.feasible_box(), config);
    if ((a.sumrate_curve - b.sumrate_curve).norm() != 0.0) return "curves";
    if ((a.final_theta - b.final_theta).norm() != 0.0) return "iterates";
    return "";
  });

  check("exact decimal formatting round-trips doubles", []() -> std::string {
    const double values[] = {1.0 / 3.0, 1e308, 5e-324, -0.0, 12345.6789,
                             -2.5e-7};
    for (double v : values) {
      const double back = parse_exact(format_exact(v));
      if (std::bit_cast<std::uint64_t>(back) !=
          std::bit_cast<std::uint64_t>(v)) {
        return "round trip failed for " + format_exact(v);
      }
    }
    return "";
  });

  check("checkpoints round-trip bit-exactly", []() -> std::string {
    Checkpoint checkpoint;
    checkpoint.irs_kind = "ideal";
    Rng rng(31);
    checkpoint.box.lower = Eigen::VectorXd::Constant(4, -2.0);
    checkpoint.box.upper = Eigen::VectorXd::Constant(4, 2.0);
    checkpoint.theta.resize(4);
    checkpoint.returned_theta.resize(4);
    for (int i = 0; i < 4; ++i) {
      checkpoint.theta(i) = rng.uniform(-2.0, 2.0);
      checkpoint.returned_theta(i) = rng.uniform(-2.0, 2.0);
    }
    checkpoint.returned_index = 12;
    checkpoint.config_fingerprint = 0x0123456789abcdefull;
    checkpoint.train_budget = 20;
    checkpoint.seed = 3;
    checkpoint.run_seed = 0xfedcba9876543210ull;
    checkpoint.train_terminal_mean = 1.0 / 7.0;
    const std::string path =
        (std::filesystem::temp_directory_path() / "zobeam_check_ckpt.json")
            .string();
    save_checkpoint(checkpoint, path);
    const Checkpoint loaded = load_checkpoint(path);
    std::filesystem::remove(path);
    if (loaded.irs_kind != checkpoint.irs_kind) return "kind";
    for (int i = 0; i < 4; ++i) {
      if (std::bit_cast<std::uint64_t>(loaded.theta(i)) !=
          std::bit_cast<std::uint64_t>(checkpoint.theta(i))) {
        return "theta bits";
      }
    }
    if (loaded.config_fingerprint != checkpoint.config_fingerprint) {
      return "fingerprint";
    }
    if (loaded.run_seed != checkpoint.run_seed) return "run seed";
    return "";
  });

  return failures;
}

}  // namespace zobeam
