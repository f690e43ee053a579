// Experiment drivers: multi-seed sweeps, budget schedules, train/deploy
// studies, and the physical-surface comparison, with deterministic seeding,
// seed-level parallelism, and CSV/SVG emission.
//
// Determinism contract: every run's random stream is derived from the
// experiment master seed, the seed index, and a series identifier, never
// from time or thread identity. Seeds are distributed over worker threads
// by index, each writing its own result slot, so outputs are bit-identical
// for any worker count. A failing seed is recorded and skipped in the
// aggregates rather than aborting the series; only a series with no
// surviving seed raises.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "zobeam/config.hpp"
#include "zobeam/optimizer.hpp"

namespace zobeam {

// Series identifiers partition the seed-derivation space per experiment
// family; position offsets are added for indexed series (sweep budgets,
// named schedules).
inline constexpr std::uint64_t kSweepSeriesBase = 0;
inline constexpr std::uint64_t kBaselineSeries = 1ull << 32;
inline constexpr std::uint64_t kScheduleSeriesBase = 2ull << 32;
inline constexpr std::uint64_t kTrainSeries = 3ull << 32;
inline constexpr std::uint64_t kPhysicalVaractorSeries = 4ull << 32;
inline constexpr std::uint64_t kPhysicalIdealSeries = 5ull << 32;
inline constexpr std::uint64_t kDeployEvalSeries = 6ull << 32;
inline constexpr std::uint64_t kPhysicalRandomSeries = 7ull << 32;

// The random stream of one run.
std::uint64_t run_seed(std::uint64_t spec_seed, int seed_index,
                       std::uint64_t series);

// Mean and sample standard deviation over fresh channel states of the
// budgeted utility at a fixed surface configuration, solved cold per state:
// the score used for deployment mismatches and never-optimized baselines.
struct FrozenEval {
  double mean = 0.0;
  double stddev = 0.0;
  int realizations = 0;
};
FrozenEval evaluate_frozen(const TwoStageEnvironment& environment,
                           const Eigen::VectorXd& theta,
                           const OracleBudget& budget, int realizations,
                           std::uint64_t seed);

// Pointwise mean and sample standard deviation (N-1 normalization; zero for
// a single curve) across equal-length curves.
void aggregate_curves(const std::vector<Eigen::VectorXd>& curves,
                      Eigen::VectorXd* mean, Eigen::VectorXd* stddev);

// Mean of the last `window` entries (window clamps to the curve length).
double final_window_mean(const Eigen::VectorXd& curve, int window);

// Sample mean/std of a list of scalars (std is 0 for a single value).
void mean_and_std(const std::vector<double>& values, double* mean,
                  double* stddev);

// Runs fn(0), ..., fn(count-1) on up to `workers` threads. Exceptions
// escaping fn are rethrown (first by index) after all threads join; drivers
// catch per-seed failures inside fn instead.
void parallel_run(int count, int workers, const std::function<void(int)>& fn);

// One summary row of an experiment series.
struct SeriesStats {
  std::string name;
  double final_mean = 0.0;  // across-seed mean of per-seed final-window means
  double final_std = 0.0;   // across-seed sample std of the same
  int seeds_ok = 0;
  int seeds_failed = 0;
  Eigen::VectorXd mean_curve;            // across-seed mean per iteration
  std::vector<double> per_seed_final;    // per surviving seed, in seed order
  std::vector<std::string> failures;     // one message per failed seed
};

// Budget sweep: one ascent series per sweep budget plus a never-optimized
// random-surface baseline scored under each of the same budgets (the same
// per-seed random surfaces and evaluation states for every budget). Returns
// the ascent series first, then one baseline_<b> entry per budget. Writes
// sweep_budget_<b>.csv per budget, baseline.csv, summary.csv, and sweep.svg
// when svg is set.
std::vector<SeriesStats> run_sweep(const ExperimentSpec& spec,
                                   const std::string& out_dir, int workers,
                                   bool svg);

// Budget schedules: one series per [schedule.<name>] section. Writes
// schedule_<name>.csv, schedule_summary.csv, and schedule.svg when svg is
// set.
std::vector<SeriesStats> run_schedule(const ExperimentSpec& spec,
                                      const std::string& out_dir, int workers,
                                      bool svg);

// Training at the configured train budget; one checkpoint per seed
// (checkpoint_seed_<s>.json) plus train.csv, train_summary.csv, and
// train.svg when svg is set.
std::vector<SeriesStats> run_train(const ExperimentSpec& spec,
                                   const std::string& out_dir, int workers,
                                   bool svg);

// Deployment mismatch: evaluates every trained checkpoint under each deploy
// budget on fresh channel states. Checkpoints must match the configuration
// fingerprint. Writes deploy.csv and deploy_by_seed.csv.
struct DeployRow {
  int budget = 0;
  double mean = 0.0;
  double stddev = 0.0;
  int seeds_ok = 0;
  std::vector<double> per_seed;
};
std::vector<DeployRow> run_deploy(const ExperimentSpec& spec,
                                  const std::string& out_dir,
                                  const std::string& checkpoint_dir,
                                  int workers);

// Physical-surface comparison: ascent through the varactor-loaded surface
// versus the ideal surface on the same scenario, against a random-tuning
// baseline, all at the physical budget. Writes physical_varactor.csv,
// physical_ideal.csv, physical_baseline.csv, physical_summary.csv, and
// physical.svg when svg is set. Requires irs.kind = "varactor".
std::vector<SeriesStats> run_physical(const ExperimentSpec& spec,
                                      const std::string& out_dir, int workers,
                                      bool svg);

// Fast self-contained consistency suite; prints one PASS/FAIL line per check
// and returns the number of failures.
int run_check(std::ostream& out);

}  // namespace zobeam
