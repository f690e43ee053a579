// Projected zeroth-order stochastic ascent over surface parameters of a
// two-stage beamforming problem with an inexact, budgeted inner solver.
//
// One outer iteration t:
//   1. draw a channel state and compose H_t = H(theta_t, state);
//   2. solve the inner precoding problem under the scheduled budget
//      (optionally warm-started from the previous iteration) and record the
//      achieved utility;
//   3. draw u_t ~ N(0, I) and probe H(theta_t +/- mu*u_t, state);
//   4. take the two-point gradient sample and a projected ascent step.
// Exactly three effective-channel compositions per iteration: one
// evaluation plus two probes. The loop visits t = 0..T inclusive, so curves
// have T+1 entries. The returned iterate is theta at an index drawn
// uniformly from {0..T} (the usual certificate for nonconvex stochastic
// ascent); the post-loop iterate is also reported for deployment-style use.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "zobeam/channel.hpp"
#include "zobeam/irs.hpp"
#include "zobeam/oracle.hpp"
#include "zobeam/rng.hpp"

namespace zobeam {

// One sampled channel state. compose maps surface parameters to the stacked
// effective channel; jacobian exposes the analytic derivative for
// diagnostics (it may be left empty when unavailable; the optimizer itself
// never calls it).
struct RealizedState {
  std::function<Eigen::VectorXcd(const Eigen::VectorXd&)> compose;
  std::function<Eigen::MatrixXcd(const Eigen::VectorXd&)> jacobian;
};

// A distribution over channel states plus the fixed second-stage problem
// data. Implementations must be deterministic functions of the generator
// they are handed.
class TwoStageEnvironment {
 public:
  virtual ~TwoStageEnvironment() = default;
  virtual int theta_dim() const = 0;
  virtual const DownlinkProblem& problem() const = 0;
  virtual RealizedState sample_state(Rng& rng) const = 0;
};

// Fading downlink environment: a channel model plus a surface map.
class WirelessEnvironment : public TwoStageEnvironment {
 public:
  WirelessEnvironment(const Scenario& scenario, const IrsMap& map);

  int theta_dim() const override { return map_.theta_dim(); }
  const DownlinkProblem& problem() const override { return problem_; }
  RealizedState sample_state(Rng& rng) const override;

  const ChannelModel& model() const { return model_; }
  const IrsMap& map() const { return map_; }

 private:
  ChannelModel model_;
  IrsMap map_;
  DownlinkProblem problem_;
};

// Synthetic environment with an affine channel H(theta) = A*theta + b + e,
// where e is fresh CN(0, noise_scale^2 I) per state. The two-point gradient
// estimator is exactly unbiased here, which makes this the reference harness
// for estimator and convergence diagnostics.
class AffineEnvironment : public TwoStageEnvironment {
 public:
  AffineEnvironment(Eigen::MatrixXcd a, Eigen::VectorXcd b, double noise_scale,
                    DownlinkProblem problem);

  int theta_dim() const override { return static_cast<int>(a_.cols()); }
  const DownlinkProblem& problem() const override { return problem_; }
  RealizedState sample_state(Rng& rng) const override;

  const Eigen::MatrixXcd& a() const { return a_; }

 private:
  Eigen::MatrixXcd a_;
  Eigen::VectorXcd b_;
  double noise_scale_;
  DownlinkProblem problem_;
};

// --- Tuning rules and diagnostics -----------------------------------------

// Envelope constant 4 * B^2 * L^2 * (S^2 + 2S) bounding the mean squared
// two-point gradient sample in dimension S, for cogradient norms bounded by
// B and channel maps L-Lipschitz in theta.
double gradient_envelope_constant(double cogradient_bound,
                                  double channel_lipschitz, int dim);

// Step size sqrt(delta_f / (c2 * rho * (T+1))) from the nonconvex ascent
// rate analysis: delta_f bounds the initial optimality gap, c2 the mean
// squared gradient sample, rho the weak-convexity modulus.
double step_size_analytic(double delta_f, double c2, double rho,
                          int iterations);

// Smoothing radius scale / sqrt(effective_dim * (T+1)), shrinking with the
// channel dimension and the horizon so the smoothing bias vanishes at the
// rate the analysis needs.
double smoothing_dimension_rule(double scale, int effective_dim,
                                int iterations);

struct SecondMomentCheck {
  double bound = 0.0;
  double mean_square = 0.0;
  bool satisfied = false;
};

// Checks the empirical mean squared gradient sample against the envelope
// constant built from empirical stand-ins for B and L.
SecondMomentCheck second_moment_check(double cogradient_bound,
                                      double channel_lipschitz, int dim,
                                      double mean_square_gradient);

// --- Oracle budget schedules ----------------------------------------------

struct BudgetStage {
  int start_iteration = 0;
  OracleBudget budget;
};

// Stages must be nonempty, start at iteration 0, and strictly increase.
void validate_schedule(const std::vector<BudgetStage>& schedule);

// Budget in force at iteration t: the last stage with start_iteration <= t.
const OracleBudget& budget_at(const std::vector<BudgetStage>& schedule, int t);

// --- Moreau envelope proxy -------------------------------------------------

struct ObjectiveSample {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

using Objective = std::function<ObjectiveSample(const Eigen::VectorXd&)>;

// Sample-average surrogate of an environment's first-stage objective under a
// fixed oracle budget: `realizations` frozen states, value = mean utility of
// the budgeted inner solution, gradient = mean assembled real gradient with
// each inner solution held fixed (envelope-style). Requires states with
// analytic jacobians.
Objective sample_average_objective(const TwoStageEnvironment& environment,
                                   const OracleBudget& budget,
                                   int realizations, std::uint64_t seed);

struct MoreauOptions {
  double rho_bar = 1.0;
  int inner_steps = 300;
  // Inner ascent step as a fraction of 1/rho_bar; halved adaptively whenever
  // a step fails to improve the penalized objective.
  double inner_step_scale = 0.3;
};

// Near-stationarity proxy rho_bar * ||theta - prox||, where prox
// approximately maximizes objective(v) - (rho_bar/2)*||v - theta||^2 over
// the box, found by projected gradient ascent started at theta. Values near
// zero certify approximate stationarity of the constrained problem.
double moreau_gradient_proxy(const Objective& objective,
                             const Eigen::VectorXd& theta,
                             const ParameterBox& box,
                             const MoreauOptions& options);

// --- The outer ascent loop --------------------------------------------------

struct OptimizerConfig {
  int iterations = 1000;  // T; the loop visits t = 0..T inclusive
  double step_size = 0.05;
  double smoothing = 1e-2;
  std::vector<BudgetStage> schedule = {{0, OracleBudget{1, {}}}};
  bool warm_start = true;
  std::uint64_t seed = 0;
  // Optional fixed starting point; drawn uniformly in the box otherwise.
  std::optional<Eigen::VectorXd> initial_theta;

  // Value-gap tracking against the independent reference solver every
  // `value_gap_stride` iterations (0 = off). Only sensible on instances
  // small enough for reference_solve.
  int value_gap_stride = 0;
  ReferenceOptions reference;

  // Moreau proxy sampling every `moreau_stride` iterations (0 = off).
  int moreau_stride = 0;
  MoreauOptions moreau;
  int moreau_realizations = 8;

  // Keep a copy of theta every `theta_snapshot_stride` iterations (0 = off).
  int theta_snapshot_stride = 0;
};

void validate_config(const OptimizerConfig& config);

struct RunDiagnostics {
  double cogradient_norm_max = 0.0;  // empirical cogradient bound
  double probe_secant_max = 0.0;     // empirical channel Lipschitz stand-in
  double mean_square_gradient = 0.0;
  SecondMomentCheck second_moment;
  std::vector<std::pair<int, double>> moreau_proxy;  // (iteration, value)
  long channel_compositions = 0;
};

struct RunResult {
  Eigen::VectorXd sumrate_curve;  // utility of W_t at theta_t, T+1 entries
  Eigen::VectorXd error_curve;    // value gaps; NaN where not evaluated,
                                  // empty when tracking is off
  Eigen::VectorXi budget_curve;   // scheduled inner iteration cap at t
  Eigen::VectorXd returned_theta;
  int returned_index = 0;
  Eigen::VectorXd final_theta;    // iterate after the last update
  std::vector<std::pair<int, Eigen::VectorXd>> theta_snapshots;
  RunDiagnostics diagnostics;
};

RunResult izosga_run(const TwoStageEnvironment& environment,
                     const ParameterBox& box, const OptimizerConfig& config);

// Convenience overload for the fading downlink environment.
RunResult izosga_run(const Scenario& scenario, const IrsMap& map,
                     const ParameterBox& box, const OptimizerConfig& config);

}  // namespace zobeam
