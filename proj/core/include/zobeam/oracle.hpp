// Inner solvers for the second-stage precoding problem
//   max_W  sum_k weight_k log2(1 + sinr_k(W, H))   s.t.  ||W||^2 <= P.
//
// wmmse runs block-coordinate weighted-MMSE ascent for a budgeted number of
// rounds; the budget is the experimental knob that makes the inner oracle
// deliberately inexact. reference_solve is an independent multistart
// projected gradient ascent, free of the WMMSE fixed-point structure, used
// as a quality bar on small instances. oracle_error_estimate turns the two
// into the one-sided value gap that stands in for the (unobservable)
// distance between an inexact solution and an exact one.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

#include "zobeam/channel.hpp"

namespace zobeam {

// Per-user weights and noise powers plus the transmit power budget: all the
// data of one second-stage instance besides the channel itself.
struct DownlinkProblem {
  Eigen::VectorXd weights;
  Eigen::VectorXd noise_var;
  double power_budget = 1.0;
};

DownlinkProblem problem_of(const Scenario& scenario);

struct OracleBudget {
  int max_iterations = 1;
  // When set, stop once a full round improves the sum rate by less than this.
  std::optional<double> value_tolerance;
};

// Throws std::invalid_argument for a nonpositive iteration cap or a negative
// tolerance.
void validate_budget(const OracleBudget& budget);

struct OracleTrace {
  // Sum rate recorded after each executed round; its length equals
  // iterations_used, which is max_iterations unless the tolerance fired.
  Eigen::VectorXd sumrate_per_iteration;
  int iterations_used = 0;
  // Rounds whose precoder system was singular and solved with an extra
  // 1e-12 * I ridge.
  int regularizations = 0;
};

// Matched-filter precoder w_k proportional to h_k, scaled to spend the full
// power budget (all-zero channels yield the zero precoder).
Eigen::VectorXcd matched_filter(const Eigen::VectorXcd& effective_channel,
                                int users, double power_budget);

// Budgeted WMMSE. Starts from warm_start when given (rescaled into the power
// ball if needed), otherwise from the matched filter. The returned precoder
// is always feasible and the recorded sum rates are nondecreasing.
Eigen::VectorXcd wmmse(const Eigen::VectorXcd& effective_channel,
                       const DownlinkProblem& problem,
                       const OracleBudget& budget,
                       OracleTrace* trace = nullptr,
                       const Eigen::VectorXcd* warm_start = nullptr);

struct ReferenceOptions {
  int restarts = 64;
  int steps = 2000;
  std::uint64_t seed = 1;
  // First step length relative to the power-ball radius; later steps shrink
  // harmonically.
  double step_scale = 0.1;
};

// Multistart projected gradient ascent on the sum rate over the power ball.
// Restart 0 starts from the matched filter, the rest from random feasible
// precoders; the best-value iterate seen anywhere is returned. Intended for
// small instances (M*K <= 8 or so); cost grows as restarts * steps * K^2 * M.
Eigen::VectorXcd reference_solve(const Eigen::VectorXcd& effective_channel,
                                 const DownlinkProblem& problem,
                                 const ReferenceOptions& options);

// One-sided value gap max(0, F(reference) - F(approximate)): zero when the
// approximate precoder is at least as good as the reference.
double oracle_error_estimate(const Eigen::VectorXcd& approximate,
                             const Eigen::VectorXcd& reference,
                             const Eigen::VectorXcd& effective_channel,
                             const DownlinkProblem& problem);

}  // namespace zobeam
