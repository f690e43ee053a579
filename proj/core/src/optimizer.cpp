#include "zobeam/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "zobeam/utility.hpp"
#include "zobeam/zograd.hpp"

namespace zobeam {

namespace {

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

// --- Environments -----------------------------------------------------------

WirelessEnvironment::WirelessEnvironment(const Scenario& scenario,
                                         const IrsMap& map)
    : model_(scenario), map_(map), problem_(problem_of(scenario)) {
  require(map.elements == scenario.irs_elements,
          "WirelessEnvironment: surface map has " +
              std::to_string(map.elements) + " elements but the scenario has " +
              std::to_string(scenario.irs_elements));
  if (map.kind == IrsKind::varactor) validate_circuit(map.circuit);
}

RealizedState WirelessEnvironment::sample_state(Rng& rng) const {
  auto realization =
      std::make_shared<const ChannelRealization>(model_.sample(rng));
  const IrsMap* map = &map_;  // states must not outlive the environment
  RealizedState state;
  state.compose = [realization, map](const Eigen::VectorXd& theta) {
    return effective_channel(*realization, map->reflection(theta));
  };
  state.jacobian = [realization, map](const Eigen::VectorXd& theta) {
    return effective_channel_jacobian(*realization, *map, theta);
  };
  return state;
}

AffineEnvironment::AffineEnvironment(Eigen::MatrixXcd a, Eigen::VectorXcd b,
                                     double noise_scale,
                                     DownlinkProblem problem)
    : a_(std::move(a)),
      b_(std::move(b)),
      noise_scale_(noise_scale),
      problem_(std::move(problem)) {
  require(a_.rows() > 0 && a_.cols() > 0,
          "AffineEnvironment: matrix must be nonempty");
  require(b_.size() == a_.rows(),
          "AffineEnvironment: offset length must match the matrix rows");
  require(noise_scale_ >= 0.0 && std::isfinite(noise_scale_),
          "AffineEnvironment: noise_scale must be finite and >= 0");
  const auto users = problem_.weights.size();
  require(users >= 1 && problem_.noise_var.size() == users,
          "AffineEnvironment: problem needs matching weights and noise "
          "entries for at least one user");
  require(a_.rows() % users == 0,
          "AffineEnvironment: matrix rows must be antennas * users");
  require(positive_finite(problem_.power_budget),
          "AffineEnvironment: power budget must be positive");
}

RealizedState AffineEnvironment::sample_state(Rng& rng) const {
  auto shifted = std::make_shared<Eigen::VectorXcd>(b_);
  for (Eigen::Index i = 0; i < shifted->size(); ++i) {
    (*shifted)(i) += noise_scale_ * rng.complex_normal();
  }
  const Eigen::MatrixXcd* a = &a_;  // states must not outlive the environment
  RealizedState state;
  state.compose = [a, shifted](const Eigen::VectorXd& theta) {
    if (theta.size() != a->cols()) {
      throw std::invalid_argument(
          "AffineEnvironment: theta length does not match the matrix");
    }
    return Eigen::VectorXcd((*a) * theta.cast<std::complex<double>>() +
                            *shifted);
  };
  state.jacobian = [a](const Eigen::VectorXd&) { return *a; };
  return state;
}

// --- Tuning rules and diagnostics -------------------------------------------

double gradient_envelope_constant(double cogradient_bound,
                                  double channel_lipschitz, int dim) {
  require(cogradient_bound >= 0.0 && std::isfinite(cogradient_bound),
          "gradient_envelope_constant: cogradient bound must be finite and "
          ">= 0");
  require(channel_lipschitz >= 0.0 && std::isfinite(channel_lipschitz),
          "gradient_envelope_constant: channel Lipschitz constant must be "
          "finite and >= 0");
  require(dim >= 1, "gradient_envelope_constant: dim must be >= 1");
  const double s = static_cast<double>(dim);
  return 4.0 * cogradient_bound * cogradient_bound * channel_lipschitz *
         channel_lipschitz * (s * s + 2.0 * s);
}

double step_size_analytic(double delta_f, double c2, double rho,
                          int iterations) {
  require(positive_finite(delta_f),
          "step_size_analytic: delta_f must be positive and finite");
  require(positive_finite(c2),
          "step_size_analytic: c2 must be positive and finite");
  require(positive_finite(rho),
          "step_size_analytic: rho must be positive and finite");
  require(iterations >= 0, "step_size_analytic: iterations must be >= 0");
  return std::sqrt(delta_f / (c2 * rho * (iterations + 1.0)));
}

double smoothing_dimension_rule(double scale, int effective_dim,
                                int iterations) {
  require(positive_finite(scale),
          "smoothing_dimension_rule: scale must be positive and finite");
  require(effective_dim >= 1,
          "smoothing_dimension_rule: effective_dim must be >= 1");
  require(iterations >= 0,
          "smoothing_dimension_rule: iterations must be >= 0");
  return scale / std::sqrt(static_cast<double>(effective_dim) *
                           (iterations + 1.0));
}

SecondMomentCheck second_moment_check(double cogradient_bound,
                                      double channel_lipschitz, int dim,
                                      double mean_square_gradient) {
  require(mean_square_gradient >= 0.0 && std::isfinite(mean_square_gradient),
          "second_moment_check: mean square gradient must be finite and >= 0");
  SecondMomentCheck check;
  check.bound =
      gradient_envelope_constant(cogradient_bound, channel_lipschitz, dim);
  check.mean_square = mean_square_gradient;
  check.satisfied = mean_square_gradient <= check.bound;
  return check;
}

// --- Oracle budget schedules -------------------------------------------------

void validate_schedule(const std::vector<BudgetStage>& schedule) {
  require(!schedule.empty(), "budget schedule: must have at least one stage");
  require(schedule.front().start_iteration == 0,
          "budget schedule: the first stage must start at iteration 0");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (i > 0) {
      require(schedule[i].start_iteration > schedule[i - 1].start_iteration,
              "budget schedule: stage starts must strictly increase (stage " +
                  std::to_string(i) + " starts at " +
                  std::to_string(schedule[i].start_iteration) + ")");
    }
    try {
      validate_budget(schedule[i].budget);
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument("budget schedule: stage " +
                                  std::to_string(i) + ": " + err.what());
    }
  }
}

const OracleBudget& budget_at(const std::vector<BudgetStage>& schedule,
                              int t) {
  require(!schedule.empty(), "budget_at: empty schedule");
  require(t >= 0, "budget_at: iteration must be >= 0");
  for (auto it = schedule.rbegin(); it != schedule.rend(); ++it) {
    if (it->start_iteration <= t) return it->budget;
  }
  throw std::invalid_argument(
      "budget_at: no stage covers iteration " + std::to_string(t) +
      " (the first stage must start at 0)");
}

// --- Moreau envelope proxy ----------------------------------------------------

Objective sample_average_objective(const TwoStageEnvironment& environment,
                                   const OracleBudget& budget,
                                   int realizations, std::uint64_t seed) {
  require(realizations >= 1,
          "sample_average_objective: need at least one realization");
  validate_budget(budget);
  auto states = std::make_shared<std::vector<RealizedState>>();
  states->reserve(static_cast<std::size_t>(realizations));
  Rng rng(derive_seed(seed, 0xf607, 0));
  for (int i = 0; i < realizations; ++i) {
    RealizedState state = environment.sample_state(rng);
    if (!state.jacobian) {
      throw std::invalid_argument(
          "sample_average_objective: environment states lack analytic "
          "jacobians");
    }
    states->push_back(std::move(state));
  }
  DownlinkProblem problem = environment.problem();
  OracleBudget fixed_budget = budget;
  return [states, problem, fixed_budget](const Eigen::VectorXd& v) {
    ObjectiveSample sample;
    sample.gradient = Eigen::VectorXd::Zero(v.size());
    for (const RealizedState& state : *states) {
      const Eigen::VectorXcd h = state.compose(v);
      const Eigen::VectorXcd w = wmmse(h, problem, fixed_budget);
      sample.value += sumrate(w, h, problem.weights, problem.noise_var);
      // Envelope-style gradient: the inner solution is held fixed while v
      // moves, matching the inexact-oracle reading of the outer objective.
      sample.gradient += assemble_real_gradient(
          state.jacobian(v), cogradient(w, h, problem.weights,
                                        problem.noise_var));
    }
    const double n = static_cast<double>(states->size());
    sample.value /= n;
    sample.gradient /= n;
    return sample;
  };
}

double moreau_gradient_proxy(const Objective& objective,
                             const Eigen::VectorXd& theta,
                             const ParameterBox& box,
                             const MoreauOptions& options) {
  require(static_cast<bool>(objective),
          "moreau_gradient_proxy: objective is empty");
  validate_box(box);
  require(theta.size() == box.dim(),
          "moreau_gradient_proxy: theta length does not match the box");
  require(positive_finite(options.rho_bar),
          "moreau_gradient_proxy: rho_bar must be positive and finite");
  require(options.inner_steps >= 1,
          "moreau_gradient_proxy: inner_steps must be >= 1");
  require(positive_finite(options.inner_step_scale),
          "moreau_gradient_proxy: inner_step_scale must be positive");

  const double rho = options.rho_bar;
  auto penalized = [&](const Eigen::VectorXd& u, Eigen::VectorXd* grad) {
    const ObjectiveSample s = objective(u);
    if (grad) *grad = s.gradient - rho * (u - theta);
    return s.value - 0.5 * rho * (u - theta).squaredNorm();
  };

  Eigen::VectorXd v = project(theta, box);
  Eigen::VectorXd grad;
  double current = penalized(v, &grad);
  double step = options.inner_step_scale / rho;
  const double step_floor = step * 1e-12;
  for (int it = 0; it < options.inner_steps; ++it) {
    const Eigen::VectorXd candidate = project(v + step * grad, box);
    Eigen::VectorXd candidate_grad;
    const double candidate_value = penalized(candidate, &candidate_grad);
    const bool improves =
        std::isfinite(candidate_value) &&
        candidate_value >= current - 1e-12 * (1.0 + std::abs(current));
    if (improves) {
      v = candidate;
      current = candidate_value;
      grad = std::move(candidate_grad);
    } else {
      step *= 0.5;
      if (step < step_floor) break;
    }
  }
  return rho * (theta - v).norm();
}

// --- The outer ascent loop ------------------------------------------------------

void validate_config(const OptimizerConfig& config) {
  std::string problems;
  auto add = [&problems](const std::string& message) {
    if (!problems.empty()) problems += "; ";
    problems += message;
  };
  if (config.iterations < 0) add("iterations: must be >= 0");
  if (!positive_finite(config.step_size)) {
    add("step_size: must be positive and finite");
  }
  if (!positive_finite(config.smoothing)) {
    add("smoothing: must be positive and finite");
  }
  try {
    validate_schedule(config.schedule);
  } catch (const std::invalid_argument& err) {
    add(err.what());
  }
  if (config.value_gap_stride < 0) add("value_gap_stride: must be >= 0");
  if (config.moreau_stride < 0) add("moreau_stride: must be >= 0");
  if (config.theta_snapshot_stride < 0) {
    add("theta_snapshot_stride: must be >= 0");
  }
  if (config.moreau_stride > 0) {
    if (config.moreau_realizations < 1) {
      add("moreau_realizations: must be >= 1");
    }
    if (!positive_finite(config.moreau.rho_bar)) {
      add("moreau.rho_bar: must be positive and finite");
    }
    if (config.moreau.inner_steps < 1) add("moreau.inner_steps: must be >= 1");
    if (!positive_finite(config.moreau.inner_step_scale)) {
      add("moreau.inner_step_scale: must be positive and finite");
    }
  }
  if (config.value_gap_stride > 0) {
    if (config.reference.restarts < 1) add("reference.restarts: must be >= 1");
    if (config.reference.steps < 1) add("reference.steps: must be >= 1");
  }
  if (config.initial_theta && !config.initial_theta->allFinite()) {
    add("initial_theta: must be finite");
  }
  if (!problems.empty()) {
    throw std::invalid_argument("optimizer config: " + problems);
  }
}

RunResult izosga_run(const TwoStageEnvironment& environment,
                     const ParameterBox& box, const OptimizerConfig& config) {
  validate_config(config);
  validate_box(box);
  require(box.dim() == environment.theta_dim(),
          "izosga_run: box dimension " + std::to_string(box.dim()) +
              " does not match the environment dimension " +
              std::to_string(environment.theta_dim()));

  const DownlinkProblem& problem = environment.problem();
  const int t_count = config.iterations + 1;

  // Separate derived streams keep the trajectory invariant to whether the
  // optional diagnostics run: initialization and returned-index draws, then
  // the per-iteration state/direction stream.
  Rng rng_init(derive_seed(config.seed, 0x5106, 0));
  Rng rng_main(derive_seed(config.seed, 0x5106, 1));

  Eigen::VectorXd theta;
  if (config.initial_theta) {
    require(config.initial_theta->size() == box.dim(),
            "izosga_run: initial_theta length does not match the box");
    theta = project(*config.initial_theta, box);
  } else {
    theta = uniform_in_box(box, rng_init);
  }
  const int returned_index =
      static_cast<int>(rng_init.uniform_index(static_cast<std::uint64_t>(
          t_count)));

  RunResult out;
  out.sumrate_curve.resize(t_count);
  out.budget_curve.resize(t_count);
  out.returned_index = returned_index;
  const bool track_gap = config.value_gap_stride > 0;
  if (track_gap) {
    out.error_curve = Eigen::VectorXd::Constant(
        t_count, std::numeric_limits<double>::quiet_NaN());
  }

  Eigen::VectorXcd warm;
  bool have_warm = false;
  double square_sum = 0.0;
  double cogradient_max = 0.0;
  double secant_max = 0.0;

  for (int t = 0; t < t_count; ++t) {
    const RealizedState state = environment.sample_state(rng_main);
    const Eigen::VectorXcd h = state.compose(theta);
    const OracleBudget& budget = budget_at(config.schedule, t);
    const Eigen::VectorXcd w =
        wmmse(h, problem, budget, nullptr, have_warm ? &warm : nullptr);
    const double value = sumrate(w, h, problem.weights, problem.noise_var);
    out.sumrate_curve(t) = value;
    out.budget_curve(t) = budget.max_iterations;
    if (config.warm_start) {
      warm = w;
      have_warm = true;
    }

    if (track_gap && t % config.value_gap_stride == 0) {
      ReferenceOptions reference = config.reference;
      reference.seed =
          derive_seed(config.seed, 0x09a9, static_cast<std::uint64_t>(t));
      const Eigen::VectorXcd ref = reference_solve(h, problem, reference);
      out.error_curve(t) = oracle_error_estimate(w, ref, h, problem);
    }
    if (config.theta_snapshot_stride > 0 &&
        t % config.theta_snapshot_stride == 0) {
      out.theta_snapshots.emplace_back(t, theta);
    }
    if (config.moreau_stride > 0 && t % config.moreau_stride == 0) {
      const Objective objective = sample_average_objective(
          environment, budget, config.moreau_realizations,
          derive_seed(config.seed, 0x30ea, 0));
      out.diagnostics.moreau_proxy.emplace_back(
          t, moreau_gradient_proxy(objective, theta, box, config.moreau));
    }
    if (t == returned_index) out.returned_theta = theta;

    const Eigen::VectorXcd g =
        cogradient(w, h, problem.weights, problem.noise_var);
    const Eigen::VectorXd u = sample_direction(box.dim(), rng_main);
    const double mu = config.smoothing;
    const Eigen::VectorXcd h_plus = state.compose(theta + mu * u);
    const Eigen::VectorXcd h_minus = state.compose(theta - mu * u);
    const Eigen::VectorXcd delta = h_plus - h_minus;
    const Eigen::VectorXd d = sample_gradient(delta, u, mu, g);

    const double g_norm = g.norm();
    cogradient_max = std::max(cogradient_max, g_norm);
    const double u_norm = u.norm();
    if (u_norm > 0.0) {
      secant_max = std::max(secant_max, delta.norm() / (2.0 * mu * u_norm));
    }
    square_sum += d.squaredNorm();
    out.diagnostics.channel_compositions += 3;

    if (!d.allFinite()) {
      std::ostringstream oss;
      oss << "izosga_run: non-finite gradient sample at iteration " << t
          << " (|cogradient| = " << g_norm << ", |delta| = " << delta.norm()
          << ", mu = " << mu << ", step = " << config.step_size
          << ", sum rate = " << value << ")";
      throw std::runtime_error(oss.str());
    }

    theta = project(theta + config.step_size * d, box);
    if (!box.contains(theta, 1e-9)) {
      throw std::runtime_error(
          "izosga_run: iterate left the feasible box after projection at "
          "iteration " +
          std::to_string(t));
    }
  }

  out.final_theta = theta;
  out.diagnostics.cogradient_norm_max = cogradient_max;
  out.diagnostics.probe_secant_max = secant_max;
  out.diagnostics.mean_square_gradient = square_sum / t_count;
  out.diagnostics.second_moment =
      second_moment_check(cogradient_max, secant_max, box.dim(),
                          out.diagnostics.mean_square_gradient);
  return out;
}

RunResult izosga_run(const Scenario& scenario, const IrsMap& map,
                     const ParameterBox& box, const OptimizerConfig& config) {
  const WirelessEnvironment environment(scenario, map);
  return izosga_run(environment, box, config);
}

}  // namespace zobeam
