#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "zobeam/channel.hpp"
#include "zobeam/irs.hpp"
#include "zobeam/optimizer.hpp"
#include "zobeam/oracle.hpp"
#include "zobeam/rng.hpp"
#include "zobeam/utility.hpp"

using namespace zobeam;

namespace {

Scenario small_scenario(int m, int k, int s) {
  Scenario sc;
  sc.tx_antennas = m;
  sc.users = k;
  sc.irs_elements = s;
  sc.power_budget_watts = 10.0;
  sc.noise_var_watts = Eigen::VectorXd::Ones(k);
  sc.weights = Eigen::VectorXd::Ones(k);
  sc.geometry_seed = 7;
  return sc;
}

AffineEnvironment single_user_affine(int rows, int cols, double noise,
                                     std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXcd a(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) a(i, j) = rng.complex_normal();
  }
  Eigen::VectorXcd b(rows);
  for (int i = 0; i < rows; ++i) b(i) = 0.5 * rng.complex_normal();
  DownlinkProblem problem;
  problem.weights = Eigen::VectorXd::Ones(1);
  problem.noise_var = Eigen::VectorXd::Ones(1);
  problem.power_budget = 1.0;
  return AffineEnvironment(a, b, noise, problem);
}

ParameterBox unit_box(int dim) {
  ParameterBox box;
  box.lower = Eigen::VectorXd::Constant(dim, -1.0);
  box.upper = Eigen::VectorXd::Constant(dim, 1.0);
  return box;
}

// Environment wrapper that counts effective-channel compositions.
class CountingEnvironment : public TwoStageEnvironment {
 public:
  CountingEnvironment(const TwoStageEnvironment& inner, long* counter)
      : inner_(inner), counter_(counter) {}

  int theta_dim() const override { return inner_.theta_dim(); }
  const DownlinkProblem& problem() const override { return inner_.problem(); }
  RealizedState sample_state(Rng& rng) const override {
    RealizedState state = inner_.sample_state(rng);
    auto compose = state.compose;
    long* counter = counter_;
    state.compose = [compose, counter](const Eigen::VectorXd& theta) {
      ++*counter;
      return compose(theta);
    };
    return state;
  }

 private:
  const TwoStageEnvironment& inner_;
  long* counter_;
};

}  // namespace

TEST_CASE("analytic step size matches the closed form and scales with the "
          "horizon") {
  // sqrt(12 / (3 * 4 * 1)) = 1.
  CHECK(step_size_analytic(12.0, 3.0, 4.0, 0) == doctest::Approx(1.0));
  // Quadrupling the horizon factor halves the step.
  CHECK(step_size_analytic(12.0, 3.0, 4.0, 3) == doctest::Approx(0.5));
  CHECK_THROWS_AS(step_size_analytic(0.0, 3.0, 4.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(step_size_analytic(1.0, -1.0, 4.0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(step_size_analytic(1.0, 3.0, 4.0, -1),
                  std::invalid_argument);
}

TEST_CASE("dimension smoothing rule matches the closed form") {
  // 1 / sqrt(4 * 1) = 0.5.
  CHECK(smoothing_dimension_rule(1.0, 4, 0) == doctest::Approx(0.5));
  // One hundred times the dimension shrinks mu tenfold.
  CHECK(smoothing_dimension_rule(1.0, 400, 0) == doctest::Approx(0.05));
  CHECK(smoothing_dimension_rule(2.0, 4, 0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(smoothing_dimension_rule(0.0, 4, 0), std::invalid_argument);
  CHECK_THROWS_AS(smoothing_dimension_rule(1.0, 0, 0), std::invalid_argument);
}

TEST_CASE("gradient envelope constant and second-moment check") {
  // 4 * 1 * 1 * (1 + 2) = 12 in dimension one.
  CHECK(gradient_envelope_constant(1.0, 1.0, 1) == doctest::Approx(12.0));
  // Strictly increasing in the dimension.
  double prev = 0.0;
  for (int s = 1; s <= 16; ++s) {
    const double c = gradient_envelope_constant(1.5, 2.0, s);
    CHECK(c > prev);
    prev = c;
  }
  const SecondMomentCheck ok = second_moment_check(1.0, 1.0, 1, 11.0);
  CHECK(ok.bound == doctest::Approx(12.0));
  CHECK(ok.mean_square == doctest::Approx(11.0));
  CHECK(ok.satisfied);
  const SecondMomentCheck bad = second_moment_check(1.0, 1.0, 1, 12.5);
  CHECK_FALSE(bad.satisfied);
  CHECK_THROWS_AS(gradient_envelope_constant(-1.0, 1.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(second_moment_check(1.0, 1.0, 1, -1.0),
                  std::invalid_argument);
}

TEST_CASE("budget schedules validate and pick the stage in force") {
  std::vector<BudgetStage> schedule = {
      {0, OracleBudget{20, {}}},
      {100, OracleBudget{10, {}}},
      {200, OracleBudget{5, {}}},
  };
  validate_schedule(schedule);
  CHECK(budget_at(schedule, 0).max_iterations == 20);
  CHECK(budget_at(schedule, 99).max_iterations == 20);
  CHECK(budget_at(schedule, 100).max_iterations == 10);
  CHECK(budget_at(schedule, 199).max_iterations == 10);
  CHECK(budget_at(schedule, 200).max_iterations == 5);
  CHECK(budget_at(schedule, 1000000).max_iterations == 5);

  CHECK_THROWS_AS(validate_schedule({}), std::invalid_argument);
  CHECK_THROWS_AS(validate_schedule({{5, OracleBudget{1, {}}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      validate_schedule(
          {{0, OracleBudget{1, {}}}, {10, OracleBudget{1, {}}},
           {10, OracleBudget{2, {}}}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      validate_schedule({{0, OracleBudget{0, {}}}}), std::invalid_argument);
  CHECK_THROWS_AS(budget_at(schedule, -1), std::invalid_argument);
}

TEST_CASE("optimizer config validation lists every problem") {
  OptimizerConfig config;
  config.iterations = -1;
  config.step_size = 0.0;
  config.smoothing = -2.0;
  config.schedule.clear();
  config.value_gap_stride = -1;
  try {
    validate_config(config);
    CHECK(false);
  } catch (const std::invalid_argument& err) {
    const std::string message = err.what();
    CHECK(message.find("iterations") != std::string::npos);
    CHECK(message.find("step_size") != std::string::npos);
    CHECK(message.find("smoothing") != std::string::npos);
    CHECK(message.find("schedule") != std::string::npos);
    CHECK(message.find("value_gap_stride") != std::string::npos);
  }
}

TEST_CASE("Moreau proxy solves the quadratic prox point exactly") {
  // objective(u) = -||u||^2 / 2, anchor e1, rho_bar = 2: the prox point is
  // (2/3) e1 and the proxy equals 2 * ||e1 - (2/3) e1|| = 2/3.
  const Objective objective = [](const Eigen::VectorXd& u) {
    ObjectiveSample s;
    s.value = -0.5 * u.squaredNorm();
    s.gradient = -u;
    return s;
  };
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(3);
  theta(0) = 1.0;
  ParameterBox box;
  box.lower = Eigen::VectorXd::Constant(3, -5.0);
  box.upper = Eigen::VectorXd::Constant(3, 5.0);
  MoreauOptions options;
  options.rho_bar = 2.0;
  options.inner_steps = 400;
  const double proxy = moreau_gradient_proxy(objective, theta, box, options);
  CHECK(proxy == doctest::Approx(2.0 / 3.0).epsilon(1e-3));

  // With the box clipped at 0.5 the prox point lands on the face and the
  // proxy becomes 2 * (1 - 0.5) = 1.
  ParameterBox tight;
  tight.lower = Eigen::VectorXd::Constant(3, -0.5);
  tight.upper = Eigen::VectorXd::Constant(3, 0.5);
  const double clipped =
      moreau_gradient_proxy(objective, theta, tight, options);
  CHECK(clipped == doctest::Approx(1.0).epsilon(1e-3));

  CHECK_THROWS_AS(moreau_gradient_proxy(Objective{}, theta, box, options),
                  std::invalid_argument);
  MoreauOptions bad = options;
  bad.rho_bar = 0.0;
  CHECK_THROWS_AS(moreau_gradient_proxy(objective, theta, box, bad),
                  std::invalid_argument);
}

TEST_CASE("sample-average objective is deterministic and its gradient "
          "matches finite differences on a single-user instance") {
  // With one user a single solver round is already optimal (matched filter),
  // so the envelope-style gradient is the exact gradient of the value.
  const AffineEnvironment env = single_user_affine(3, 4, 0.3, 11);
  const Objective objective =
      sample_average_objective(env, OracleBudget{1, {}}, 6, 99);
  const Objective replay =
      sample_average_objective(env, OracleBudget{1, {}}, 6, 99);

  Rng rng(5);
  Eigen::VectorXd v(4);
  for (int i = 0; i < 4; ++i) v(i) = rng.uniform(-0.5, 0.5);

  const ObjectiveSample sample = objective(v);
  const ObjectiveSample again = replay(v);
  CHECK(sample.value == again.value);
  CHECK((sample.gradient - again.gradient).norm() == 0.0);

  const double eps = 1e-5;
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd hi = v, lo = v;
    hi(i) += eps;
    lo(i) -= eps;
    const double fd = (objective(hi).value - objective(lo).value) / (2 * eps);
    CHECK(sample.gradient(i) == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("ascent on the affine surrogate makes measurable progress and "
          "passes its own diagnostics") {
  const AffineEnvironment env = single_user_affine(3, 4, 0.1, 21);
  const ParameterBox box = unit_box(4);

  OptimizerConfig config;
  config.iterations = 2000;
  config.step_size = 0.05;
  config.smoothing = 1e-3;
  config.schedule = {{0, OracleBudget{1, {}}}};
  config.seed = 3;
  const RunResult run = izosga_run(env, box, config);

  REQUIRE(run.sumrate_curve.size() == 2001);
  const int window = 100;
  const double head = run.sumrate_curve.head(window).mean();
  const double tail = run.sumrate_curve.tail(window).mean();
  CHECK(tail > head + 0.05);

  // The frozen surrogate agrees: the certificate iterate beats the start.
  const Objective objective =
      sample_average_objective(env, OracleBudget{1, {}}, 16, 7);
  OptimizerConfig start_cfg = config;
  start_cfg.iterations = 0;
  const RunResult start = izosga_run(env, box, start_cfg);
  CHECK(objective(run.returned_theta).value >
        objective(start.returned_theta).value);

  // Near-stationarity improves by a large factor over the run.
  MoreauOptions moreau;
  moreau.rho_bar = 1.0;
  moreau.inner_steps = 400;
  const double proxy_start =
      moreau_gradient_proxy(objective, start.returned_theta, box, moreau);
  const double proxy_end =
      moreau_gradient_proxy(objective, run.returned_theta, box, moreau);
  CHECK(proxy_end < 0.5 * proxy_start);

  // Empirical second-moment envelope holds on the whole trajectory.
  CHECK(run.diagnostics.second_moment.satisfied);
  CHECK(run.diagnostics.mean_square_gradient > 0.0);
  CHECK(run.diagnostics.cogradient_norm_max > 0.0);
  CHECK(run.diagnostics.probe_secant_max > 0.0);
}

TEST_CASE("runs are bit-identical under one seed and differ across seeds") {
  const Scenario scenario = small_scenario(2, 2, 4);
  IrsMap map;
  map.kind = IrsKind::ideal;
  map.elements = 4;
  const ParameterBox box = map.feasible_box();

  OptimizerConfig config;
  config.iterations = 60;
  config.step_size = 0.02;
  config.smoothing = 1e-2;
  config.schedule = {{0, OracleBudget{3, {}}}};
  config.seed = 17;

  const RunResult a = izosga_run(scenario, map, box, config);
  const RunResult b = izosga_run(scenario, map, box, config);
  CHECK((a.sumrate_curve - b.sumrate_curve).norm() == 0.0);
  CHECK((a.returned_theta - b.returned_theta).norm() == 0.0);
  CHECK((a.final_theta - b.final_theta).norm() == 0.0);
  CHECK(a.returned_index == b.returned_index);

  OptimizerConfig other = config;
  other.seed = 18;
  const RunResult c = izosga_run(scenario, map, box, other);
  CHECK((a.sumrate_curve - c.sumrate_curve).norm() > 0.0);

  // Optional diagnostics must not perturb the trajectory.
  OptimizerConfig with_diag = config;
  with_diag.theta_snapshot_stride = 20;
  with_diag.moreau_stride = 30;
  with_diag.moreau_realizations = 2;
  with_diag.moreau.inner_steps = 10;
  const RunResult d = izosga_run(scenario, map, box, with_diag);
  CHECK((a.sumrate_curve - d.sumrate_curve).norm() == 0.0);
  CHECK((a.final_theta - d.final_theta).norm() == 0.0);
  CHECK(d.theta_snapshots.size() == 4);  // t = 0, 20, 40, 60
  CHECK(d.diagnostics.moreau_proxy.size() == 3);  // t = 0, 30, 60
  for (const auto& [t, value] : d.diagnostics.moreau_proxy) {
    CHECK(value >= 0.0);
    CHECK(std::isfinite(value));
  }
}

TEST_CASE("a zero-iteration run returns the starting point and length-one "
          "curves") {
  const AffineEnvironment env = single_user_affine(2, 3, 0.0, 4);
  const ParameterBox box = unit_box(3);
  OptimizerConfig config;
  config.iterations = 0;
  config.initial_theta = Eigen::VectorXd::Zero(3);
  config.schedule = {{0, OracleBudget{2, {}}}};
  const RunResult run = izosga_run(env, box, config);
  CHECK(run.sumrate_curve.size() == 1);
  CHECK(run.budget_curve.size() == 1);
  CHECK(run.budget_curve(0) == 2);
  CHECK(run.returned_index == 0);
  CHECK(run.returned_theta.norm() == 0.0);
  CHECK(run.error_curve.size() == 0);
  CHECK(run.diagnostics.channel_compositions == 3);
}

TEST_CASE("value-gap tracking fills only the sampled iterations") {
  const Scenario scenario = small_scenario(2, 2, 2);
  IrsMap map;
  map.kind = IrsKind::ideal;
  map.elements = 2;
  const ParameterBox box = map.feasible_box();

  OptimizerConfig config;
  config.iterations = 10;
  config.step_size = 0.02;
  config.smoothing = 1e-2;
  config.schedule = {{0, OracleBudget{5, {}}}};
  config.value_gap_stride = 5;
  config.reference.restarts = 8;
  config.reference.steps = 200;
  config.seed = 2;
  const RunResult run = izosga_run(scenario, map, box, config);
  REQUIRE(run.error_curve.size() == 11);
  for (int t = 0; t <= 10; ++t) {
    if (t % 5 == 0) {
      CHECK(std::isfinite(run.error_curve(t)));
      CHECK(run.error_curve(t) >= 0.0);
    } else {
      CHECK(std::isnan(run.error_curve(t)));
    }
  }
}

TEST_CASE("budget schedule is reflected in the recorded budget curve") {
  const AffineEnvironment env = single_user_affine(2, 3, 0.1, 8);
  const ParameterBox box = unit_box(3);
  OptimizerConfig config;
  config.iterations = 30;
  config.schedule = {{0, OracleBudget{5, {}}}, {16, OracleBudget{2, {}}}};
  config.seed = 1;
  const RunResult run = izosga_run(env, box, config);
  for (int t = 0; t <= 30; ++t) {
    CHECK(run.budget_curve(t) == (t < 16 ? 5 : 2));
  }
}

TEST_CASE("each iteration performs exactly three channel compositions") {
  const AffineEnvironment inner = single_user_affine(2, 3, 0.1, 9);
  long count = 0;
  const CountingEnvironment env(inner, &count);
  const ParameterBox box = unit_box(3);
  OptimizerConfig config;
  config.iterations = 25;
  config.seed = 5;
  const RunResult run = izosga_run(env, box, config);
  CHECK(count == 3 * 26);
  CHECK(run.diagnostics.channel_compositions == 3 * 26);
}

TEST_CASE("mismatched boxes and starting points are rejected") {
  const AffineEnvironment env = single_user_affine(2, 3, 0.1, 10);
  OptimizerConfig config;
  CHECK_THROWS_AS(izosga_run(env, unit_box(2), config), std::invalid_argument);
  config.initial_theta = Eigen::VectorXd::Zero(5);
  CHECK_THROWS_AS(izosga_run(env, unit_box(3), config), std::invalid_argument);
}

TEST_CASE("full-scale configuration runs end to end for a few iterations") {
  const Scenario scenario = small_scenario(6, 32, 1000);
  IrsMap map;
  map.kind = IrsKind::ideal;
  map.elements = 1000;
  const ParameterBox box = map.feasible_box();

  OptimizerConfig config;
  config.iterations = 3;
  config.step_size = 0.01;
  config.smoothing = 1e-3;
  config.schedule = {{0, OracleBudget{1, {}}}};
  config.seed = 12;
  const RunResult run = izosga_run(scenario, map, box, config);
  CHECK(run.sumrate_curve.size() == 4);
  CHECK(run.sumrate_curve.allFinite());
  CHECK(run.sumrate_curve.minCoeff() > 0.0);
  CHECK(run.final_theta.size() == 2000);
  CHECK(box.contains(run.final_theta, 1e-9));
  CHECK(run.diagnostics.channel_compositions == 12);
}
