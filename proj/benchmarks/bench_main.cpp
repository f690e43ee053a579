// Microbenchmarks for the three hot paths of an optimization run: composing
// the effective channel from a realization, budgeted WMMSE rounds, and one
// full outer ascent iteration (one evaluation plus two probes plus the inner
// solve). Sizes follow the desk-scale experiment configuration.
#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "zobeam/channel.hpp"
#include "zobeam/irs.hpp"
#include "zobeam/optimizer.hpp"
#include "zobeam/oracle.hpp"
#include "zobeam/rng.hpp"

namespace {

using namespace zobeam;

Scenario desk_scenario() {
  Scenario sc;
  sc.tx_antennas = 4;
  sc.users = 8;
  sc.irs_elements = 64;
  sc.power_budget_watts = 5.0;
  sc.noise_var_watts = Eigen::VectorXd::Ones(8);
  sc.weights = Eigen::VectorXd::Ones(8);
  sc.rician_direct = 1.0;
  sc.rician_tx_irs = 10.0;
  sc.rician_irs_user = 3.0;
  sc.gain_direct = 0.01;
  sc.gain_tx_irs = 1.0;
  sc.gain_irs_user = 0.1;
  sc.geometry_seed = 7;
  return sc;
}

void bench_channel_compose(benchmark::State& state) {
  const Scenario sc = desk_scenario();
  const ChannelModel model(sc);
  const IrsMap map{IrsKind::ideal, sc.irs_elements, {}};
  Rng rng(1);
  const ChannelRealization realization = model.sample(rng);
  const Eigen::VectorXd theta = uniform_in_box(map.feasible_box(), rng);
  const Eigen::VectorXcd reflection = map.reflection(theta);
  for (auto _ : state) {
    benchmark::DoNotOptimize(effective_channel(realization, reflection));
  }
}
BENCHMARK(bench_channel_compose);

void bench_wmmse(benchmark::State& state) {
  const Scenario sc = desk_scenario();
  const ChannelModel model(sc);
  const IrsMap map{IrsKind::ideal, sc.irs_elements, {}};
  Rng rng(1);
  const ChannelRealization realization = model.sample(rng);
  const Eigen::VectorXd theta = uniform_in_box(map.feasible_box(), rng);
  const Eigen::VectorXcd h =
      effective_channel(realization, map.reflection(theta));
  const DownlinkProblem problem = problem_of(sc);
  const OracleBudget budget{static_cast<int>(state.range(0)), {}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(wmmse(h, problem, budget));
  }
}
BENCHMARK(bench_wmmse)->Arg(1)->Arg(5)->Arg(20);

void bench_outer_iteration(benchmark::State& state) {
  const Scenario sc = desk_scenario();
  const IrsMap map{IrsKind::ideal, sc.irs_elements, {}};
  const ParameterBox box = map.feasible_box();
  OptimizerConfig config;
  config.iterations = static_cast<int>(state.range(0));
  config.step_size = 0.002;
  config.smoothing = 0.01;
  config.schedule = {{0, OracleBudget{10, {}}}};
  config.warm_start = false;
  config.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(izosga_run(sc, map, box, config));
  }
  // Report per-iteration cost: each run performs iterations+1 outer steps.
  state.SetItemsProcessed(state.iterations() * (state.range(0) + 1));
}
BENCHMARK(bench_outer_iteration)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
