#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "vccopt/baselines.hpp"
#include "vccopt/bilevel.hpp"
#include "vccopt/game.hpp"
#include "vccopt/scenario.hpp"
#include "vccopt/sensitivity.hpp"

using namespace vccopt;

namespace {

Scenario bench_scenario(int dcs, int horizon, int jobs_per_dc) {
  DataCenterFleet fleet;
  fleet.dc_count = dcs;
  for (int v = 1; v < dcs; ++v) fleet.edges.push_back({v, v + 1, 0.4});
  if (dcs > 2) fleet.edges.push_back({dcs, 1, 0.4});
  for (int dc = 0; dc < dcs; ++dc) fleet.physical_capacity.push_back(10.0);

  Eigen::MatrixXd carbon(dcs, horizon);
  for (int dc = 0; dc < dcs; ++dc) {
    for (int t = 0; t < horizon; ++t) {
      carbon(dc, t) = 100.0 + 60.0 * dc + 80.0 * std::sin(2.0 * M_PI * (t + dc) / horizon);
    }
  }
  std::vector<ComputeJob> jobs;
  const double priorities[4] = {1, 2, 4, 8};
  int id = 1;
  for (int dc = 1; dc <= dcs; ++dc) {
    for (int j = 0; j < jobs_per_dc; ++j) {
      jobs.push_back({id, dc, 2.0 + 0.5 * j, priorities[(id - 1) % 4]});
      ++id;
    }
  }
  return make_scenario(fleet, jobs, horizon, carbon, Eigen::MatrixXd::Zero(dcs, horizon));
}

void BM_AssembleGame(benchmark::State& state) {
  const Scenario s = bench_scenario(static_cast<int>(state.range(0)), 5, 2);
  for (auto _ : state) {
    GameMatrices m = assemble_game(s);
    benchmark::DoNotOptimize(m.G_tilde.data());
  }
}
BENCHMARK(BM_AssembleGame)->Arg(4)->Arg(8)->Arg(12);

void BM_SolveGameCold(benchmark::State& state) {
  const Scenario s = bench_scenario(static_cast<int>(state.range(0)), 5, 2);
  const GameMatrices m = assemble_game(s);
  const VccFeasibleSet set = feasible_vcc_set(s);
  const Eigen::VectorXd x = project_onto_vcc_set(0.8 * set.upper, s).values;
  for (auto _ : state) {
    EquilibriumResult eq = solve_game(m, x);
    benchmark::DoNotOptimize(eq.y_star.data());
  }
}
BENCHMARK(BM_SolveGameCold)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_SolveGameWarm(benchmark::State& state) {
  const Scenario s = bench_scenario(static_cast<int>(state.range(0)), 5, 2);
  const GameMatrices m = assemble_game(s);
  const VccFeasibleSet set = feasible_vcc_set(s);
  const Eigen::VectorXd x = project_onto_vcc_set(0.8 * set.upper, s).values;
  const EquilibriumResult base = solve_game(m, x);
  SolveOptions opts;
  opts.warm_start = &base;
  const Eigen::VectorXd x2 = project_onto_vcc_set(0.79 * set.upper, s).values;
  for (auto _ : state) {
    EquilibriumResult eq = solve_game(m, x2, opts);
    benchmark::DoNotOptimize(eq.y_star.data());
  }
}
BENCHMARK(BM_SolveGameWarm)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Sensitivity(benchmark::State& state) {
  const Scenario s = bench_scenario(static_cast<int>(state.range(0)), 5, 2);
  const GameMatrices m = assemble_game(s);
  const VccFeasibleSet set = feasible_vcc_set(s);
  const Eigen::VectorXd x = project_onto_vcc_set(0.8 * set.upper, s).values;
  const EquilibriumResult eq = solve_game(m, x);
  for (auto _ : state) {
    SensitivityResult sr = compute_sensitivity(m, eq, x);
    benchmark::DoNotOptimize(sr.jacobian_full.data());
  }
}
BENCHMARK(BM_Sensitivity)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_ProjectCapacities(benchmark::State& state) {
  const Scenario s = bench_scenario(12, 5, 2);
  const VccFeasibleSet set = feasible_vcc_set(s);
  Eigen::VectorXd raw = -0.5 * set.upper;
  for (auto _ : state) {
    VccVector x = project_onto_vcc_set(raw, s);
    benchmark::DoNotOptimize(x.values.data());
  }
}
BENCHMARK(BM_ProjectCapacities)->Unit(benchmark::kMicrosecond);

void BM_NaiveSchedule(benchmark::State& state) {
  const Scenario s = bench_scenario(12, 5, 2);
  for (auto _ : state) {
    BaselineResult r = naive_schedule(s);
    benchmark::DoNotOptimize(r.y.data());
  }
}
BENCHMARK(BM_NaiveSchedule)->Unit(benchmark::kMicrosecond);

void BM_BilevelIterations(benchmark::State& state) {
  const Scenario s = bench_scenario(static_cast<int>(state.range(0)), 5, 2);
  SolverParams params;
  params.k_max = 10;
  for (auto _ : state) {
    BilevelResult r = run_bilevel(s, params);
    benchmark::DoNotOptimize(r.phi_e);
  }
}
BENCHMARK(BM_BilevelIterations)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
