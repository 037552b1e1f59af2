// Serial reference vs OpenMP Monte Carlo over the rotation-with-noise scenario.

#include <benchmark/benchmark.h>

#include "flowdecomp/montecarlo.hpp"
#include "flowdecomp/scenarios.hpp"

namespace {

using namespace flowdecomp;

ZoneConfig bench_zones() {
  ZoneConfig z;
  z.mode = ZoneMode::Shrinking;
  z.delta_red = 0.01;
  z.delta_green = 0.05;
  return z;
}

MonteCarloConfig bench_mc(int trials) {
  MonteCarloConfig mc;
  mc.trials = trials;
  mc.horizon = 6.283185307179586;
  return mc;
}

void BM_MonteCarloSerial(benchmark::State& state) {
  const Scenario sc = make_scenario("rotation-noise");
  const IntegratorConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_montecarlo_serial(sc, bench_zones(), cfg, bench_mc(static_cast<int>(state.range(0)))));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarloOpenMP(benchmark::State& state) {
  const Scenario sc = make_scenario("rotation-noise");
  const IntegratorConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_montecarlo(sc, bench_zones(), cfg, bench_mc(static_cast<int>(state.range(0)))));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_IntegrateFlow(benchmark::State& state) {
  const Scenario sc = make_scenario("rotation-noise");
  const IntegratorConfig cfg;
  const DriverPath driver = sample_driver(1, 6.283185307179586, cfg.step, 7);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_flow(sc.system, driver, cfg, sc.x0));
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Arg(100)->Iterations(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloOpenMP)->Arg(100)->Iterations(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IntegrateFlow)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
