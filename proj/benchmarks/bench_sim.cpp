#include <benchmark/benchmark.h>

#include <filesystem>

#include "teleop/scenario.hpp"
#include "teleop/sim.hpp"

using namespace teleop;

namespace {

SimScenario shipped() {
  return load_scenario(std::filesystem::path(TELEOP_SOURCE_DIR) / "scenarios" /
                       "paper_sec4.cfg");
}

void BM_RunScenario(benchmark::State& state) {
  auto sc = shipped();
  sc.integrator_substeps = static_cast<int>(state.range(0));
  std::size_t rows = 0;
  for (auto _ : state) {
    const auto tr = run_scenario(sc);
    rows = tr.size();
    benchmark::DoNotOptimize(tr.x_m.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_RunScenario)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_RunScenarioWithSensors(benchmark::State& state) {
  auto sc = shipped();
  sc.nonidealities = NonidealityConfig{};
  sc.nonidealities->noise_std = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(sc).x_m.data());
}
BENCHMARK(BM_RunScenarioWithSensors)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  const auto sc = shipped();
  const std::vector<double> periods{0.001, 0.002, 0.004, 0.006, 0.01, 0.02};
  for (auto _ : state) benchmark::DoNotOptimize(sweep_period(sc, periods));
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
