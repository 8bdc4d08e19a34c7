#include <benchmark/benchmark.h>

#include "teleop/plant.hpp"
#include "teleop/stability.hpp"

using namespace teleop;

namespace {

TeleopSystem bench_system() {
  TeleopSystem sys;
  sys.master = {0.5, 1.0};
  sys.slave = {0.5, 1.0};
  sys.human = {0.0, 1.0, 10.0};
  sys.environment = ImpedanceModel::free();
  sys.gains = {1.0, 10.0, 2.0, 0.002, 4.0};
  return sys;
}

ChannelConfig bench_channel(double T) {
  ChannelConfig ch;
  ch.T = T;
  ch.eps_min = T;
  return ch;
}

void BM_SmallGain(benchmark::State& state) {
  const auto sys = bench_system();
  const auto ch = bench_channel(0.006);
  const auto grid = make_grid(ch.T, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(small_gain_value(sys, ch, grid, true));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SmallGain)->Arg(512)->Arg(8192);

void BM_SampledPlant(benchmark::State& state) {
  const auto plant = plant_position_tf({0.5, 1.0}, {0.0, 1.0, 10.0});
  for (auto _ : state) benchmark::DoNotOptimize(sampled_plant_tf(plant, 0.006));
}
BENCHMARK(BM_SampledPlant);

void BM_PeriodSearch(benchmark::State& state) {
  const auto sys = bench_system();
  const auto ch = bench_channel(0.006);
  for (auto _ : state)
    benchmark::DoNotOptimize(max_stable_period(sys, ch, Criterion::SmallGain, 0.1, 1.0));
}
BENCHMARK(BM_PeriodSearch)->Unit(benchmark::kMillisecond);

}  // namespace
