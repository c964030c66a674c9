#include <benchmark/benchmark.h>

#include "modnet/config.hpp"
#include "modnet/experiment.hpp"

namespace {

modnet::EpisodeConfig bench_config() {
  return modnet::parse_config(R"({
    "scenario": "fig3-daytime-5arm",
    "radio": {"pilot_bits": 1000},
    "policy": {"batch_size": 25, "epsilon": 0.05, "max_rounds": 50}
  })");
}

void BM_Serial(benchmark::State& state) {
  const auto cfg = bench_config();
  const auto seeds = modnet::seed_range(1, static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(modnet::run_experiment_serial(cfg, seeds));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Parallel(benchmark::State& state) {
  const auto cfg = bench_config();
  const auto seeds = modnet::seed_range(1, static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(modnet::run_experiment(cfg, seeds));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
