#include <benchmark/benchmark.h>

#include "cupgame/experiment.hpp"

using namespace cupgame;

namespace {

ExperimentConfig config(std::uint32_t n, std::uint64_t steps, std::uint64_t trials, const char* emptier,
                        bool index) {
  ojson doc = {
      {"game", {{"n", n}, {"p", 1}, {"epsilon", "1/8"}, {"steps", steps}, {"seed", 7}}},
      {"filler", {{"kind", "baseline"}, {"baseline", "uniform"}}},
      {"emptier", {{"kind", emptier}, {"index", index}}},
      {"trials", trials},
      {"metrics", ojson::array({"backlog"})},
  };
  return parse_experiment(doc);
}

void BM_TrialsParallel(benchmark::State& state) {
  const auto cfg = config(256, 2000, 8, "smoothed", true);
  for (auto _ : state) benchmark::DoNotOptimize(run_trials(cfg, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_TrialsParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TrialsSerial(benchmark::State& state) {
  const auto cfg = config(256, 2000, 8, "smoothed", true);
  for (auto _ : state) benchmark::DoNotOptimize(run_trials_serial(cfg));
}
BENCHMARK(BM_TrialsSerial)->Unit(benchmark::kMillisecond);

void BM_Selector(benchmark::State& state) {
  const char* kind = state.range(0) ? "asymmetric" : "greedy";
  const auto n = static_cast<std::uint32_t>(state.range(1));
  const auto cfg = config(n, 2000, 1, kind, state.range(2) != 0);
  for (auto _ : state) benchmark::DoNotOptimize(run_trial(cfg, 0));
  state.SetLabel(std::string(kind) + (state.range(2) ? " indexed" : " scan"));
}
BENCHMARK(BM_Selector)
    ->ArgsProduct({{0, 1}, {256, 4096}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
