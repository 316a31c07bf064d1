#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "besense/behavior_hmm.hpp"
#include "besense/config.hpp"
#include "besense/desk_scene.hpp"
#include "besense/experiments.hpp"
#include "besense/preprocess.hpp"
#include "besense/rng.hpp"
#include "besense/segmentation.hpp"

using namespace besense;

namespace {

AmplitudeSeries noisy_series(std::size_t n) {
  Rng rng(7);
  std::normal_distribution<double> d(20.0, 0.4);
  AmplitudeSeries s{1000.0, std::vector<double>(n), 0};
  for (auto& v : s.values) v = d(rng);
  return s;
}

void BM_Forward(benchmark::State& state) {
  BehaviorHmm hmm;
  hmm.A = {{{0.8, 0.2}, {0.3, 0.7}}};
  hmm.B = {{{0.95, 0.05}, {0.05, 0.95}}};
  const auto obs = sample_observations(hmm, static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(forward_log_likelihood(hmm, obs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(50)->Arg(1000);

void BM_Filter(benchmark::State& state) {
  const auto s = noisy_series(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(butterworth_lowpass(s, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Filter)->Arg(10000)->Arg(60000);

void BM_Segment(benchmark::State& state) {
  const PipelineConfig cfg;
  const auto filtered = preprocess_trace(cfg, simulate_plan(cfg, keystroke_train(), 11));
  for (auto _ : state) benchmark::DoNotOptimize(segment(filtered, cfg.segmenter));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(filtered.values.size()));
}
BENCHMARK(BM_Segment)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
