// Quadratic reference vs windowed kernels, serial and OpenMP, on synthetic
// raw detections (every anchor of every class, before suppression).

#include <map>

#include <benchmark/benchmark.h>

#include "spotkit/reference/suppress_reference.hpp"
#include "spotkit/spotting.hpp"
#include "spotkit/suppress.hpp"
#include "spotkit/synth.hpp"

namespace {

using namespace spotkit;

const std::vector<GameDetections>& raw_detections(int games) {
  static std::map<int, std::vector<GameDetections>> cache;
  auto& slot = cache[games];
  if (slot.empty()) {
    SynthConfig cfg;
    cfg.seed = 3;
    cfg.num_games = games;
    cfg.duration = 2700;
    cfg.events_per_class = 10;
    cfg.noise = 0.2;
    cfg.jitter = 0.6;
    cfg.displacement_noise = 1.0;
    cfg.fps = 2.0;
    slot = spot_all(synth_generate(cfg).streams, 0.0);
  }
  return slot;
}

void BM_ReferenceSoft(benchmark::State& state) {
  const auto& games = raw_detections(static_cast<int>(state.range(0)));
  const SuppressionConfig cfg = SuppressionConfig::soft_default();
  for (auto _ : state) {
    for (const auto& g : games) {
      for (const auto& cls : g.per_class) benchmark::DoNotOptimize(reference::soft_nms(cls, cfg));
    }
  }
}

void BM_WindowedSoft(benchmark::State& state, Execution exec) {
  const auto& games = raw_detections(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(suppress_all(games, SuppressionConfig::soft_default(), exec));
  }
}

void BM_ReferenceHard(benchmark::State& state) {
  const auto& games = raw_detections(static_cast<int>(state.range(0)));
  const SuppressionConfig cfg = SuppressionConfig::hard_default();
  for (auto _ : state) {
    for (const auto& g : games) {
      for (const auto& cls : g.per_class) benchmark::DoNotOptimize(reference::hard_nms(cls, cfg));
    }
  }
}

void BM_WindowedHard(benchmark::State& state, Execution exec) {
  const auto& games = raw_detections(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(suppress_all(games, SuppressionConfig::hard_default(), exec));
  }
}

BENCHMARK(BM_ReferenceSoft)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_WindowedSoft, serial, Execution::serial)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_WindowedSoft, parallel, Execution::parallel)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReferenceHard)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_WindowedHard, serial, Execution::serial)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_WindowedHard, parallel, Execution::parallel)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
