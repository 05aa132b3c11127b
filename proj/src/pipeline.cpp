#include "spotkit/pipeline.hpp"

#include <cmath>

#include "spotkit/error.hpp"
#include "spotkit/spotting.hpp"

namespace spotkit {

namespace {

// Highest score wins; equal scores go to the smaller value.
std::size_t argmax(const std::vector<SweepRow>& table) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& row = table[i];
    if (row.score > table[best].score ||
        (row.score == table[best].score && row.value < table[best].value)) {
      best = i;
    }
  }
  return best;
}

// Inner stages run serially when the caller already parallelizes the outer loop.
Execution inner(Execution exec) { return exec == Execution::parallel ? Execution::serial : exec; }

}  // namespace

EvalReport evaluate_streams(std::span<const ScoreStream> streams,
                            std::span<const AnnotationSet> labels, const PipelineConfig& cfg,
                            Execution exec) {
  if (streams.empty()) throw Error("no streams to evaluate");
  const auto spotted = spot_all(streams, cfg.threshold, exec);
  const auto suppressed = suppress_all(spotted, cfg.suppression, exec);
  return average_map(suppressed, labels, streams.front().class_names, cfg.schedule, exec);
}

WindowSweep sweep_window(std::span<const GameDetections> raw, std::span<const AnnotationSet> labels,
                         std::span<const double> windows, SuppressionMethod method,
                         const ToleranceSchedule& schedule, double floor, Execution exec) {
  if (windows.empty()) throw Error("window sweep needs at least one candidate");
  if (raw.empty()) throw Error("window sweep needs at least one game");
  for (const double w : windows) SuppressionConfig{method, w, floor}.validate();

  WindowSweep sweep;
  sweep.table.resize(windows.size());
  for_each_index(windows.size(), exec, [&](std::size_t k) {
    const SuppressionConfig cfg{method, windows[k], floor};
    const auto suppressed = suppress_all(raw, cfg, inner(exec));
    const auto report = average_map(suppressed, labels, raw.front().class_names, schedule, inner(exec));
    sweep.table[k] = {windows[k], report.average_map};
  });
  const auto& best = sweep.table[argmax(sweep.table)];
  sweep.best_window = best.value;
  sweep.best_score = best.score;
  return sweep;
}

std::vector<double> fusion_grid(double step) {
  if (!(step > 0.0 && step <= 0.5)) throw Error("fusion grid step must lie in (0, 0.5]");
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double w = static_cast<double>(k) * step;
    if (w >= 1.0 - 1e-9) break;
    grid.push_back(w);
  }
  grid.push_back(1.0);
  return grid;
}

FusionSearch search_fusion_weight(std::span<const StreamPair> pairs,
                                  std::span<const AnnotationSet> labels, const PipelineConfig& cfg,
                                  double grid_step, Execution exec) {
  if (pairs.empty()) throw Error("fusion search needs a non-empty validation set");
  const auto grid = fusion_grid(grid_step);
  cfg.suppression.validate();
  // Surface shape mismatches before spending the grid.
  for (const auto& pair : pairs) fuse_streams(pair.a, pair.b, {});

  FusionSearch search;
  search.table.resize(grid.size());
  for_each_index(grid.size(), exec, [&](std::size_t k) {
    std::vector<ScoreStream> fused;
    fused.reserve(pairs.size());
    for (const auto& pair : pairs) fused.push_back(fuse_streams(pair.a, pair.b, {grid[k]}));
    const auto report = evaluate_streams(fused, labels, cfg, inner(exec));
    search.table[k] = {grid[k], report.average_map};
  });
  const auto& best = search.table[argmax(search.table)];
  search.best = {best.value};
  search.best_score = best.score;
  return search;
}

}  // namespace spotkit
