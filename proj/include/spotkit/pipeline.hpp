#pragma once

#include <span>
#include <utility>
#include <vector>

#include "spotkit/eval.hpp"
#include "spotkit/fuse.hpp"
#include "spotkit/suppress.hpp"
#include "spotkit/types.hpp"

namespace spotkit {

/// Inference-side settings shared by the searches: spot, suppress, evaluate.
struct PipelineConfig {
  double threshold = 0.0;
  SuppressionConfig suppression = SuppressionConfig::soft_default();
  ToleranceSchedule schedule = ToleranceSchedule::tight();
};

/// spot_all -> suppress_all -> average_map.
EvalReport evaluate_streams(std::span<const ScoreStream> streams,
                            std::span<const AnnotationSet> labels, const PipelineConfig& cfg,
                            Execution exec = Execution::parallel);

struct SweepRow {
  double value = 0.0;
  double score = 0.0;
};

struct WindowSweep {
  double best_window = 0.0;
  double best_score = 0.0;
  std::vector<SweepRow> table;  // candidate order
};

/// Suppresses the raw detections at every candidate window and scores the
/// result by average-mAP on `schedule`. Ties go to the smaller window.
WindowSweep sweep_window(std::span<const GameDetections> raw, std::span<const AnnotationSet> labels,
                         std::span<const double> windows, SuppressionMethod method,
                         const ToleranceSchedule& schedule, double floor = 0.0,
                         Execution exec = Execution::parallel);

struct StreamPair {
  ScoreStream a;
  ScoreStream b;
};

struct FusionSearch {
  FusionWeights best;
  double best_score = 0.0;
  std::vector<SweepRow> table;  // ascending weight_a
};

/// {0, step, 2 step, ...} below 1, then 1 itself.
std::vector<double> fusion_grid(double step);

/// Exhaustive search over fusion_grid(grid_step) for the weight maximizing
/// average-mAP of fuse -> spot -> suppress. Ties go to the smaller weight_a.
FusionSearch search_fusion_weight(std::span<const StreamPair> pairs,
                                  std::span<const AnnotationSet> labels, const PipelineConfig& cfg,
                                  double grid_step = 0.05, Execution exec = Execution::parallel);

}  // namespace spotkit
