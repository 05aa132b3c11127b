#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spotkit/parallel.hpp"
#include "spotkit/types.hpp"

namespace spotkit {

/// Outcome of greedy matching, in ranking order (descending confidence,
/// earlier time first on ties).
struct MatchResult {
  std::vector<bool> true_positive;
  std::vector<double> confidences;
  std::vector<double> times;
  std::size_t matched = 0;
  std::size_t num_ground_truth = 0;
};

/// Each detection, in ranking order, claims the nearest unmatched ground truth
/// within delta / 2 (inclusive; equidistant ties go to the earlier one).
MatchResult match_detections(std::span<const Detection> detections,
                             std::span<const double> ground_truth_times, double delta);

/// All-point interpolated AP: area under the monotone precision envelope.
/// Zero when there is no ground truth or no true positive.
double average_precision(const MatchResult& match);

struct ToleranceResult {
  double delta = 0.0;
  std::vector<std::optional<double>> ap;  // per class; nullopt when excluded
  double map = 0.0;
};

struct EvalReport {
  std::vector<std::string> class_names;
  std::string schedule_name;
  std::vector<ToleranceResult> tolerances;
  std::vector<int> excluded_classes;  // classes without ground truth
  double average_map = 0.0;
  std::size_t num_games = 0;
  std::size_t num_detections = 0;
  std::size_t num_ground_truth = 0;
  std::map<std::string, std::string> config;
};

/// Per-class AP pooled over all games, and their mean over classes that have
/// ground truth. Detection games must all have labels; labelled games without
/// detections only contribute misses. Throws when no class has ground truth.
ToleranceResult map_at_tolerance(std::span<const GameDetections> detections,
                                 std::span<const AnnotationSet> labels, std::size_t num_classes,
                                 double delta, Execution exec = Execution::parallel);

/// map_at_tolerance over every delta of the schedule, averaged.
EvalReport average_map(std::span<const GameDetections> detections,
                       std::span<const AnnotationSet> labels,
                       const std::vector<std::string>& class_names,
                       const ToleranceSchedule& schedule, Execution exec = Execution::parallel);

}  // namespace spotkit
