#pragma once

#include <span>
#include <string>
#include <vector>

#include "spotkit/parallel.hpp"
#include "spotkit/types.hpp"

namespace spotkit {

enum class SuppressionMethod { hard, soft };

std::string to_string(SuppressionMethod method);
SuppressionMethod parse_suppression_method(const std::string& text);

struct SuppressionConfig {
  SuppressionMethod method = SuppressionMethod::soft;
  double window = 8.0;  // seconds; suppression radius is window / 2
  double floor = 0.0;   // detections whose confidence drops below it are discarded

  static SuppressionConfig hard_default() { return {SuppressionMethod::hard, 3.0, 0.0}; }
  static SuppressionConfig soft_default() { return {SuppressionMethod::soft, 8.0, 0.0}; }

  void validate() const;
};

/// Linear temporal decay min(|s - t| / (w / 2), 1).
double decay_factor(double t, double s, double window);

/// Detection ranking used by every greedy loop: higher confidence first, then
/// earlier time, then lower input position.
inline bool ranks_before(const Detection& a, std::size_t a_pos, const Detection& b,
                         std::size_t b_pos) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.time != b.time) return a.time < b.time;
  return a_pos < b_pos;
}

/// Greedy 1D Soft-NMS on one class. Each accepted detection multiplies the
/// confidence of every pending detection by decay_factor; detections decayed
/// below cfg.floor are dropped. Output is in acceptance order, which is also
/// descending confidence.
std::vector<Detection> soft_nms(std::span<const Detection> detections, const SuppressionConfig& cfg);

/// Greedy 1D NMS on one class: accepting t removes pending detections with
/// |s - t| < window / 2. Confidences are untouched.
std::vector<Detection> hard_nms(std::span<const Detection> detections, const SuppressionConfig& cfg);

/// Dispatches on cfg.method.
std::vector<Detection> suppress(std::span<const Detection> detections, const SuppressionConfig& cfg);

/// Suppresses every (game, class) group independently.
std::vector<GameDetections> suppress_all(std::span<const GameDetections> games,
                                         const SuppressionConfig& cfg,
                                         Execution exec = Execution::parallel);

}  // namespace spotkit
