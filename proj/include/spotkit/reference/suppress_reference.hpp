#pragma once

#include <span>
#include <vector>

#include "spotkit/suppress.hpp"

// Quadratic, scan-everything versions of the suppressors. They follow the
// greedy loops literally and serve as the oracle for the windowed kernels.
namespace spotkit::reference {

enum class DecayKind {
  linear,     // min(|s - t| / (w / 2), 1)
  indicator,  // 0 inside the radius, 1 outside; reduces Soft-NMS to NMS
};

double decay(DecayKind kind, double t, double s, double window);

std::vector<Detection> soft_nms(std::span<const Detection> detections, const SuppressionConfig& cfg,
                                DecayKind kind = DecayKind::linear);

std::vector<Detection> hard_nms(std::span<const Detection> detections, const SuppressionConfig& cfg);

}  // namespace spotkit::reference
