#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spotkit/parallel.hpp"
#include "spotkit/types.hpp"

namespace spotkit {

struct TimeRange {
  double min_s = 0.0;
  double max_s = 0.0;
};

/// Turns every anchor (i, c) into a detection at i / fps + displacement[i][c],
/// clamped to `clamp` (default [0, stream.duration()]). Missing displacements
/// count as zero. Produces exactly T * C detections, in anchor order per class.
GameDetections displace(const ScoreStream& stream, std::optional<TimeRange> clamp = std::nullopt);

/// Keeps detections with confidence >= floor, preserving order.
std::vector<Detection> threshold_detections(std::span<const Detection> detections, double floor);
GameDetections threshold_detections(const GameDetections& detections, double floor);

/// displace followed by threshold_detections for every game.
std::vector<GameDetections> spot_all(std::span<const ScoreStream> streams, double floor,
                                     Execution exec = Execution::parallel);

}  // namespace spotkit
