#include "spotkit/spotting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spotkit/error.hpp"

namespace spotkit {

GameDetections displace(const ScoreStream& stream, std::optional<TimeRange> clamp) {
  validate(stream);
  const TimeRange range = clamp.value_or(TimeRange{0.0, stream.duration()});
  if (!std::isfinite(range.min_s) || !std::isfinite(range.max_s) || range.min_s > range.max_s) {
    throw Error("displace: clamp range must be finite with min <= max");
  }

  const std::size_t rows = stream.num_anchors();
  const std::size_t cols = stream.num_classes();
  GameDetections out;
  out.game_id = stream.game_id;
  out.class_names = stream.class_names;
  out.per_class.resize(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    auto& dets = out.per_class[c];
    dets.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      const double offset = stream.displacements ? (*stream.displacements)(i, c) : 0.0;
      const double time = stream.anchor_time(i) + offset;
      if (!std::isfinite(time)) {
        std::ostringstream msg;
        msg << "displace: non-finite displacement at anchor " << i << ", class " << c;
        throw Error(msg.str());
      }
      dets.push_back({static_cast<int>(c), std::clamp(time, range.min_s, range.max_s),
                      stream.confidences(i, c)});
    }
  }
  return out;
}

std::vector<Detection> threshold_detections(std::span<const Detection> detections, double floor) {
  std::vector<Detection> kept;
  kept.reserve(detections.size());
  std::copy_if(detections.begin(), detections.end(), std::back_inserter(kept),
               [floor](const Detection& d) { return d.confidence >= floor; });
  return kept;
}

GameDetections threshold_detections(const GameDetections& detections, double floor) {
  GameDetections out{detections.game_id, detections.class_names, {}};
  out.per_class.reserve(detections.per_class.size());
  for (const auto& dets : detections.per_class) {
    out.per_class.push_back(threshold_detections(dets, floor));
  }
  return out;
}

std::vector<GameDetections> spot_all(std::span<const ScoreStream> streams, double floor,
                                     Execution exec) {
  if (!(floor >= 0.0 && floor <= 1.0)) throw Error("threshold must lie in [0, 1]");
  std::vector<GameDetections> out(streams.size());
  for_each_index(streams.size(), exec, [&](std::size_t g) {
    GameDetections dets = displace(streams[g]);
    out[g] = floor > 0.0 ? threshold_detections(dets, floor) : std::move(dets);
  });
  return out;
}

}  // namespace spotkit
