#include "spotkit/resample.hpp"

#include <algorithm>
#include <cmath>

#include "spotkit/error.hpp"

namespace spotkit {

namespace {

// Positions closer than this to an integer index are treated as that sample.
constexpr double kIndexSnap = 1e-9;

struct Position {
  std::size_t index = 0;
  double frac = 0.0;  // 0 means "exactly on sample `index`"
};

Position source_position(std::size_t k, double fps, double target_fps, std::size_t last) {
  const double x = static_cast<double>(k) * fps / target_fps;
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= kIndexSnap * std::max(1.0, x)) {
    return {std::min(static_cast<std::size_t>(nearest), last), 0.0};
  }
  const auto index = static_cast<std::size_t>(std::floor(x));
  if (index >= last) return {last, 0.0};
  return {index, x - static_cast<double>(index)};
}

Matrix interpolate(const Matrix& in, const std::vector<Position>& positions) {
  Matrix out(positions.size(), in.cols());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const auto [i, frac] = positions[k];
    for (std::size_t c = 0; c < in.cols(); ++c) {
      const double v0 = in(i, c);
      if (frac == 0.0) {
        out(k, c) = v0;
        continue;
      }
      const double v1 = in(i + 1, c);
      const double v = v0 + frac * (v1 - v0);
      out(k, c) = std::clamp(v, std::min(v0, v1), std::max(v0, v1));
    }
  }
  return out;
}

}  // namespace

ScoreStream resample_stream(const ScoreStream& stream, double target_fps) {
  if (!(target_fps > 0.0) || !std::isfinite(target_fps)) {
    throw Error("resample: target fps must be positive and finite");
  }
  validate(stream);
  if (target_fps == stream.fps) return stream;

  const std::size_t last = stream.num_anchors() - 1;
  const double span = static_cast<double>(last) * target_fps / stream.fps;
  const auto out_rows = static_cast<std::size_t>(std::floor(span + kIndexSnap * std::max(1.0, span))) + 1;

  std::vector<Position> positions(out_rows);
  for (std::size_t k = 0; k < out_rows; ++k) {
    positions[k] = source_position(k, stream.fps, target_fps, last);
  }

  ScoreStream out;
  out.game_id = stream.game_id;
  out.class_names = stream.class_names;
  out.fps = target_fps;
  out.confidences = interpolate(stream.confidences, positions);
  if (stream.displacements) out.displacements = interpolate(*stream.displacements, positions);
  return out;
}

}  // namespace spotkit
