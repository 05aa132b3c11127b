#include "spotkit/fuse.hpp"

#include <algorithm>
#include <cmath>

#include "spotkit/error.hpp"

namespace spotkit {

double logit(double p) {
  if (std::isnan(p)) throw Error("logit of NaN");
  const double q = std::clamp(p, kLogitEps, 1.0 - kLogitEps);
  return std::log(q / (1.0 - q));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

ScoreStream fuse_streams(const ScoreStream& a, const ScoreStream& b, FusionWeights weights) {
  if (!(weights.weight_a >= 0.0 && weights.weight_a <= 1.0)) {
    throw Error("fusion weight_a must lie in [0, 1]");
  }
  validate(a);
  validate(b);
  const auto mismatch = [&](const std::string& field) {
    return Error("cannot fuse '" + a.game_id + "' with '" + b.game_id + "': " + field +
                 " differs");
  };
  if (a.game_id != b.game_id) throw mismatch("game_id");
  if (a.fps != b.fps) throw mismatch("fps");
  if (a.num_anchors() != b.num_anchors()) throw mismatch("anchor count");
  if (a.num_classes() != b.num_classes()) throw mismatch("class count");
  if (a.class_names != b.class_names) throw mismatch("class_names");

  ScoreStream out = a;
  const double wa = weights.weight_a;
  const double wb = weights.weight_b();
  for (std::size_t i = 0; i < a.num_anchors(); ++i) {
    for (std::size_t c = 0; c < a.num_classes(); ++c) {
      out.confidences(i, c) =
          sigmoid(wa * logit(a.confidences(i, c)) + wb * logit(b.confidences(i, c)));
    }
  }
  return out;
}

}  // namespace spotkit
