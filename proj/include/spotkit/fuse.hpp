#pragma once

#include "spotkit/types.hpp"

namespace spotkit {

/// Probabilities are clamped to [eps, 1 - eps] before taking logits.
inline constexpr double kLogitEps = 1e-7;

/// ln(p / (1 - p)) on the clamped probability. Throws on NaN.
double logit(double p);
double sigmoid(double x);

/// Convex weights for two-stream fusion; stream b gets 1 - weight_a.
struct FusionWeights {
  double weight_a = 0.5;

  double weight_b() const { return 1.0 - weight_a; }
  bool operator==(const FusionWeights&) const = default;
};

/// sigmoid(wa * logit(a) + (1 - wa) * logit(b)) per entry. The result carries
/// a's displacements; displacements are never fused.
ScoreStream fuse_streams(const ScoreStream& a, const ScoreStream& b, FusionWeights weights);

}  // namespace spotkit
