#pragma once

#include "spotkit/types.hpp"

namespace spotkit {

/// Linearly interpolates every confidence (and displacement) channel onto the
/// grid k / target_fps, k = 0 .. floor((T - 1) * target_fps / fps). The output
/// spans the original duration without extrapolating past the last sample.
/// Samples whose timestamps coincide with an output timestamp are copied
/// bit for bit.
ScoreStream resample_stream(const ScoreStream& stream, double target_fps);

}  // namespace spotkit
