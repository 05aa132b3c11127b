#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spotkit/io.hpp"
#include "spotkit/types.hpp"

namespace spotkit {

/// Synthetic fixture parameters. Generation is a pure function of this struct:
/// randomness comes from std::mt19937_64 with hand-written uniform and
/// Box-Muller normal transforms, so output is identical on every platform.
struct SynthConfig {
  std::uint64_t seed = 0;  // event placement
  /// Model-output randomness (peak jitter, noise). Defaults to a value derived
  /// from `seed`; set it to draw independent outputs over the same events.
  std::optional<std::uint64_t> noise_seed;
  int num_games = 4;
  double duration = 600.0;  // seconds
  std::vector<std::string> classes{"Goal", "Card", "Substitution"};
  int events_per_class = 5;       // per game
  double min_separation = 30.0;   // seconds between events of one class
  double noise = 0.0;             // in [0, 1]: mix weight of uniform noise
  double jitter = 0.0;            // stddev (s) of the confidence peak around the event
  double displacement_noise = 0.0;  // stddev (s) of per-anchor displacement error
  double fps = 1.0;
  double side_lobe_width = 4.0;   // seconds from peak to zero confidence
  bool displacements = true;

  void validate() const;
};

struct SynthData {
  std::vector<AnnotationSet> labels;
  std::vector<ScoreStream> streams;
};

SynthData synth_generate(const SynthConfig& cfg);

io::Json synth_config_to_json(const SynthConfig& cfg);
/// Missing keys keep their defaults.
SynthConfig synth_config_from_json(const io::Json& doc);

}  // namespace spotkit
