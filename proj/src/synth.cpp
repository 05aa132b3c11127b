#include "spotkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "spotkit/error.hpp"
#include "spotkit/parallel.hpp"

namespace spotkit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// std::mt19937_64 is fully specified by the standard; the std distributions
// are not, so the transforms are spelled out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (cosine branch only).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<double> place_events(Rng& rng, const SynthConfig& cfg) {
  std::vector<double> times;
  const int max_attempts = 1000 * std::max(cfg.events_per_class, 1);
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(times.size()) < cfg.events_per_class;
       ++attempt) {
    const double t = rng.uniform() * cfg.duration;
    const bool clear = std::none_of(times.begin(), times.end(), [&](double other) {
      return std::abs(other - t) < cfg.min_separation;
    });
    if (clear) times.push_back(t);
  }
  if (static_cast<int>(times.size()) < cfg.events_per_class) {
    throw Error("synth: cannot place " + std::to_string(cfg.events_per_class) +
                " events per class with min_separation " + std::to_string(cfg.min_separation));
  }
  std::sort(times.begin(), times.end());
  return times;
}

double nearest(const std::vector<double>& sorted, double t) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  if (it == sorted.begin()) return *it;
  if (it == sorted.end()) return sorted.back();
  return (t - *(it - 1) <= *it - t) ? *(it - 1) : *it;
}

void generate_game(const SynthConfig& cfg, std::size_t g, AnnotationSet& labels,
                   ScoreStream& stream) {
  const auto game = static_cast<std::uint64_t>(g);
  Rng event_rng(splitmix64(cfg.seed + 0x632BE59BD9B4E019ULL * game));
  const std::uint64_t output_seed = cfg.noise_seed.value_or(cfg.seed ^ 0xD1B54A32D192ED03ULL);
  Rng rng(splitmix64(splitmix64(output_seed) + 0x632BE59BD9B4E019ULL * game));
  const std::size_t num_classes = cfg.classes.size();
  const auto rows = static_cast<std::size_t>(std::floor(cfg.duration * cfg.fps + 1e-9)) + 1;
  const double width = cfg.side_lobe_width;

  char id[32];
  std::snprintf(id, sizeof id, "game_%04zu", g);

  std::vector<std::vector<double>> events(num_classes);
  for (auto& times : events) times = place_events(event_rng, cfg);
  std::vector<std::vector<double>> peaks(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (const double e : events[c]) {
      peaks[c].push_back(std::clamp(e + cfg.jitter * rng.normal(), 0.0, cfg.duration));
    }
  }

  // Triangular peak of height 1 reaching zero at side_lobe_width.
  Matrix conf(rows, num_classes, 0.0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (const double p : peaks[c]) {
      const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil((p - width) * cfg.fps)));
      for (std::size_t i = lo; i < rows; ++i) {
        const double a = static_cast<double>(i) / cfg.fps;
        if (a - p >= width) break;
        conf(i, c) = std::max(conf(i, c), 1.0 - std::abs(a - p) / width);
      }
    }
  }
  if (cfg.noise > 0.0) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t c = 0; c < num_classes; ++c) {
        const double v = (1.0 - cfg.noise) * conf(i, c) + cfg.noise * rng.uniform();
        conf(i, c) = std::clamp(v, 0.0, 1.0);
      }
    }
  }

  stream.game_id = id;
  stream.class_names = cfg.classes;
  stream.fps = cfg.fps;
  stream.confidences = std::move(conf);
  if (cfg.displacements) {
    Matrix disp(rows, num_classes, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      const double a = static_cast<double>(i) / cfg.fps;
      for (std::size_t c = 0; c < num_classes; ++c) {
        if (events[c].empty()) continue;
        double d = nearest(events[c], a) - a;
        if (cfg.displacement_noise > 0.0) d += cfg.displacement_noise * rng.normal();
        disp(i, c) = std::clamp(d, -width, width);
      }
    }
    stream.displacements = std::move(disp);
  }

  labels.game_id = id;
  labels.duration = cfg.duration;
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (const double e : events[c]) labels.events.push_back({static_cast<int>(c), e});
  }
  std::sort(labels.events.begin(), labels.events.end(), [](const Event& a, const Event& b) {
    return a.time != b.time ? a.time < b.time : a.class_index < b.class_index;
  });
}

}  // namespace

void SynthConfig::validate() const {
  if (num_games < 1) throw Error("synth: num_games must be >= 1");
  if (!(duration > 0.0)) throw Error("synth: duration must be positive");
  if (classes.empty()) throw Error("synth: at least one class is required");
  if (events_per_class < 0) throw Error("synth: events_per_class must be >= 0");
  if (!(min_separation >= 0.0)) throw Error("synth: min_separation must be >= 0");
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error("synth: noise must lie in [0, 1]");
  if (!(jitter >= 0.0)) throw Error("synth: jitter must be >= 0");
  if (!(displacement_noise >= 0.0)) throw Error("synth: displacement_noise must be >= 0");
  if (!(fps > 0.0)) throw Error("synth: fps must be positive");
  if (!(side_lobe_width > 0.0)) throw Error("synth: side_lobe_width must be positive");
}

SynthData synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  const auto games = static_cast<std::size_t>(cfg.num_games);
  SynthData data;
  data.labels.resize(games);
  data.streams.resize(games);
  for_each_index(games, Execution::parallel,
                 [&](std::size_t g) { generate_game(cfg, g, data.labels[g], data.streams[g]); });
  return data;
}

io::Json synth_config_to_json(const SynthConfig& cfg) {
  io::Json doc = {{"seed", cfg.seed},
          {"num_games", cfg.num_games},
          {"duration", cfg.duration},
          {"classes", cfg.classes},
          {"events_per_class", cfg.events_per_class},
          {"min_separation", cfg.min_separation},
          {"noise", cfg.noise},
          {"jitter", cfg.jitter},
          {"displacement_noise", cfg.displacement_noise},
          {"fps", cfg.fps},
          {"side_lobe_width", cfg.side_lobe_width},
          {"displacements", cfg.displacements}};
  doc["noise_seed"] = cfg.noise_seed ? io::Json(*cfg.noise_seed) : io::Json(nullptr);
  return doc;
}

SynthConfig synth_config_from_json(const io::Json& doc) {
  if (!doc.is_object()) throw Error("synth config must be a JSON object");
  SynthConfig cfg;
  try {
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.num_games = doc.value("num_games", cfg.num_games);
    cfg.duration = doc.value("duration", cfg.duration);
    cfg.classes = doc.value("classes", cfg.classes);
    cfg.events_per_class = doc.value("events_per_class", cfg.events_per_class);
    cfg.min_separation = doc.value("min_separation", cfg.min_separation);
    cfg.noise = doc.value("noise", cfg.noise);
    cfg.jitter = doc.value("jitter", cfg.jitter);
    cfg.displacement_noise = doc.value("displacement_noise", cfg.displacement_noise);
    cfg.fps = doc.value("fps", cfg.fps);
    cfg.side_lobe_width = doc.value("side_lobe_width", cfg.side_lobe_width);
    cfg.displacements = doc.value("displacements", cfg.displacements);
    if (const auto it = doc.find("noise_seed"); it != doc.end() && !it->is_null()) {
      cfg.noise_seed = it->get<std::uint64_t>();
    }
  } catch (const io::Json::exception& e) {
    throw Error(std::string("synth config: ") + e.what());
  }
  for (const auto& [key, value] : doc.items()) {
    if (!synth_config_to_json(SynthConfig{}).contains(key)) {
      throw Error("synth config: unknown key \"" + key + "\"");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace spotkit
