#include "spotkit/suppress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "spotkit/error.hpp"

namespace spotkit {

namespace {

void require_single_class(std::span<const Detection> detections) {
  for (const auto& d : detections) {
    if (d.class_index != detections.front().class_index) {
      std::ostringstream msg;
      msg << "suppression input mixes classes " << detections.front().class_index << " and "
          << d.class_index;
      throw Error(msg.str());
    }
  }
}

// Positions sorted by time (then input position), for range scans.
std::vector<std::size_t> order_by_time(std::span<const Detection> detections) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (detections[a].time != detections[b].time) return detections[a].time < detections[b].time;
    return a < b;
  });
  return order;
}

// The scanned range is slightly wider than the radius; the exact boundary
// decision is left to the per-pair test so the result matches a full scan.
std::pair<std::size_t, std::size_t> time_range(std::span<const Detection> detections,
                                               const std::vector<std::size_t>& by_time, double t,
                                               double radius) {
  const double margin = radius * (1.0 + 1e-9) + 1e-12;
  const auto lo = std::lower_bound(by_time.begin(), by_time.end(), t - margin,
                                   [&](std::size_t i, double v) { return detections[i].time < v; });
  const auto hi = std::upper_bound(lo, by_time.end(), t + margin,
                                   [&](double v, std::size_t i) { return v < detections[i].time; });
  return {static_cast<std::size_t>(lo - by_time.begin()),
          static_cast<std::size_t>(hi - by_time.begin())};
}

enum class State : unsigned char { pending, accepted, dropped };

}  // namespace

std::string to_string(SuppressionMethod method) {
  return method == SuppressionMethod::hard ? "hard" : "soft";
}

SuppressionMethod parse_suppression_method(const std::string& text) {
  if (text == "hard") return SuppressionMethod::hard;
  if (text == "soft") return SuppressionMethod::soft;
  throw Error("unknown suppression method '" + text + "' (expected hard or soft)");
}

void SuppressionConfig::validate() const {
  if (!(window > 0.0) || !std::isfinite(window)) throw Error("suppression window must be positive");
  if (!(floor >= 0.0 && floor <= 1.0)) throw Error("suppression floor must lie in [0, 1]");
}

double decay_factor(double t, double s, double window) {
  return std::min(std::abs(s - t) / (window / 2.0), 1.0);
}

std::vector<Detection> soft_nms(std::span<const Detection> detections,
                                const SuppressionConfig& cfg) {
  cfg.validate();
  if (detections.empty()) return {};
  require_single_class(detections);

  const std::size_t n = detections.size();
  std::vector<double> conf(n);
  std::vector<State> state(n, State::pending);
  for (std::size_t i = 0; i < n; ++i) {
    conf[i] = detections[i].confidence;
    if (conf[i] < cfg.floor) state[i] = State::dropped;
  }
  const auto by_time = order_by_time(detections);

  // Lazy max-heap: confidences only decrease, so an entry whose stored value
  // differs from the current one is stale and gets re-pushed.
  struct Entry {
    double confidence;
    std::size_t pos;
  };
  const auto lower = [&](const Entry& a, const Entry& b) {
    Detection da = detections[a.pos];
    Detection db = detections[b.pos];
    da.confidence = a.confidence;
    db.confidence = b.confidence;
    return ranks_before(db, b.pos, da, a.pos);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower)> heap(lower);
  for (std::size_t i = 0; i < n; ++i) {
    if (state[i] == State::pending) heap.push({conf[i], i});
  }

  const double radius = cfg.window / 2.0;
  std::vector<Detection> out;
  while (!heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    if (state[top.pos] != State::pending) continue;
    if (top.confidence != conf[top.pos]) {
      heap.push({conf[top.pos], top.pos});
      continue;
    }
    state[top.pos] = State::accepted;
    const double t = detections[top.pos].time;
    out.push_back({detections[top.pos].class_index, t, conf[top.pos]});

    const auto [lo, hi] = time_range(detections, by_time, t, radius);
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t j = by_time[k];
      if (state[j] != State::pending) continue;
      const double f = decay_factor(t, detections[j].time, cfg.window);
      if (f >= 1.0) continue;
      conf[j] *= f;
      if (conf[j] < cfg.floor) state[j] = State::dropped;
    }
  }
  return out;
}

std::vector<Detection> hard_nms(std::span<const Detection> detections,
                                const SuppressionConfig& cfg) {
  cfg.validate();
  if (detections.empty()) return {};
  require_single_class(detections);

  const std::size_t n = detections.size();
  std::vector<std::size_t> ranked(n);
  std::iota(ranked.begin(), ranked.end(), std::size_t{0});
  std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    return ranks_before(detections[a], a, detections[b], b);
  });
  const auto by_time = order_by_time(detections);

  std::vector<State> state(n, State::pending);
  const double radius = cfg.window / 2.0;
  std::vector<Detection> out;
  for (const std::size_t i : ranked) {
    if (state[i] != State::pending) continue;
    if (detections[i].confidence < cfg.floor) break;
    state[i] = State::accepted;
    out.push_back(detections[i]);
    const double t = detections[i].time;
    const auto [lo, hi] = time_range(detections, by_time, t, radius);
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t j = by_time[k];
      if (state[j] == State::pending && std::abs(detections[j].time - t) < radius) {
        state[j] = State::dropped;
      }
    }
  }
  return out;
}

std::vector<Detection> suppress(std::span<const Detection> detections,
                                const SuppressionConfig& cfg) {
  return cfg.method == SuppressionMethod::hard ? hard_nms(detections, cfg)
                                               : soft_nms(detections, cfg);
}

std::vector<GameDetections> suppress_all(std::span<const GameDetections> games,
                                         const SuppressionConfig& cfg, Execution exec) {
  cfg.validate();
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::vector<GameDetections> out(games.size());
  for (std::size_t g = 0; g < games.size(); ++g) {
    out[g].game_id = games[g].game_id;
    out[g].class_names = games[g].class_names;
    out[g].per_class.resize(games[g].per_class.size());
    for (std::size_t c = 0; c < games[g].per_class.size(); ++c) groups.emplace_back(g, c);
  }
  for_each_index(groups.size(), exec, [&](std::size_t k) {
    const auto [g, c] = groups[k];
    const auto& dets = games[g].per_class[c];
    try {
      for (const auto& d : dets) {
        if (d.class_index != static_cast<int>(c)) {
          std::ostringstream msg;
          msg << "detection of class " << d.class_index << " filed under class " << c;
          throw Error(msg.str());
        }
      }
      out[g].per_class[c] = suppress(dets, cfg);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "game '" << games[g].game_id << "', class " << c << ": " << e.what();
      throw Error(msg.str());
    }
  });
  return out;
}

}  // namespace spotkit
