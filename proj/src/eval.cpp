#include "spotkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "spotkit/error.hpp"
#include "spotkit/suppress.hpp"

namespace spotkit {

namespace {

struct GameEntry {
  std::string game_id;
  const GameDetections* detections = nullptr;  // null: labelled but never detected
  std::vector<std::vector<double>> gt_times;   // per class, ascending
};

// Games in canonical (game_id) order with ground truth bucketed by class.
std::vector<GameEntry> index_games(std::span<const GameDetections> detections,
                                   std::span<const AnnotationSet> labels, std::size_t num_classes) {
  std::unordered_map<std::string, std::size_t> by_id;
  std::vector<GameEntry> games;
  for (const auto& set : labels) {
    if (!by_id.emplace(set.game_id, games.size()).second) {
      throw Error("duplicate labels for game '" + set.game_id + "'");
    }
    GameEntry entry{set.game_id, nullptr, std::vector<std::vector<double>>(num_classes)};
    for (const auto& ev : set.events) {
      if (ev.class_index < 0 || static_cast<std::size_t>(ev.class_index) >= num_classes) {
        std::ostringstream msg;
        msg << "game '" << set.game_id << "': event class " << ev.class_index << " out of range";
        throw Error(msg.str());
      }
      if (!std::isfinite(ev.time) || ev.time < 0.0) {
        throw Error("game '" + set.game_id + "': event time must be finite and >= 0");
      }
      entry.gt_times[static_cast<std::size_t>(ev.class_index)].push_back(ev.time);
    }
    for (auto& times : entry.gt_times) std::sort(times.begin(), times.end());
    games.push_back(std::move(entry));
  }
  for (const auto& game : detections) {
    const auto it = by_id.find(game.game_id);
    if (it == by_id.end()) throw Error("no labels for game '" + game.game_id + "'");
    auto& entry = games[it->second];
    if (entry.detections != nullptr) {
      throw Error("duplicate detections for game '" + game.game_id + "'");
    }
    if (game.per_class.size() != num_classes) {
      std::ostringstream msg;
      msg << "game '" << game.game_id << "': " << game.per_class.size()
          << " detection classes, expected " << num_classes;
      throw Error(msg.str());
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      for (const auto& d : game.per_class[c]) {
        if (d.class_index != static_cast<int>(c) || !std::isfinite(d.time) ||
            !std::isfinite(d.confidence)) {
          std::ostringstream msg;
          msg << "game '" << game.game_id << "': malformed detection in class " << c;
          throw Error(msg.str());
        }
      }
    }
    entry.detections = &game;
  }
  std::sort(games.begin(), games.end(),
            [](const GameEntry& a, const GameEntry& b) { return a.game_id < b.game_id; });
  return games;
}

std::size_t class_ground_truth(const std::vector<GameEntry>& games, std::size_t c) {
  std::size_t n = 0;
  for (const auto& g : games) n += g.gt_times[c].size();
  return n;
}

// Matches each game separately, then ranks the pooled detections.
double class_ap(const std::vector<GameEntry>& games, std::size_t c, double delta) {
  struct Ranked {
    double confidence;
    double time;
    std::size_t game;
    std::size_t pos;
    bool tp;
  };
  std::vector<Ranked> pooled;
  std::size_t num_gt = 0;
  for (std::size_t g = 0; g < games.size(); ++g) {
    const auto& gts = games[g].gt_times[c];
    num_gt += gts.size();
    if (games[g].detections == nullptr) continue;
    const MatchResult m = match_detections(games[g].detections->per_class[c], gts, delta);
    for (std::size_t k = 0; k < m.true_positive.size(); ++k) {
      pooled.push_back({m.confidences[k], m.times[k], g, k, m.true_positive[k]});
    }
  }
  std::sort(pooled.begin(), pooled.end(), [](const Ranked& a, const Ranked& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.time != b.time) return a.time < b.time;
    if (a.game != b.game) return a.game < b.game;
    return a.pos < b.pos;
  });
  MatchResult merged;
  merged.num_ground_truth = num_gt;
  merged.true_positive.reserve(pooled.size());
  for (const auto& r : pooled) {
    merged.true_positive.push_back(r.tp);
    merged.confidences.push_back(r.confidence);
    merged.times.push_back(r.time);
    merged.matched += r.tp ? 1 : 0;
  }
  return average_precision(merged);
}

double mean_of_present(const std::vector<std::optional<double>>& ap) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : ap) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

void require_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error("tolerance delta must be positive, got " + std::to_string(delta));
  }
}

}  // namespace

MatchResult match_detections(std::span<const Detection> detections,
                             std::span<const double> ground_truth_times, double delta) {
  require_delta(delta);
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranks_before(detections[a], a, detections[b], b);
  });

  std::vector<double> gts(ground_truth_times.begin(), ground_truth_times.end());
  std::sort(gts.begin(), gts.end());
  std::vector<bool> taken(gts.size(), false);
  const double radius = delta / 2.0;

  MatchResult result;
  result.num_ground_truth = gts.size();
  result.true_positive.reserve(order.size());
  for (const std::size_t i : order) {
    const double t = detections[i].time;
    std::size_t best = gts.size();
    double best_distance = 0.0;
    auto it = std::lower_bound(gts.begin(), gts.end(), t - radius - 1e-9 * (1.0 + radius));
    for (; it != gts.end() && *it <= t + radius + 1e-9 * (1.0 + radius); ++it) {
      const auto g = static_cast<std::size_t>(it - gts.begin());
      const double distance = std::abs(t - *it);
      if (taken[g] || distance > radius) continue;
      if (best == gts.size() || distance < best_distance) {
        best = g;
        best_distance = distance;
      }
    }
    const bool tp = best != gts.size();
    if (tp) {
      taken[best] = true;
      ++result.matched;
    }
    result.true_positive.push_back(tp);
    result.confidences.push_back(detections[i].confidence);
    result.times.push_back(t);
  }
  return result;
}

double average_precision(const MatchResult& match) {
  const std::size_t n = match.true_positive.size();
  if (match.num_ground_truth == 0 || n == 0) return 0.0;
  std::vector<double> precision(n);
  std::size_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    tp += match.true_positive[k] ? 1 : 0;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  for (std::size_t k = n - 1; k-- > 0;) precision[k] = std::max(precision[k], precision[k + 1]);

  // Recall grows by 1 / num_gt at every true positive.
  double area = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (match.true_positive[k]) area += precision[k];
  }
  return area / static_cast<double>(match.num_ground_truth);
}

ToleranceResult map_at_tolerance(std::span<const GameDetections> detections,
                                 std::span<const AnnotationSet> labels, std::size_t num_classes,
                                 double delta, Execution exec) {
  require_delta(delta);
  const auto games = index_games(detections, labels, num_classes);
  ToleranceResult result{delta, std::vector<std::optional<double>>(num_classes), 0.0};
  bool any = false;
  for (std::size_t c = 0; c < num_classes; ++c) any = any || class_ground_truth(games, c) > 0;
  if (!any) throw Error("no class has any ground truth");

  for_each_index(num_classes, exec, [&](std::size_t c) {
    if (class_ground_truth(games, c) > 0) result.ap[c] = class_ap(games, c, delta);
  });
  result.map = mean_of_present(result.ap);
  return result;
}

EvalReport average_map(std::span<const GameDetections> detections,
                       std::span<const AnnotationSet> labels,
                       const std::vector<std::string>& class_names,
                       const ToleranceSchedule& schedule, Execution exec) {
  const std::size_t num_classes = class_names.size();
  if (num_classes == 0) throw Error("evaluation needs at least one class");
  for (const auto& game : detections) {
    if (game.class_names != class_names) {
      throw Error("game '" + game.game_id + "': class names differ from the evaluation classes");
    }
  }
  const auto games = index_games(detections, labels, num_classes);

  EvalReport report;
  report.class_names = class_names;
  report.schedule_name = schedule.name();
  report.num_games = games.size();
  for (const auto& game : detections) report.num_detections += game.size();
  for (std::size_t c = 0; c < num_classes; ++c) {
    const std::size_t n = class_ground_truth(games, c);
    report.num_ground_truth += n;
    if (n == 0) report.excluded_classes.push_back(static_cast<int>(c));
  }
  if (report.excluded_classes.size() == num_classes) throw Error("no class has any ground truth");

  const auto deltas = schedule.deltas();
  report.tolerances.resize(deltas.size());
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    report.tolerances[k].delta = deltas[k];
    report.tolerances[k].ap.resize(num_classes);
  }
  std::vector<std::size_t> present;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (class_ground_truth(games, c) > 0) present.push_back(c);
  }
  const std::size_t jobs = deltas.size() * present.size();
  for_each_index(jobs, exec, [&](std::size_t job) {
    const std::size_t k = job / present.size();
    const std::size_t c = present[job % present.size()];
    report.tolerances[k].ap[c] = class_ap(games, c, deltas[k]);
  });

  double sum = 0.0;
  for (auto& tol : report.tolerances) {
    tol.map = mean_of_present(tol.ap);
    sum += tol.map;
  }
  report.average_map = sum / static_cast<double>(deltas.size());
  return report;
}

}  // namespace spotkit
