#include "spotkit/reference/suppress_reference.hpp"

#include <cmath>
#include <sstream>

#include "spotkit/error.hpp"

namespace spotkit::reference {

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

// Index of the best pending detection under the shared ranking, or npos.
std::size_t best_pending(std::span<const Detection> current, const std::vector<bool>& pending) {
  std::size_t best = current.size();
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (!pending[i]) continue;
    if (best == current.size() || ranks_before(current[i], i, current[best], best)) best = i;
  }
  return best;
}

}  // namespace

double decay(DecayKind kind, double t, double s, double window) {
  if (kind == DecayKind::indicator) return std::abs(s - t) < window / 2.0 ? 0.0 : 1.0;
  return decay_factor(t, s, window);
}

std::vector<Detection> soft_nms(std::span<const Detection> detections, const SuppressionConfig& cfg,
                                DecayKind kind) {
  cfg.validate();
  if (detections.empty()) return {};
  require_single_class(detections);

  std::vector<Detection> current(detections.begin(), detections.end());
  std::vector<bool> pending(current.size());
  for (std::size_t i = 0; i < current.size(); ++i) pending[i] = current[i].confidence >= cfg.floor;

  std::vector<Detection> out;
  for (;;) {
    const std::size_t best = best_pending(current, pending);
    if (best == current.size()) break;
    pending[best] = false;
    out.push_back(current[best]);
    for (std::size_t j = 0; j < current.size(); ++j) {
      if (!pending[j]) continue;
      current[j].confidence *= decay(kind, current[best].time, current[j].time, cfg.window);
      if (current[j].confidence < cfg.floor) pending[j] = false;
    }
  }
  return out;
}

std::vector<Detection> hard_nms(std::span<const Detection> detections,
                                const SuppressionConfig& cfg) {
  cfg.validate();
  if (detections.empty()) return {};
  require_single_class(detections);

  std::vector<bool> pending(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    pending[i] = detections[i].confidence >= cfg.floor;
  }
  std::vector<Detection> out;
  for (;;) {
    const std::size_t best = best_pending(detections, pending);
    if (best == detections.size()) break;
    pending[best] = false;
    out.push_back(detections[best]);
    for (std::size_t j = 0; j < detections.size(); ++j) {
      if (pending[j] && std::abs(detections[j].time - detections[best].time) < cfg.window / 2.0) {
        pending[j] = false;
      }
    }
  }
  return out;
}

}  // namespace spotkit::reference
