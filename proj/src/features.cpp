#include "sentry/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sentry/mlp.hpp"

namespace sentry {

double suspect_target_distance(const Position& suspect, const Position& target) {
  return distance(suspect, target);
}

double suspect_destination_distance(const Position& suspect,
                                    std::span<const Position> destinations) {
  if (destinations.empty())
    throw std::invalid_argument("suspect_destination_distance: empty destination set");
  double best = distance(suspect, destinations[0]);
  for (std::size_t i = 1; i < destinations.size(); ++i)
    best = std::min(best, distance(suspect, destinations[i]));
  return best;
}

double inefficiency_index(const Track& track, const ZoneEntry& entry, double cap) {
  if (cap < 1.0) throw std::invalid_argument("inefficiency_index: cap must be >= 1");
  const double actual = path_length(track, entry.entry_time);
  const double shortest = distance(entry.entry_point, track.latest().position);
  if (actual < kDistanceEpsilon && shortest < kDistanceEpsilon) return 1.0;
  const double ratio = actual / std::max(shortest, kDistanceEpsilon);
  return std::clamp(ratio, 1.0, cap);
}

HostilityScore analytic_hostility(ObjectId id, double timestamp, const FeatureVector& f,
                                  const ScorerWeights& w, const FeatureScales& scales) {
  if (!(scales.s1 > 0.0) || !(scales.s2 > 0.0))
    throw std::invalid_argument("analytic_hostility: scales must be positive");
  const double net = w.w0 + w.w1 * std::exp(-f.d_t / scales.s1) +
                     w.w2 * std::exp(-f.d_pn / scales.s2) + w.w3 * (f.inefficiency - 1.0);
  return {id, logistic(net), timestamp};
}

bool speed_violation_template(const Track& track, double limit, double window) {
  if (!(window > 0.0)) throw std::invalid_argument("speed_violation_template: window must be > 0");
  if (track.history.empty()) throw std::invalid_argument("speed_violation_template: empty track");
  const double t_end = track.history.back().timestamp;
  const double t_start = t_end - window;

  std::size_t first = track.history.size();
  for (std::size_t i = 0; i < track.history.size(); ++i) {
    if (track.history[i].timestamp >= t_start) { first = i; break; }
  }
  if (track.history.size() - first < 2)
    throw std::invalid_argument("speed_violation_template: fewer than 2 samples in window");

  double dist = 0.0;
  for (std::size_t i = first + 1; i < track.history.size(); ++i)
    dist += distance(track.history[i - 1].position, track.history[i].position);
  const double elapsed = t_end - track.history[first].timestamp;
  if (!(elapsed > 0.0)) throw std::invalid_argument("speed_violation_template: zero elapsed time");
  return dist / elapsed > limit;
}

FeatureVector compute_features(const Track& track, const Position& target,
                               std::span<const Position> destinations,
                               const std::optional<ZoneEntry>& entry, double cap) {
  FeatureVector f;
  const auto& current = track.latest();
  f.position = current.position;
  f.d_t = suspect_target_distance(current.position, target);
  f.d_pn = destinations.empty() ? f.d_t : suspect_destination_distance(current.position, destinations);
  f.inefficiency = entry ? inefficiency_index(track, *entry, cap) : 1.0;

  if (track.history.size() >= 2) {
    const auto& prev = track.history[track.history.size() - 2];
    const double dt = current.timestamp - prev.timestamp;
    const double dx = current.position.x - prev.position.x;
    const double dy = current.position.y - prev.position.y;
    const double d = std::hypot(dx, dy);
    f.speed = d / dt;
    f.heading = d < kDistanceEpsilon ? 0.0 : std::atan2(dy, dx);
    if (f.heading >= 3.141592653589793) f.heading = -3.141592653589793;
  }
  return f;
}

std::array<double, kAttributesPerObject> attributes(const FeatureVector& f, bool has_entry,
                                                    const AttributeParams& params) {
  std::array<double, kAttributesPerObject> a{};
  a[0] = std::clamp(f.position.x / params.area_width, 0.0, 1.0);
  a[1] = std::clamp(f.position.y / params.area_height, 0.0, 1.0);
  a[2] = std::clamp(f.speed / params.v_ref, 0.0, 1.0);
  a[3] = f.speed > 0.0 ? std::sin(f.heading) : 0.0;
  a[4] = f.speed > 0.0 ? std::cos(f.heading) : 1.0;
  a[5] = std::exp(-f.d_t / params.s1);
  a[6] = has_entry ? (std::min(f.inefficiency, params.cap) - 1.0) / (params.cap - 1.0) : 0.0;
  return a;
}

}  // namespace sentry
