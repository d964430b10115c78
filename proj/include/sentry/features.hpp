#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "sentry/track.hpp"

namespace sentry {

struct FeatureVector {
  double d_t = 0.0;          // suspect-target distance, m
  double d_pn = 0.0;         // nearest potential-destination distance, m
  double inefficiency = 1.0; // >= 1, clamped to the configured cap
  double speed = 0.0;        // m/s
  double heading = 0.0;      // radians in [-pi, pi); 0 when stationary
  Position position;
};

struct HostilityScore {
  ObjectId object_id = 0;
  double p = 0.0;  // in [0,1]
  double timestamp = 0.0;
};

// Bias + one weight per bounded feature transform.
struct ScorerWeights {
  double w0 = -1.0;  // bias
  double w1 = 2.0;   // exp(-d_t/s1)
  double w2 = 1.0;   // exp(-d_pn/s2)
  double w3 = 2.0;   // (I - 1)
};

struct FeatureScales {
  double s1 = 50.0;  // m
  double s2 = 50.0;  // m
};

// Normalization constants for the classifier attribute vector.
struct AttributeParams {
  double area_width = 1000.0;
  double area_height = 1000.0;
  double v_ref = 15.0;       // m/s
  double s1 = 50.0;          // m
  double cap = 100.0;        // inefficiency clamp
};

inline constexpr std::size_t kAttributesPerObject = 7;
inline constexpr double kDistanceEpsilon = 1e-6;  // m

double suspect_target_distance(const Position& suspect, const Position& target);

// Minimum distance over a non-empty destination set.
// Throws std::invalid_argument when the set is empty.
double suspect_destination_distance(const Position& suspect, std::span<const Position> destinations);

// Path length since zone entry over straight-line distance from the entry
// point; clamped to [1, cap]. Returns exactly 1 when both numerator and
// denominator fall below kDistanceEpsilon.
double inefficiency_index(const Track& track, const ZoneEntry& entry, double cap = 100.0);

// p = logistic(w0 + w1*exp(-d_t/s1) + w2*exp(-d_pn/s2) + w3*(I-1))
HostilityScore analytic_hostility(ObjectId id, double timestamp, const FeatureVector& f,
                                  const ScorerWeights& w, const FeatureScales& scales);

// True iff mean speed over the trailing window exceeds the limit.
// Throws std::invalid_argument when the window holds < 2 samples.
bool speed_violation_template(const Track& track, double limit, double window);

// Instantaneous speed/heading from the last track segment; zero-speed
// convention gives heading 0.
FeatureVector compute_features(const Track& track, const Position& target,
                               std::span<const Position> destinations,
                               const std::optional<ZoneEntry>& entry, double cap);

// Fixed-order normalized attribute list for one object:
// [x/W, y/H, min(speed/v_ref,1), sin(h), cos(h), exp(-d_t/s1), (min(I,cap)-1)/(cap-1)]
// Every component lies in [-1, 1]; the I slot is 0 without a zone entry.
std::array<double, kAttributesPerObject> attributes(const FeatureVector& f, bool has_entry,
                                                    const AttributeParams& params);

}  // namespace sentry
