#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sentry/features.hpp"
#include "sentry/mlp.hpp"
#include "sentry/track.hpp"

namespace sentry {

struct ScenarioConfig {
  double area_width = 1000.0;   // m
  double area_height = 1000.0;  // m
  Position target{500.0, 500.0};
  Zone target_zone = Circle{{500.0, 500.0}, 200.0};
  Zone suspect_zone = Circle{{500.0, 500.0}, 350.0};
  std::size_t n_benign = 3;
  std::size_t n_hostile = 1;
  double w_transit = 0.5;    // benign behavior mix
  double w_loiter = 0.5;
  double w_direct = 0.5;     // hostile behavior mix
  double w_deceptive = 0.5;
  double noise_sigma = 0.0;  // m
  double dt = 1.0;           // s
  double duration = 60.0;    // s
  double act_radius = 15.0;  // m
  double drop_prob = 0.0;    // per-blip dropout
  std::uint64_t seed = 1;
};

// Throws std::invalid_argument on invariant violations.
void validate(const ScenarioConfig& cfg);

// Flat "key = value" text and equivalent JSON.
std::string scenario_to_text(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_text(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(const std::string& text);

struct TruthObject {
  ObjectId id = 0;
  bool hostile = false;
  std::vector<TrackSample> trajectory;     // noiseless
  std::optional<double> act_time;          // hostile objects only
};

struct GroundTruth {
  std::vector<TruthObject> objects;
  // Per frame: blip index -> true object id (a bijection onto the frame's blips).
  std::vector<std::vector<ObjectId>> correspondence;
};

// Deterministic given cfg.seed. Benign objects transit or loiter; hostile
// objects approach the target directly or via a waypoint meander.
std::pair<std::vector<Frame>, GroundTruth> generate(const ScenarioConfig& cfg);

// Earliest time the true trajectory comes within act_radius of the target.
// Throws std::out_of_range for an unknown id.
std::optional<double> act_of_hostility(const GroundTruth& truth, ObjectId id,
                                       const Position& target, double act_radius);

struct LabelParams {
  std::size_t max_objects = 8;
  AttributeParams attrs;
  Zone target_zone = Circle{{500.0, 500.0}, 200.0};
  Position target{500.0, 500.0};
  std::vector<Position> destinations;  // defaults to {target} when empty
};

// One example per frame with at least one object inside the target zone.
// Slots are ordered by ascending true object id; the mask marks objects
// present in that frame. Built from ground-truth trajectories.
std::vector<LabeledExample> label_examples(const std::vector<Frame>& frames,
                                           const GroundTruth& truth, const LabelParams& params);

// Ground-truth wire format (JSONL): one {"type":"object",...} line per object
// followed by a single {"type":"correspondence",...} line.
std::string truth_to_jsonl(const GroundTruth& truth);
GroundTruth truth_from_jsonl(const std::string& text);

}  // namespace sentry
