#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentry/features.hpp"
#include "sentry/mlp.hpp"
#include "sentry/simgen.hpp"
#include "sentry/tagger.hpp"
#include "sentry/track.hpp"

namespace sentry {

enum class AlertSource { neural, analytic, speed_template };

std::string to_string(AlertSource s);

struct AlertEvent {
  ObjectId object_id = 0;
  double timestamp = 0.0;
  double p = 0.0;
  AlertSource source = AlertSource::neural;
};

struct MissEvent {
  ObjectId object_id = 0;
  double act_time = 0.0;
  std::optional<double> first_alert_time;
};

// An act of hostility reported by whoever owns ground truth: the true
// position at the act plus its time. The engine maps it to a tracked id.
struct ActReport {
  Position position;
  double act_time = 0.0;
};

// Called with (previous frame time, current frame time); returns acts that
// occurred in that window.
using TruthOracle = std::function<std::vector<ActReport>(double, double)>;

struct EngineConfig {
  Position target{500.0, 500.0};
  Zone target_zone = Circle{{500.0, 500.0}, 200.0};
  std::vector<Position> destinations;  // defaults to {target} when empty
  double theta = 0.7;
  std::size_t max_objects = 8;
  AttributeParams attrs;
  ScorerWeights analytic_weights;
  FeatureScales analytic_scales;
  double speed_limit = 12.0;    // m/s, rule-template baseline
  double speed_window = 10.0;   // s
  double gate = 50.0;           // m, association gate
  int coast_limit = 5;
  std::size_t som_width = 8;
  std::size_t som_height = 8;
  SomParams som;
  // Online retraining on a miss.
  TrainConfig retrain;
  double retrain_target_loss = 0.05;
  std::size_t retrain_max_steps = 500;
};

struct FrameScore {
  double timestamp = 0.0;
  ObjectId object_id = 0;
  FeatureVector features;
  double p = 0.0;
};

struct RunReport {
  std::vector<AlertEvent> alerts;
  std::vector<MissEvent> misses;
  std::vector<FrameScore> scores;
  // Per tracked object: maximum neural score during zone presence, plus the
  // ground-truth hostile label when an oracle-backed truth was supplied.
  struct ObjectRow {
    ObjectId object_id = 0;
    double max_p = 0.0;
    std::optional<bool> hostile;
    std::optional<double> first_alert_time;
    std::optional<double> zone_entry_time;
  };
  std::vector<ObjectRow> objects;
  std::size_t frames_processed = 0;
};

// Runs the detection loop frame by frame: tag, score in-zone objects with
// the network, alert above theta, check the oracle for missed acts, and
// retrain online on a miss. One instance is strictly sequential.
class Engine {
 public:
  Engine(EngineConfig config, Mlp model);

  // Throws std::invalid_argument on an out-of-order frame.
  std::vector<AlertEvent> step(const Frame& frame, const TruthOracle& oracle = nullptr);

  RunReport run(const std::vector<Frame>& frames, const TruthOracle& oracle = nullptr);

  const Mlp& model() const { return model_; }
  const Tagger& tagger() const { return tagger_; }
  const std::vector<MissEvent>& misses() const { return misses_; }
  std::vector<LabeledExample>& replay_buffer() { return replay_buffer_; }

  // Attaches per-object hostile labels by majority vote over the frame
  // correspondence of a ground truth generated alongside the frames.
  void attach_truth_labels(const GroundTruth& truth);

 private:
  EngineConfig config_;
  Mlp model_;
  Tagger tagger_;
  std::map<ObjectId, std::optional<ZoneEntry>> entries_;
  std::map<ObjectId, bool> alerted_this_visit_;
  std::map<ObjectId, double> first_alert_time_;
  std::map<ObjectId, double> max_p_;
  std::map<ObjectId, double> zone_entry_time_;
  std::map<ObjectId, std::map<ObjectId, std::size_t>> truth_votes_;  // engine id -> truth id -> count
  std::map<ObjectId, bool> truth_hostile_;
  std::vector<AlertEvent> alerts_;
  std::vector<MissEvent> misses_;
  std::vector<FrameScore> scores_;
  std::vector<LabeledExample> replay_buffer_;
  std::optional<double> last_timestamp_;
  std::size_t frames_processed_ = 0;
  const GroundTruth* truth_ = nullptr;  // labels only, never consulted for scoring
};

}  // namespace sentry
