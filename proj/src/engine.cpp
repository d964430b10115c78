#include "sentry/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace sentry {

std::string to_string(AlertSource s) {
  switch (s) {
    case AlertSource::neural: return "neural";
    case AlertSource::analytic: return "analytic";
    default: return "template";
  }
}

Engine::Engine(EngineConfig config, Mlp model)
    : config_(std::move(config)), model_(std::move(model)),
      tagger_(SomGrid::lattice(config_.som_width, config_.som_height, config_.attrs.area_width,
                               config_.attrs.area_height),
              config_.som, config_.gate, config_.coast_limit) {
  if (!(config_.theta > 0.0 && config_.theta < 1.0))
    throw std::invalid_argument("engine: theta must be in (0,1)");
  if (model_.input_dim() != kAttributesPerObject * config_.max_objects ||
      model_.output_dim() != config_.max_objects)
    throw std::invalid_argument("engine: model dimensions do not match max_objects");
  validate(config_.target_zone);
}

void Engine::attach_truth_labels(const GroundTruth& truth) { truth_ = &truth; }

std::vector<AlertEvent> Engine::step(const Frame& frame, const TruthOracle& oracle) {
  if (last_timestamp_ && frame.timestamp <= *last_timestamp_)
    throw std::invalid_argument("engine: out-of-order frame");
  const double t_prev = last_timestamp_.value_or(-1.0);
  last_timestamp_ = frame.timestamp;

  const Assignment assignment = tagger_.associate(frame);
  for (ObjectId id : assignment.retired) {
    entries_.erase(id);
    alerted_this_visit_.erase(id);
  }

  if (truth_ && frames_processed_ < truth_->correspondence.size()) {
    const auto& ids = truth_->correspondence[frames_processed_];
    for (const auto& [blip, engine_id] : assignment.blip_to_id)
      if (blip < ids.size()) ++truth_votes_[engine_id][ids[blip]];
  }

  // Zone entries and visit bookkeeping for every live id.
  const std::vector<Position> default_dest{config_.target};
  std::span<const Position> dests =
      config_.destinations.empty() ? std::span<const Position>(default_dest)
                                   : std::span<const Position>(config_.destinations);

  std::vector<ObjectId> slot_ids;  // ascending, capped at max_objects
  for (const auto& [id, pos] : tagger_.table().entries) {
    (void)pos;
    if (slot_ids.size() < config_.max_objects) slot_ids.push_back(id);
  }

  std::vector<double> input(model_.input_dim(), 0.0);
  std::vector<std::uint8_t> in_zone(slot_ids.size(), 0);
  std::vector<FeatureVector> feats(slot_ids.size());
  for (std::size_t s = 0; s < slot_ids.size(); ++s) {
    const ObjectId id = slot_ids[s];
    const Track& track = tagger_.track(id);
    auto& entry = entries_[id];
    entry = record_entry(track, config_.target_zone, entry);
    const bool inside = contains(config_.target_zone, track.latest().position);
    if (!inside) alerted_this_visit_[id] = false;  // visit ended, re-arm
    if (inside && entry && !zone_entry_time_.count(id)) zone_entry_time_[id] = entry->entry_time;
    in_zone[s] = inside ? 1 : 0;
    feats[s] = compute_features(track, config_.target, dests, entry, config_.attrs.cap);
    const auto a = attributes(feats[s], entry.has_value(), config_.attrs);
    std::copy(a.begin(), a.end(), input.begin() + s * kAttributesPerObject);
  }

  const auto probs = model_.forward(input);

  std::vector<AlertEvent> events;
  auto emit = [&](ObjectId id, double p, AlertSource source) {
    AlertEvent ev{id, frame.timestamp, p, source};
    events.push_back(ev);
    alerts_.push_back(ev);
  };

  for (std::size_t s = 0; s < slot_ids.size(); ++s) {
    if (!in_zone[s]) continue;  // scoring is gated on zone presence
    const ObjectId id = slot_ids[s];
    const double p = probs[s];
    scores_.push_back({frame.timestamp, id, feats[s], p});
    max_p_[id] = std::max(max_p_.count(id) ? max_p_[id] : 0.0, p);

    if (p > config_.theta && !alerted_this_visit_[id]) {
      alerted_this_visit_[id] = true;
      if (!first_alert_time_.count(id)) first_alert_time_[id] = frame.timestamp;
      emit(id, p, AlertSource::neural);
    }

    // Comparison baselines, tagged by source.
    const auto analytic =
        analytic_hostility(id, frame.timestamp, feats[s], config_.analytic_weights,
                           config_.analytic_scales);
    if (analytic.p > config_.theta) emit(id, analytic.p, AlertSource::analytic);
    const Track& track = tagger_.track(id);
    if (track.history.size() >= 2) {
      try {
        if (speed_violation_template(track, config_.speed_limit, config_.speed_window))
          emit(id, 1.0, AlertSource::speed_template);
      } catch (const std::invalid_argument&) {
        // Not enough history inside the window yet.
      }
    }
  }

  // Step 005/006: check for acts the network failed to flag, retrain on them.
  if (oracle) {
    for (const auto& act : oracle(t_prev, frame.timestamp)) {
      // Map the act position to the nearest tracked id.
      std::optional<ObjectId> actor;
      double best = 0.0;
      for (const auto& [id, pos] : tagger_.table().entries) {
        const double d = distance(pos, act.position);
        if (!actor || d < best) { actor = id; best = d; }
      }
      if (!actor) continue;
      const bool alerted_in_time =
          first_alert_time_.count(*actor) && first_alert_time_[*actor] <= act.act_time;
      if (alerted_in_time) continue;

      MissEvent miss{*actor, act.act_time, std::nullopt};
      if (first_alert_time_.count(*actor)) miss.first_alert_time = first_alert_time_[*actor];
      misses_.push_back(miss);

      // Supervise only the missed object's slot.
      const auto it = std::find(slot_ids.begin(), slot_ids.end(), *actor);
      if (it == slot_ids.end()) continue;
      LabeledExample ex;
      ex.input = input;
      ex.target.assign(config_.max_objects, 0.0);
      ex.mask.assign(config_.max_objects, 0);
      const std::size_t slot = static_cast<std::size_t>(it - slot_ids.begin());
      ex.target[slot] = 1.0;
      ex.mask[slot] = 1;
      const std::vector<LabeledExample> missed{ex};
      model_.retrain_online(missed, replay_buffer_, config_.retrain, config_.retrain_target_loss,
                            config_.retrain_max_steps);
      replay_buffer_.push_back(std::move(ex));
    }
  }

  ++frames_processed_;
  return events;
}

RunReport Engine::run(const std::vector<Frame>& frames, const TruthOracle& oracle) {
  for (const auto& frame : frames) step(frame, oracle);

  RunReport report;
  report.alerts = alerts_;
  report.misses = misses_;
  report.scores = scores_;
  report.frames_processed = frames_processed_;

  // Majority-vote truth labels per engine id, when truth was attached.
  std::map<ObjectId, bool> hostile_by_truth_id;
  if (truth_)
    for (const auto& obj : truth_->objects) hostile_by_truth_id[obj.id] = obj.hostile;

  for (const auto& [id, max_p] : max_p_) {
    RunReport::ObjectRow row;
    row.object_id = id;
    row.max_p = max_p;
    if (first_alert_time_.count(id)) row.first_alert_time = first_alert_time_[id];
    if (zone_entry_time_.count(id)) row.zone_entry_time = zone_entry_time_[id];
    if (truth_ && truth_votes_.count(id)) {
      const auto& votes = truth_votes_[id];
      ObjectId best_truth = 0;
      std::size_t best_votes = 0;
      for (const auto& [tid, n] : votes)
        if (n > best_votes) { best_truth = tid; best_votes = n; }
      if (best_votes > 0) row.hostile = hostile_by_truth_id[best_truth];
    }
    report.objects.push_back(row);
  }
  return report;
}

}  // namespace sentry
