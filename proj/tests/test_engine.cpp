#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vendor/doctest.h"

#include <algorithm>

#include "sentry/engine.hpp"
#include "sentry/report.hpp"

using namespace sentry;

namespace {

EngineConfig small_config() {
  EngineConfig cfg;
  cfg.target = {500, 500};
  cfg.target_zone = Circle{{500, 500}, 200.0};
  cfg.max_objects = 4;
  cfg.theta = 0.7;
  cfg.gate = 60.0;
  return cfg;
}

Frame frame_at(double t, std::initializer_list<Position> positions) {
  Frame f;
  f.timestamp = t;
  for (const auto& p : positions) f.blips.push_back({p, t});
  return f;
}

// Frames for one object walking a straight line.
std::vector<Frame> beeline_frames(Position from, Position to, int n) {
  std::vector<Frame> frames;
  for (int k = 0; k < n; ++k) {
    const double f = static_cast<double>(k) / (n - 1);
    frames.push_back(frame_at(k, {{from.x + f * (to.x - from.x), from.y + f * (to.y - from.y)}}));
  }
  return frames;
}

}  // namespace

TEST_CASE("empty frame advances time and emits nothing") {
  Engine engine(small_config(), Mlp(4 * kAttributesPerObject, 8, 4));
  Frame f;
  f.timestamp = 1.0;
  CHECK(engine.step(f).empty());
  Frame g;
  g.timestamp = 2.0;
  CHECK(engine.step(g).empty());
}

TEST_CASE("out-of-order frame is an error") {
  Engine engine(small_config(), Mlp(4 * kAttributesPerObject, 8, 4));
  engine.step(frame_at(5.0, {}));
  CHECK_THROWS_AS(engine.step(frame_at(5.0, {}), nullptr), std::invalid_argument);
  CHECK_THROWS_AS(engine.step(frame_at(4.0, {}), nullptr), std::invalid_argument);
}

TEST_CASE("objects outside the target zone are never scored") {
  // A network biased to fire on everything: only zone gating can hold it back.
  auto cfg = small_config();
  Mlp hot(4 * kAttributesPerObject, 8, 4);
  for (std::size_t i = 0; i < hot.params().size(); ++i) hot.params()[i] = 0.0;
  // Large positive output biases.
  for (std::size_t i = hot.params().size() - 4; i < hot.params().size(); ++i) hot.params()[i] = 10.0;

  Engine engine(cfg, std::move(hot));
  // Object stays far outside the 200 m zone.
  for (int t = 0; t < 10; ++t) {
    const auto events = engine.step(frame_at(t, {{50.0 + t, 50.0}}));
    CHECK(events.empty());
  }
  const auto report = engine.run({}, nullptr);
  CHECK(report.scores.empty());
}

TEST_CASE("in-zone object above theta alerts once per visit") {
  auto cfg = small_config();
  Mlp hot(4 * kAttributesPerObject, 8, 4);
  for (std::size_t i = hot.params().size() - 4; i < hot.params().size(); ++i) hot.params()[i] = 10.0;

  Engine engine(cfg, std::move(hot));
  std::vector<AlertEvent> neural;
  for (int t = 0; t < 8; ++t) {
    // Inside the zone the whole time.
    for (const auto& ev : engine.step(frame_at(t, {{450.0 + t, 500.0}})))
      if (ev.source == AlertSource::neural) neural.push_back(ev);
  }
  CHECK(neural.size() == 1);
  CHECK(neural[0].timestamp == 0.0);
  CHECK(neural[0].p > cfg.theta);
}

TEST_CASE("re-entry re-arms the alert") {
  auto cfg = small_config();
  cfg.gate = 600.0;  // keep identity across the long exit hop
  cfg.coast_limit = 50;
  Mlp hot(4 * kAttributesPerObject, 8, 4);
  for (std::size_t i = hot.params().size() - 4; i < hot.params().size(); ++i) hot.params()[i] = 10.0;

  Engine engine(cfg, std::move(hot));
  std::size_t neural = 0;
  const std::vector<Position> path{{450, 500}, {460, 500}, {900, 500}, {910, 500}, {450, 500}};
  for (std::size_t t = 0; t < path.size(); ++t)
    for (const auto& ev : engine.step(frame_at(static_cast<double>(t), {path[t]})))
      if (ev.source == AlertSource::neural) ++neural;
  CHECK(neural == 2);  // one per zone visit
}

TEST_CASE("step determinism: same frames give identical event streams") {
  auto run_once = [] {
    Engine engine(small_config(), Mlp::random(4 * kAttributesPerObject, 8, 4, 7));
    const auto frames = beeline_frames({900, 500}, {500, 500}, 20);
    const auto report = engine.run(frames, nullptr);
    return event_stream(report);
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("miss triggers online retraining; replay then alerts in time") {
  auto cfg = small_config();
  cfg.retrain.learning_rate = 0.5;
  cfg.retrain_target_loss = 0.02;
  cfg.retrain_max_steps = 2000;

  const auto frames = beeline_frames({900, 500}, {500, 500}, 19);  // act at the end
  const double act_time = frames.back().timestamp;
  const Position act_pos = frames.back().blips[0].position;
  TruthOracle oracle = [&](double t_prev, double t_now) {
    std::vector<ActReport> acts;
    if (t_prev < act_time && act_time <= t_now) acts.push_back({act_pos, act_time});
    return acts;
  };

  // Untrained network: outputs hover near 0.5, below theta, so the act is missed.
  Mlp model(4 * kAttributesPerObject, 8, 4);
  Engine first(cfg, model);
  const auto report = first.run(frames, oracle);
  REQUIRE(report.misses.size() == 1);
  CHECK(std::none_of(report.alerts.begin(), report.alerts.end(),
                     [](const AlertEvent& a) { return a.source == AlertSource::neural; }));
  CHECK_FALSE(report.misses[0].first_alert_time.has_value());

  // From-start replay with the updated model alerts at or before the act.
  Engine second(cfg, first.model());
  const auto replay = second.run(frames, oracle);
  const auto it = std::find_if(replay.alerts.begin(), replay.alerts.end(),
                               [](const AlertEvent& a) { return a.source == AlertSource::neural; });
  REQUIRE(it != replay.alerts.end());
  CHECK(it->timestamp <= act_time);
  CHECK(replay.misses.empty());
}

TEST_CASE("analytic and template baselines carry distinct source tags") {
  auto cfg = small_config();
  cfg.speed_limit = 5.0;
  cfg.speed_window = 5.0;
  // Neural path silent (large negative output bias).
  Mlp cold(4 * kAttributesPerObject, 8, 4);
  for (std::size_t i = cold.params().size() - 4; i < cold.params().size(); ++i) cold.params()[i] = -10.0;

  Engine engine(cfg, std::move(cold));
  // Fast beeline into the zone: triggers both the analytic scorer (small d_t,
  // I near 1) and the speed template (40 m/s >> 5 m/s).
  const auto frames = beeline_frames({900, 500}, {500, 500}, 11);
  const auto report = engine.run(frames, nullptr);

  bool saw_analytic = false, saw_template = false, saw_neural = false;
  for (const auto& a : report.alerts) {
    saw_analytic |= a.source == AlertSource::analytic;
    saw_template |= a.source == AlertSource::speed_template;
    saw_neural |= a.source == AlertSource::neural;
  }
  CHECK(saw_analytic);
  CHECK(saw_template);
  CHECK_FALSE(saw_neural);
}

TEST_CASE("run report round-trips through json and the event stream is stable") {
  Engine engine(small_config(), Mlp::random(4 * kAttributesPerObject, 8, 4, 3));
  const auto frames = beeline_frames({900, 500}, {520, 500}, 15);
  RunArtifacts artifacts;
  artifacts.report = engine.run(frames, nullptr);
  artifacts.model_path = "model.txt";
  artifacts.frames_path = "frames.jsonl";
  artifacts.config_path = "config.json";
  artifacts.theta = 0.7;
  artifacts.seed = 5;

  const auto text = run_to_json(artifacts);
  const auto back = run_from_json(text);
  CHECK(event_stream(back.report) == event_stream(artifacts.report));
  CHECK(run_to_json(back) == text);
  // Per-frame scores travel in the sibling CSV, not the report json.
  CHECK(back.scores_csv == artifacts.scores_csv);
}
