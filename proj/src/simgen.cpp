#include "sentry/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "vendor/json.hpp"

#include "sentry/rng.hpp"
#include "sentry/textio.hpp"

namespace sentry {

namespace {

double point_segment_distance(const Position& p, const Position& a, const Position& b) {
  const double abx = b.x - a.x, aby = b.y - a.y;
  const double len2 = abx * abx + aby * aby;
  if (len2 == 0.0) return distance(p, a);
  double t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {a.x + t * abx, a.y + t * aby});
}

Position edge_point(Rng& rng, double w, double h) {
  switch (rng.below(4)) {
    case 0: return {rng.uniform(0.0, w), 0.0};
    case 1: return {rng.uniform(0.0, w), h};
    case 2: return {0.0, rng.uniform(0.0, h)};
    default: return {w, rng.uniform(0.0, h)};
  }
}

// Piecewise-linear path traversed at constant speed.
struct PathMotion {
  std::vector<Position> waypoints;
  double speed = 1.0;
  bool hold_at_end = false;  // hold final position vs. disappear

  double total_length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) len += distance(waypoints[i - 1], waypoints[i]);
    return len;
  }

  // Position at time t, or nullopt once the path is exhausted (hold_at_end off).
  std::optional<Position> at(double t) const {
    double remaining = speed * t;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
      const double seg = distance(waypoints[i - 1], waypoints[i]);
      if (remaining <= seg) {
        const double f = seg == 0.0 ? 0.0 : remaining / seg;
        return Position{waypoints[i - 1].x + f * (waypoints[i].x - waypoints[i - 1].x),
                        waypoints[i - 1].y + f * (waypoints[i].y - waypoints[i - 1].y)};
      }
      remaining -= seg;
    }
    if (hold_at_end) return waypoints.back();
    return std::nullopt;
  }
};

struct Loiter {
  Position center;
  double radius = 20.0;
  double omega = 0.2;   // rad/s
  double phase = 0.0;

  Position at(double t) const {
    return {center.x + radius * std::cos(phase + omega * t),
            center.y + radius * std::sin(phase + omega * t)};
  }
};

struct Behavior {
  bool hostile = false;
  bool is_loiter = false;
  PathMotion path;
  Loiter loiter;

  std::optional<Position> at(double t) const {
    if (is_loiter) return loiter.at(t);
    return path.at(t);
  }
};

}  // namespace

void validate(const ScenarioConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("scenario: dt must be > 0");
  if (!(cfg.duration >= cfg.dt)) throw std::invalid_argument("scenario: duration must be >= dt");
  if (!(cfg.act_radius > 0.0)) throw std::invalid_argument("scenario: act_radius must be > 0");
  if (cfg.n_benign + cfg.n_hostile == 0) throw std::invalid_argument("scenario: zero objects");
  if (cfg.noise_sigma < 0.0) throw std::invalid_argument("scenario: noise_sigma must be >= 0");
  if (cfg.drop_prob < 0.0 || cfg.drop_prob >= 1.0)
    throw std::invalid_argument("scenario: drop_prob must be in [0,1)");
  validate(cfg.target_zone);
  validate(cfg.suspect_zone);
  if (!contains(cfg.target_zone, cfg.target) || !contains(cfg.suspect_zone, cfg.target))
    throw std::invalid_argument("scenario: zones must contain the target");
}

std::pair<std::vector<Frame>, GroundTruth> generate(const ScenarioConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  const double clearance = 2.0 * cfg.act_radius;

  std::vector<Behavior> behaviors;
  for (std::size_t i = 0; i < cfg.n_benign; ++i) {
    Behavior b;
    const double wsum = cfg.w_transit + cfg.w_loiter;
    const bool transit = wsum <= 0.0 || rng.uniform() * wsum < cfg.w_transit;
    if (transit) {
      // Straight crossing that keeps clear of the target.
      Position from, to;
      for (int attempt = 0; attempt < 64; ++attempt) {
        from = edge_point(rng, cfg.area_width, cfg.area_height);
        to = edge_point(rng, cfg.area_width, cfg.area_height);
        if (distance(from, to) < 0.25 * cfg.area_width) continue;
        if (point_segment_distance(cfg.target, from, to) > clearance) break;
      }
      b.path.waypoints = {from, to};
      b.path.speed = distance(from, to) / (cfg.duration * rng.uniform(0.7, 1.3));
      b.path.hold_at_end = false;
    } else {
      b.is_loiter = true;
      b.loiter.radius = rng.uniform(10.0, 40.0);
      for (int attempt = 0; attempt < 64; ++attempt) {
        b.loiter.center = {rng.uniform(0.0, cfg.area_width), rng.uniform(0.0, cfg.area_height)};
        if (distance(b.loiter.center, cfg.target) > clearance + b.loiter.radius + 10.0) break;
      }
      b.loiter.omega = rng.uniform(0.05, 0.3);
      b.loiter.phase = rng.uniform(0.0, 6.283185307179586);
    }
    behaviors.push_back(std::move(b));
  }
  for (std::size_t i = 0; i < cfg.n_hostile; ++i) {
    Behavior b;
    b.hostile = true;
    const double wsum = cfg.w_direct + cfg.w_deceptive;
    const bool direct = wsum <= 0.0 || rng.uniform() * wsum < cfg.w_direct;
    const Position spawn = edge_point(rng, cfg.area_width, cfg.area_height);
    b.path.waypoints.push_back(spawn);
    if (!direct) {
      // Meander on an arc around the target inside the suspect zone so the
      // approach shows a detour before the final leg.
      double zone_r = 0.35 * std::min(cfg.area_width, cfg.area_height);
      if (const auto* c = std::get_if<Circle>(&cfg.suspect_zone)) zone_r = c->radius;
      double angle = std::atan2(spawn.y - cfg.target.y, spawn.x - cfg.target.x);
      const double turn = rng.uniform() < 0.5 ? 1.0 : -1.0;
      const std::size_t n_wp = 3 + rng.below(4);
      for (std::size_t k = 0; k < n_wp; ++k) {
        angle += turn * rng.uniform(0.8, 1.6);
        const double r = zone_r * rng.uniform(0.55, 0.9);
        b.path.waypoints.push_back(
            {cfg.target.x + r * std::cos(angle), cfg.target.y + r * std::sin(angle)});
      }
    }
    b.path.waypoints.push_back(cfg.target);
    b.path.hold_at_end = true;
    // Arrive well before the scenario ends so the act is observable.
    const double arrival = cfg.duration * rng.uniform(0.6, 0.9);
    b.path.speed = b.path.total_length() / arrival;
    behaviors.push_back(std::move(b));
  }

  // Shuffle id assignment so hostility never correlates with slot order.
  std::vector<std::size_t> perm(behaviors.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

  GroundTruth truth;
  truth.objects.resize(behaviors.size());
  for (std::size_t slot = 0; slot < perm.size(); ++slot) {
    truth.objects[slot].id = static_cast<ObjectId>(slot + 1);
    truth.objects[slot].hostile = behaviors[perm[slot]].hostile;
  }

  std::vector<Frame> frames;
  const std::size_t n_frames = static_cast<std::size_t>(std::floor(cfg.duration / cfg.dt)) + 1;
  for (std::size_t k = 0; k < n_frames; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    Frame frame;
    frame.timestamp = t;
    std::vector<ObjectId> ids;
    for (std::size_t slot = 0; slot < perm.size(); ++slot) {
      const auto pos = behaviors[perm[slot]].at(t);
      if (!pos) continue;
      truth.objects[slot].trajectory.push_back({t, *pos});
      if (cfg.drop_prob > 0.0 && rng.uniform() < cfg.drop_prob) continue;
      Position noisy = *pos;
      if (cfg.noise_sigma > 0.0) {
        noisy.x += cfg.noise_sigma * rng.gaussian();
        noisy.y += cfg.noise_sigma * rng.gaussian();
      }
      frame.blips.push_back({noisy, t});
      ids.push_back(truth.objects[slot].id);
    }
    // Shuffle blip order so identity is not encoded in arrival order.
    for (std::size_t i = frame.blips.size(); i > 1; --i) {
      const std::size_t j = rng.below(i);
      std::swap(frame.blips[i - 1], frame.blips[j]);
      std::swap(ids[i - 1], ids[j]);
    }
    truth.correspondence.push_back(std::move(ids));
    frames.push_back(std::move(frame));
  }

  for (auto& obj : truth.objects)
    if (obj.hostile) obj.act_time = act_of_hostility(truth, obj.id, cfg.target, cfg.act_radius);

  return {std::move(frames), std::move(truth)};
}

std::optional<double> act_of_hostility(const GroundTruth& truth, ObjectId id,
                                       const Position& target, double act_radius) {
  if (!(act_radius > 0.0)) throw std::invalid_argument("act_of_hostility: act_radius must be > 0");
  for (const auto& obj : truth.objects) {
    if (obj.id != id) continue;
    for (const auto& s : obj.trajectory)
      if (distance(s.position, target) <= act_radius) return s.timestamp;
    return std::nullopt;
  }
  throw std::out_of_range("act_of_hostility: unknown object id");
}

std::vector<LabeledExample> label_examples(const std::vector<Frame>& frames,
                                           const GroundTruth& truth, const LabelParams& params) {
  if (truth.objects.size() > params.max_objects)
    throw std::invalid_argument("label_examples: more objects than classifier slots");
  const std::vector<Position> default_dest{params.target};
  std::span<const Position> dests =
      params.destinations.empty() ? std::span<const Position>(default_dest)
                                  : std::span<const Position>(params.destinations);

  // Slots by ascending true object id.
  std::vector<const TruthObject*> by_id;
  for (const auto& obj : truth.objects) by_id.push_back(&obj);
  std::sort(by_id.begin(), by_id.end(),
            [](const TruthObject* a, const TruthObject* b) { return a->id < b->id; });

  std::vector<Track> prefix(by_id.size());
  std::vector<std::size_t> cursor(by_id.size(), 0);
  std::vector<std::optional<ZoneEntry>> entries(by_id.size());
  for (std::size_t s = 0; s < by_id.size(); ++s) prefix[s].object_id = by_id[s]->id;

  std::vector<LabeledExample> out;
  const std::size_t input_dim = kAttributesPerObject * params.max_objects;
  for (const auto& frame : frames) {
    bool any_in_zone = false;
    LabeledExample ex;
    ex.input.assign(input_dim, 0.0);
    ex.target.assign(params.max_objects, 0.0);
    ex.mask.assign(params.max_objects, 0);

    for (std::size_t s = 0; s < by_id.size(); ++s) {
      const auto& traj = by_id[s]->trajectory;
      auto& cur = cursor[s];
      while (cur < traj.size() && traj[cur].timestamp <= frame.timestamp) {
        prefix[s].append(traj[cur].timestamp, traj[cur].position);
        ++cur;
      }
      if (prefix[s].history.empty() ||
          prefix[s].history.back().timestamp != frame.timestamp)
        continue;  // object absent this frame

      entries[s] = record_entry(prefix[s], params.target_zone, entries[s]);
      const bool in_zone = contains(params.target_zone, prefix[s].latest().position);
      any_in_zone = any_in_zone || in_zone;

      const auto f = compute_features(prefix[s], params.target, dests, entries[s], params.attrs.cap);
      const auto a = attributes(f, entries[s].has_value(), params.attrs);
      std::copy(a.begin(), a.end(), ex.input.begin() + s * kAttributesPerObject);
      ex.mask[s] = 1;
      ex.target[s] = by_id[s]->hostile ? 1.0 : 0.0;
    }
    if (any_in_zone) out.push_back(std::move(ex));
  }
  return out;
}

// --- serialization -------------------------------------------------------

namespace {

std::string zone_to_text(const Zone& zone) {
  if (const auto* c = std::get_if<Circle>(&zone)) {
    return "circle " + format_double(c->center.x) + " " + format_double(c->center.y) + " " +
           format_double(c->radius);
  }
  std::string out = "polygon";
  for (const auto& v : std::get<ConvexPolygon>(zone).vertices)
    out += " " + format_double(v.x) + " " + format_double(v.y);
  return out;
}

Zone zone_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  if (kind == "circle") {
    if (tokens.size() != 3) throw std::runtime_error("zone: circle needs center x y and radius");
    return Circle{{parse_double(tokens[0]), parse_double(tokens[1])}, parse_double(tokens[2])};
  }
  if (kind == "polygon") {
    if (tokens.size() < 6 || tokens.size() % 2 != 0)
      throw std::runtime_error("zone: polygon needs >= 3 x y pairs");
    ConvexPolygon poly;
    for (std::size_t i = 0; i < tokens.size(); i += 2)
      poly.vertices.push_back({parse_double(tokens[i]), parse_double(tokens[i + 1])});
    return poly;
  }
  throw std::runtime_error("zone: unknown shape '" + kind + "'");
}

nlohmann::json zone_to_json(const Zone& zone) {
  if (const auto* c = std::get_if<Circle>(&zone))
    return {{"shape", "circle"}, {"center", {c->center.x, c->center.y}}, {"radius", c->radius}};
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : std::get<ConvexPolygon>(zone).vertices) verts.push_back({v.x, v.y});
  return {{"shape", "polygon"}, {"vertices", verts}};
}

Zone zone_from_json(const nlohmann::json& j) {
  const std::string shape = j.at("shape").get<std::string>();
  if (shape == "circle") {
    return Circle{{j.at("center")[0].get<double>(), j.at("center")[1].get<double>()},
                  j.at("radius").get<double>()};
  }
  if (shape == "polygon") {
    ConvexPolygon poly;
    for (const auto& v : j.at("vertices"))
      poly.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
    return poly;
  }
  throw std::runtime_error("zone: unknown shape '" + shape + "'");
}

}  // namespace

std::string scenario_to_text(const ScenarioConfig& cfg) {
  std::string out;
  auto put = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  put("area_width", format_double(cfg.area_width));
  put("area_height", format_double(cfg.area_height));
  put("target", format_double(cfg.target.x) + " " + format_double(cfg.target.y));
  put("target_zone", zone_to_text(cfg.target_zone));
  put("suspect_zone", zone_to_text(cfg.suspect_zone));
  put("n_benign", std::to_string(cfg.n_benign));
  put("n_hostile", std::to_string(cfg.n_hostile));
  put("w_transit", format_double(cfg.w_transit));
  put("w_loiter", format_double(cfg.w_loiter));
  put("w_direct", format_double(cfg.w_direct));
  put("w_deceptive", format_double(cfg.w_deceptive));
  put("noise_sigma", format_double(cfg.noise_sigma));
  put("dt", format_double(cfg.dt));
  put("duration", format_double(cfg.duration));
  put("act_radius", format_double(cfg.act_radius));
  put("drop_prob", format_double(cfg.drop_prob));
  put("seed", std::to_string(cfg.seed));
  return out;
}

ScenarioConfig scenario_from_text(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) throw std::runtime_error("scenario text: missing '='");
    const std::string key{trim(sv.substr(0, eq))};
    const std::string value{trim(sv.substr(eq + 1))};
    if (key == "area_width") cfg.area_width = parse_double(value);
    else if (key == "area_height") cfg.area_height = parse_double(value);
    else if (key == "target") {
      std::istringstream v(value);
      std::string xs, ys;
      if (!(v >> xs >> ys)) throw std::runtime_error("scenario text: target needs x y");
      cfg.target = {parse_double(xs), parse_double(ys)};
    } else if (key == "target_zone") cfg.target_zone = zone_from_text(value);
    else if (key == "suspect_zone") cfg.suspect_zone = zone_from_text(value);
    else if (key == "n_benign") cfg.n_benign = std::stoull(value);
    else if (key == "n_hostile") cfg.n_hostile = std::stoull(value);
    else if (key == "w_transit") cfg.w_transit = parse_double(value);
    else if (key == "w_loiter") cfg.w_loiter = parse_double(value);
    else if (key == "w_direct") cfg.w_direct = parse_double(value);
    else if (key == "w_deceptive") cfg.w_deceptive = parse_double(value);
    else if (key == "noise_sigma") cfg.noise_sigma = parse_double(value);
    else if (key == "dt") cfg.dt = parse_double(value);
    else if (key == "duration") cfg.duration = parse_double(value);
    else if (key == "act_radius") cfg.act_radius = parse_double(value);
    else if (key == "drop_prob") cfg.drop_prob = parse_double(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else throw std::runtime_error("scenario text: unknown key '" + key + "'");
  }
  return cfg;
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  nlohmann::json j{{"area_width", cfg.area_width},
                   {"area_height", cfg.area_height},
                   {"target", {cfg.target.x, cfg.target.y}},
                   {"target_zone", zone_to_json(cfg.target_zone)},
                   {"suspect_zone", zone_to_json(cfg.suspect_zone)},
                   {"n_benign", cfg.n_benign},
                   {"n_hostile", cfg.n_hostile},
                   {"w_transit", cfg.w_transit},
                   {"w_loiter", cfg.w_loiter},
                   {"w_direct", cfg.w_direct},
                   {"w_deceptive", cfg.w_deceptive},
                   {"noise_sigma", cfg.noise_sigma},
                   {"dt", cfg.dt},
                   {"duration", cfg.duration},
                   {"act_radius", cfg.act_radius},
                   {"drop_prob", cfg.drop_prob},
                   {"seed", cfg.seed}};
  return j.dump(2);
}

ScenarioConfig scenario_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ScenarioConfig cfg;
  cfg.area_width = j.at("area_width").get<double>();
  cfg.area_height = j.at("area_height").get<double>();
  cfg.target = {j.at("target")[0].get<double>(), j.at("target")[1].get<double>()};
  cfg.target_zone = zone_from_json(j.at("target_zone"));
  cfg.suspect_zone = zone_from_json(j.at("suspect_zone"));
  cfg.n_benign = j.at("n_benign").get<std::size_t>();
  cfg.n_hostile = j.at("n_hostile").get<std::size_t>();
  cfg.w_transit = j.at("w_transit").get<double>();
  cfg.w_loiter = j.at("w_loiter").get<double>();
  cfg.w_direct = j.at("w_direct").get<double>();
  cfg.w_deceptive = j.at("w_deceptive").get<double>();
  cfg.noise_sigma = j.at("noise_sigma").get<double>();
  cfg.dt = j.at("dt").get<double>();
  cfg.duration = j.at("duration").get<double>();
  cfg.act_radius = j.at("act_radius").get<double>();
  cfg.drop_prob = j.at("drop_prob").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

std::string truth_to_jsonl(const GroundTruth& truth) {
  std::string out;
  for (const auto& obj : truth.objects) {
    nlohmann::json traj = nlohmann::json::array();
    for (const auto& s : obj.trajectory) traj.push_back({s.timestamp, s.position.x, s.position.y});
    nlohmann::json j{{"type", "object"},
                     {"id", obj.id},
                     {"hostile", obj.hostile},
                     {"trajectory", traj}};
    if (obj.act_time) j["act_time"] = *obj.act_time;
    else j["act_time"] = nullptr;
    out += j.dump() + "\n";
  }
  nlohmann::json corr{{"type", "correspondence"}, {"frames", truth.correspondence}};
  out += corr.dump() + "\n";
  return out;
}

GroundTruth truth_from_jsonl(const std::string& text) {
  GroundTruth truth;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const std::string type = j.at("type").get<std::string>();
    if (type == "object") {
      TruthObject obj;
      obj.id = j.at("id").get<ObjectId>();
      obj.hostile = j.at("hostile").get<bool>();
      if (!j.at("act_time").is_null()) obj.act_time = j.at("act_time").get<double>();
      for (const auto& s : j.at("trajectory"))
        obj.trajectory.push_back({s[0].get<double>(), {s[1].get<double>(), s[2].get<double>()}});
      truth.objects.push_back(std::move(obj));
    } else if (type == "correspondence") {
      truth.correspondence = j.at("frames").get<std::vector<std::vector<ObjectId>>>();
    } else {
      throw std::runtime_error("truth jsonl: unknown record type '" + type + "'");
    }
  }
  return truth;
}

}  // namespace sentry
