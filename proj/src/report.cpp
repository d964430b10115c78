#include "sentry/report.hpp"

#include "vendor/json.hpp"

#include "sentry/textio.hpp"

namespace sentry {

std::string event_stream(const RunReport& report) {
  std::string out;
  for (const auto& a : report.alerts)
    out += "alert " + std::to_string(a.object_id) + " " + format_double(a.timestamp) + " " +
           format_double(a.p) + " " + to_string(a.source) + "\n";
  for (const auto& m : report.misses)
    out += "miss " + std::to_string(m.object_id) + " " + format_double(m.act_time) + " " +
           (m.first_alert_time ? format_double(*m.first_alert_time) : std::string("none")) + "\n";
  return out;
}

std::string scores_to_csv(const RunReport& report) {
  std::string out = "t,object_id,d_t,d_pn,I,speed,heading,p\n";
  for (const auto& s : report.scores) {
    out += format_double(s.timestamp) + "," + std::to_string(s.object_id) + "," +
           format_double(s.features.d_t) + "," + format_double(s.features.d_pn) + "," +
           format_double(s.features.inefficiency) + "," + format_double(s.features.speed) + "," +
           format_double(s.features.heading) + "," + format_double(s.p) + "\n";
  }
  return out;
}

namespace {

AlertSource source_from_string(const std::string& s) {
  if (s == "neural") return AlertSource::neural;
  if (s == "analytic") return AlertSource::analytic;
  if (s == "template") return AlertSource::speed_template;
  throw std::runtime_error("report: unknown alert source '" + s + "'");
}

}  // namespace

std::string run_to_json(const RunArtifacts& artifacts) {
  const auto& r = artifacts.report;
  nlohmann::json alerts = nlohmann::json::array();
  for (const auto& a : r.alerts)
    alerts.push_back({{"id", a.object_id}, {"t", a.timestamp}, {"p", a.p},
                      {"source", to_string(a.source)}});
  nlohmann::json misses = nlohmann::json::array();
  for (const auto& m : r.misses) {
    nlohmann::json j{{"id", m.object_id}, {"act_time", m.act_time}};
    if (m.first_alert_time) j["first_alert_time"] = *m.first_alert_time;
    else j["first_alert_time"] = nullptr;
    misses.push_back(j);
  }
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& o : r.objects) {
    nlohmann::json j{{"id", o.object_id}, {"max_p", o.max_p}};
    j["hostile"] = o.hostile ? nlohmann::json(*o.hostile) : nlohmann::json(nullptr);
    j["first_alert_time"] =
        o.first_alert_time ? nlohmann::json(*o.first_alert_time) : nlohmann::json(nullptr);
    j["zone_entry_time"] =
        o.zone_entry_time ? nlohmann::json(*o.zone_entry_time) : nlohmann::json(nullptr);
    objects.push_back(j);
  }
  nlohmann::json j{{"alerts", alerts},
                   {"misses", misses},
                   {"objects", objects},
                   {"frames_processed", r.frames_processed},
                   {"model", artifacts.model_path},
                   {"frames", artifacts.frames_path},
                   {"truth", artifacts.truth_path},
                   {"config", artifacts.config_path},
                   {"scores_csv", artifacts.scores_csv},
                   {"theta", artifacts.theta},
                   {"gate", artifacts.gate},
                   {"seed", artifacts.seed}};
  return j.dump(2);
}

RunArtifacts run_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RunArtifacts a;
  for (const auto& e : j.at("alerts"))
    a.report.alerts.push_back({e.at("id").get<ObjectId>(), e.at("t").get<double>(),
                               e.at("p").get<double>(),
                               source_from_string(e.at("source").get<std::string>())});
  for (const auto& e : j.at("misses")) {
    MissEvent m{e.at("id").get<ObjectId>(), e.at("act_time").get<double>(), std::nullopt};
    if (!e.at("first_alert_time").is_null()) m.first_alert_time = e.at("first_alert_time").get<double>();
    a.report.misses.push_back(m);
  }
  for (const auto& e : j.at("objects")) {
    RunReport::ObjectRow row;
    row.object_id = e.at("id").get<ObjectId>();
    row.max_p = e.at("max_p").get<double>();
    if (!e.at("hostile").is_null()) row.hostile = e.at("hostile").get<bool>();
    if (!e.at("first_alert_time").is_null()) row.first_alert_time = e.at("first_alert_time").get<double>();
    if (!e.at("zone_entry_time").is_null()) row.zone_entry_time = e.at("zone_entry_time").get<double>();
    a.report.objects.push_back(row);
  }
  a.report.frames_processed = j.at("frames_processed").get<std::size_t>();
  a.model_path = j.at("model").get<std::string>();
  a.frames_path = j.at("frames").get<std::string>();
  a.truth_path = j.at("truth").get<std::string>();
  a.config_path = j.at("config").get<std::string>();
  a.scores_csv = j.at("scores_csv").get<std::string>();
  a.theta = j.at("theta").get<double>();
  a.gate = j.at("gate").get<double>();
  a.seed = j.at("seed").get<std::uint64_t>();
  return a;
}

}  // namespace sentry
