#include "sentry/track.hpp"

#include <cmath>
#include <stdexcept>

#include "vendor/json.hpp"

#include "sentry/textio.hpp"

namespace sentry {

void Track::append(double timestamp, const Position& p) {
  if (!history.empty() && timestamp <= history.back().timestamp)
    throw std::invalid_argument("track: timestamps must be strictly increasing");
  history.push_back({timestamp, p});
}

const TrackSample& Track::latest() const {
  if (history.empty()) throw std::out_of_range("track: empty history");
  return history.back();
}

std::optional<ZoneEntry> record_entry(const Track& track, const Zone& zone,
                                      const std::optional<ZoneEntry>& prior) {
  if (track.history.empty()) return std::nullopt;

  if (prior) {
    bool exited = false;
    for (const auto& s : track.history) {
      if (s.timestamp < prior->entry_time) continue;
      if (!contains(zone, s.position)) { exited = true; break; }
    }
    if (!exited) return prior;
  }

  // First inside sample after the most recent outside sample.
  std::optional<ZoneEntry> entry;
  bool was_inside = false;
  for (const auto& s : track.history) {
    const bool inside = contains(zone, s.position);
    if (inside && !was_inside) entry = ZoneEntry{track.object_id, s.position, s.timestamp};
    if (!inside) entry = std::nullopt;
    was_inside = inside;
  }
  return entry;
}

double path_length(const Track& track, double from_time) {
  if (track.history.empty() || from_time > track.history.back().timestamp)
    throw std::out_of_range("path_length: window past last sample");
  double total = 0.0;
  const Position* prev = nullptr;
  for (const auto& s : track.history) {
    if (s.timestamp < from_time) continue;
    if (prev) total += distance(*prev, s.position);
    prev = &s.position;
  }
  return total;
}

std::string frame_to_text(const Frame& frame) {
  std::string out = "t=" + format_double(frame.timestamp) + ";";
  for (const auto& b : frame.blips)
    out += " (" + format_double(b.position.x) + "," + format_double(b.position.y) + ")";
  return out;
}

Frame frame_from_text(std::string_view line) {
  line = trim(line);
  if (line.substr(0, 2) != "t=") throw std::runtime_error("frame text: missing 't='");
  const auto semi = line.find(';');
  if (semi == std::string_view::npos) throw std::runtime_error("frame text: missing ';'");
  Frame frame;
  frame.timestamp = parse_double(trim(line.substr(2, semi - 2)));
  std::string_view rest = line.substr(semi + 1);
  while (true) {
    const auto open = rest.find('(');
    if (open == std::string_view::npos) break;
    const auto comma = rest.find(',', open);
    const auto close = rest.find(')', open);
    if (comma == std::string_view::npos || close == std::string_view::npos || comma > close)
      throw std::runtime_error("frame text: malformed blip");
    Blip b;
    b.position.x = parse_double(trim(rest.substr(open + 1, comma - open - 1)));
    b.position.y = parse_double(trim(rest.substr(comma + 1, close - comma - 1)));
    b.timestamp = frame.timestamp;
    frame.blips.push_back(b);
    rest = rest.substr(close + 1);
  }
  return frame;
}

std::string frame_to_jsonl(const Frame& frame) {
  std::string out = "{\"t\":" + format_double(frame.timestamp) + ", \"blips\":[";
  for (std::size_t i = 0; i < frame.blips.size(); ++i) {
    if (i) out += ",";
    out += "[" + format_double(frame.blips[i].position.x) + "," +
           format_double(frame.blips[i].position.y) + "]";
  }
  out += "]}";
  return out;
}

Frame frame_from_jsonl(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  Frame frame;
  frame.timestamp = j.at("t").get<double>();
  for (const auto& b : j.at("blips")) {
    if (!b.is_array() || b.size() != 2) throw std::runtime_error("frame jsonl: blip must be [x,y]");
    frame.blips.push_back({{b[0].get<double>(), b[1].get<double>()}, frame.timestamp});
  }
  return frame;
}

}  // namespace sentry
