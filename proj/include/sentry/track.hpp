#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sentry/geometry.hpp"

namespace sentry {

using ObjectId = std::uint64_t;

// One timestamped detection, no identity attached.
struct Blip {
  Position position;
  double timestamp = 0.0;
};

// One radar sweep. All blip timestamps equal the frame timestamp.
struct Frame {
  double timestamp = 0.0;
  std::vector<Blip> blips;
};

struct TrackSample {
  double timestamp = 0.0;
  Position position;
};

// Identity-resolved position history; timestamps strictly increasing.
struct Track {
  ObjectId object_id = 0;
  std::vector<TrackSample> history;

  // Throws std::invalid_argument on non-increasing timestamps.
  void append(double timestamp, const Position& p);
  const TrackSample& latest() const;
};

// id -> latest position. Ordered by id, which fixes classifier slot order.
struct LocationTable {
  std::map<ObjectId, Position> entries;

  void update(ObjectId id, const Position& p) { entries[id] = p; }
  std::size_t size() const { return entries.size(); }
};

struct ZoneEntry {
  ObjectId object_id = 0;
  Position entry_point;
  double entry_time = 0.0;
};

// Entry point of the most recent in-zone segment. `prior` is reused when the
// object has not exited since it; a fresh entry is recorded on re-entry.
// Returns nullopt when the track has no active entry.
std::optional<ZoneEntry> record_entry(const Track& track, const Zone& zone,
                                      const std::optional<ZoneEntry>& prior);

// Sum of segment lengths over samples with timestamp >= from_time.
// Throws std::out_of_range when from_time lies past the last sample.
double path_length(const Track& track, double from_time);

// Frame wire formats. Both round-trip the decimal text bit-exactly.
//   text : t=<seconds>; (x1,y1) (x2,y2) ...
//   jsonl: {"t":<seconds>, "blips":[[x,y],...]}
std::string frame_to_text(const Frame& frame);
Frame frame_from_text(std::string_view line);
std::string frame_to_jsonl(const Frame& frame);
Frame frame_from_jsonl(std::string_view line);

}  // namespace sentry
