#pragma once

#include <map>
#include <vector>

#include "sentry/som.hpp"
#include "sentry/track.hpp"

namespace sentry {

// Result of associating one frame's blips with the location table.
struct Assignment {
  std::map<std::size_t, ObjectId> blip_to_id;  // blip index -> id, injective
  std::vector<ObjectId> created;
  std::vector<ObjectId> retired;
};

struct MatchedPair {
  std::size_t blip_index;
  ObjectId id;
  double dist;
};

// Greedy globally-nearest matching between blips and table entries,
// processed in increasing distance order; pairs beyond `gate` are rejected.
std::vector<MatchedPair> greedy_match(const Frame& frame, const LocationTable& table, double gate);

// Persistent-identity tagger: greedy gated matching against the location
// table, fresh sequential ids for unmatched blips, coast-then-retire for
// unmatched table entries, and an online-trained SOM for diagnostics.
class Tagger {
 public:
  Tagger(SomGrid grid, SomParams som_params, double gate, int coast_limit = 5);

  // Throws std::invalid_argument unless gate > 0.
  Assignment associate(const Frame& frame);

  const LocationTable& table() const { return table_; }
  const SomGrid& grid() const { return grid_; }
  const std::map<ObjectId, Track>& tracks() const { return tracks_; }
  const Track& track(ObjectId id) const { return tracks_.at(id); }

 private:
  LocationTable table_;
  SomGrid grid_;
  SomParams som_params_;
  double gate_;
  int coast_limit_;
  std::map<ObjectId, int> miss_counts_;
  std::map<ObjectId, Track> tracks_;
  ObjectId next_id_ = 1;
};

}  // namespace sentry
