#include "sentry/tagger.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace sentry {

std::vector<MatchedPair> greedy_match(const Frame& frame, const LocationTable& table, double gate) {
  if (!(gate > 0.0)) throw std::invalid_argument("associate: gate must be > 0");

  struct Candidate {
    double dist;
    std::size_t blip;
    ObjectId id;
  };
  std::vector<Candidate> candidates;
  for (std::size_t b = 0; b < frame.blips.size(); ++b) {
    for (const auto& [id, pos] : table.entries) {
      const double d = distance(frame.blips[b].position, pos);
      if (d <= gate) candidates.push_back({d, b, id});
    }
  }
  // Distance order; ties resolved by blip index then id for determinism.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.blip != b.blip) return a.blip < b.blip;
    return a.id < b.id;
  });

  std::vector<MatchedPair> matches;
  std::set<std::size_t> used_blips;
  std::set<ObjectId> used_ids;
  for (const auto& c : candidates) {
    if (used_blips.count(c.blip) || used_ids.count(c.id)) continue;
    used_blips.insert(c.blip);
    used_ids.insert(c.id);
    matches.push_back({c.blip, c.id, c.dist});
  }
  return matches;
}

Tagger::Tagger(SomGrid grid, SomParams som_params, double gate, int coast_limit)
    : grid_(std::move(grid)), som_params_(som_params), gate_(gate), coast_limit_(coast_limit) {
  if (!(gate_ > 0.0)) throw std::invalid_argument("tagger: gate must be > 0");
}

Assignment Tagger::associate(const Frame& frame) {
  Assignment out;
  const auto matches = greedy_match(frame, table_, gate_);

  std::set<std::size_t> matched_blips;
  std::set<ObjectId> matched_ids;
  for (const auto& m : matches) {
    out.blip_to_id[m.blip_index] = m.id;
    matched_blips.insert(m.blip_index);
    matched_ids.insert(m.id);
  }

  // Fresh sequential ids for unmatched blips.
  for (std::size_t b = 0; b < frame.blips.size(); ++b) {
    if (matched_blips.count(b)) continue;
    const ObjectId id = next_id_++;
    out.blip_to_id[b] = id;
    out.created.push_back(id);
    tracks_[id].object_id = id;
  }

  // Update table and tracks for every assigned blip; feed the SOM.
  for (const auto& [b, id] : out.blip_to_id) {
    const Position& p = frame.blips[b].position;
    table_.update(id, p);
    tracks_[id].append(frame.timestamp, p);
    miss_counts_[id] = 0;
    grid_.train_step(p, som_params_);
  }

  // Coast unmatched entries; retire after coast_limit consecutive misses.
  std::vector<ObjectId> to_retire;
  for (const auto& [id, pos] : table_.entries) {
    (void)pos;
    if (matched_ids.count(id)) continue;
    bool is_new = std::find(out.created.begin(), out.created.end(), id) != out.created.end();
    if (is_new) continue;
    if (++miss_counts_[id] >= coast_limit_) to_retire.push_back(id);
  }
  for (ObjectId id : to_retire) {
    table_.entries.erase(id);
    miss_counts_.erase(id);
    out.retired.push_back(id);
  }
  return out;
}

}  // namespace sentry
