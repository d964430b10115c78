#pragma once

#include <string>

#include "sentry/engine.hpp"

namespace sentry {

// Everything `run` persists: the outcome plus the inputs needed to replay it.
struct RunArtifacts {
  RunReport report;
  std::string model_path;
  std::string frames_path;
  std::string truth_path;   // empty when no truth was supplied
  std::string config_path;
  std::string scores_csv;   // path reference, written next to the report
  double theta = 0.7;
  double gate = 60.0;
  std::uint64_t seed = 0;
};

// Canonical event-stream text compared byte-for-byte by the replay audit.
std::string event_stream(const RunReport& report);

// CSV feature dump: t,object_id,d_t,d_pn,I,speed,heading,p
std::string scores_to_csv(const RunReport& report);

std::string run_to_json(const RunArtifacts& artifacts);
RunArtifacts run_from_json(const std::string& text);

}  // namespace sentry
