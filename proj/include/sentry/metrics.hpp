#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace sentry {

// Probability that a random positive outscores a random negative, ties
// counted half (rank formulation). Throws std::invalid_argument unless both
// classes are present.
double roc_auc(std::span<const std::pair<double, int>> scored);

struct EvalReport {
  double roc_auc = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;  // at threshold theta
  double precision = 0.0;  // 0 when undefined
  double recall = 0.0;
  double mean_time_to_alert = 0.0;  // s, over alerted true positives
  std::size_t n_scenarios = 0;
  std::size_t n_objects = 0;
};

struct EvalRow {
  double max_p = 0.0;
  bool hostile = false;
  bool alerted = false;
  double time_to_alert = 0.0;  // first alert - zone entry, when alerted
};

EvalReport evaluate(std::span<const EvalRow> rows, double theta, std::size_t n_scenarios);

}  // namespace sentry
