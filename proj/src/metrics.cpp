#include "sentry/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace sentry {

double roc_auc(std::span<const std::pair<double, int>> scored) {
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& [score, label] : scored) {
    (void)score;
    label ? ++n_pos : ++n_neg;
  }
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("roc_auc: both classes must be present");

  // Rank-sum with average ranks on ties.
  std::vector<std::pair<double, int>> sorted(scored.begin(), scored.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].first == sorted[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (sorted[k].second) rank_sum_pos += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

EvalReport evaluate(std::span<const EvalRow> rows, double theta, std::size_t n_scenarios) {
  EvalReport report;
  report.n_scenarios = n_scenarios;
  report.n_objects = rows.size();

  std::vector<std::pair<double, int>> scored;
  double tta_sum = 0.0;
  std::size_t tta_count = 0;
  for (const auto& row : rows) {
    scored.emplace_back(row.max_p, row.hostile ? 1 : 0);
    const bool flagged = row.max_p > theta;
    if (flagged && row.hostile) ++report.tp;
    else if (flagged && !row.hostile) ++report.fp;
    else if (!flagged && row.hostile) ++report.fn;
    else ++report.tn;
    if (row.hostile && row.alerted) {
      tta_sum += row.time_to_alert;
      ++tta_count;
    }
  }
  report.roc_auc = roc_auc(scored);
  report.precision = (report.tp + report.fp) ? static_cast<double>(report.tp) / (report.tp + report.fp) : 0.0;
  report.recall = (report.tp + report.fn) ? static_cast<double>(report.tp) / (report.tp + report.fn) : 0.0;
  report.mean_time_to_alert = tta_count ? tta_sum / static_cast<double>(tta_count) : 0.0;
  return report;
}

}  // namespace sentry
