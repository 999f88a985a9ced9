#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pedrisk {

struct MetricSummary {
  double point = 0.0;   // full-sample value
  double lo = 0.0;      // percentile interval bounds
  double hi = 0.0;
  int valid_replicates = 0;
};

// Side-by-side bootstrap of several models on one test set. Every model is
// evaluated on the same resampled index vector within a replicate, so the
// win counts below are paired comparisons.
struct BootstrapComparison {
  std::vector<std::string> names;
  std::vector<MetricSummary> auc;
  std::vector<MetricSummary> oe;
  std::vector<MetricSummary> brier;
  // wins[i][j]: fraction of replicates where model i strictly beats model j;
  // ties are the residual 1 - wins[i][j] - wins[j][i]. AUC: larger wins.
  // O/E: closer to 1 wins.
  std::vector<std::vector<double>> auc_wins;
  std::vector<std::vector<double>> oe_wins;
  int replicates = 0;
};

BootstrapComparison bootstrap_compare(
    const std::vector<std::string>& names,
    const std::vector<std::vector<double>>& model_preds,
    const std::vector<double>& labels,
    const std::vector<double>& weights,  // empty for uniform
    int replicates, double ci_level, std::uint64_t seed);

// Percentile interval over finite values; NaNs are dropped.
MetricSummary summarize_replicates(double point, std::vector<double> values,
                                   double ci_level);

}  // namespace pedrisk
