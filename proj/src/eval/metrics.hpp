#pragma once

#include <cstddef>
#include <vector>

namespace pedrisk {

// All metrics take optional per-subject weights; pass an empty vector for
// unweighted. Labels are 0/1.

// Observed over expected: sum(w*y) / sum(w*p). Below 1 means the model
// over-predicts events.
double oe_ratio(const std::vector<double>& preds,
                const std::vector<double>& labels,
                const std::vector<double>& weights = {});

// Mann-Whitney AUC; tied scores count half. Throws NumericError when either
// class has zero total weight.
double auc(const std::vector<double>& scores,
           const std::vector<double>& labels,
           const std::vector<double>& weights = {});

// Average precision with tied scores handled as one block.
double average_precision(const std::vector<double>& scores,
                         const std::vector<double>& labels,
                         const std::vector<double>& weights = {});

// Mean squared distance between prediction and outcome.
double brier(const std::vector<double>& preds,
             const std::vector<double>& labels,
             const std::vector<double>& weights = {});

struct CalibrationBin {
  double mean_pred = 0.0;
  double mean_obs = 0.0;
  std::size_t count = 0;
  double weight = 0.0;
};

// Equal-count bins over predictions sorted ascending (deciles by default).
std::vector<CalibrationBin> calibration_bins(const std::vector<double>& preds,
                                             const std::vector<double>& labels,
                                             const std::vector<double>& weights = {},
                                             int bins = 10);

double pearson(const std::vector<double>& a, const std::vector<double>& b);
double spearman(const std::vector<double>& a, const std::vector<double>& b);

// Average ranks, ties sharing the mean rank (1-based).
std::vector<double> average_ranks(const std::vector<double>& v);

}  // namespace pedrisk
