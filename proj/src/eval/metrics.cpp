#include "eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"

namespace pedrisk {

namespace {

std::vector<double> ones_if_empty(const std::vector<double>& w, std::size_t n) {
  if (w.empty()) return std::vector<double>(n, 1.0);
  if (w.size() != n) throw ArgumentError("metric: weight length mismatch");
  return w;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw ArgumentError("metric: prediction/label length mismatch");
  if (a == 0) throw ArgumentError("metric: empty input");
}

}  // namespace

double oe_ratio(const std::vector<double>& preds,
                const std::vector<double>& labels,
                const std::vector<double>& weights) {
  check_lengths(preds.size(), labels.size());
  std::vector<double> w = ones_if_empty(weights, preds.size());
  double observed = 0.0, expected = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    observed += w[i] * labels[i];
    expected += w[i] * preds[i];
  }
  if (expected <= 0.0) throw NumericError("O/E: expected count is zero");
  return observed / expected;
}

double auc(const std::vector<double>& scores,
           const std::vector<double>& labels,
           const std::vector<double>& weights) {
  check_lengths(scores.size(), labels.size());
  std::vector<double> w = ones_if_empty(weights, scores.size());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double pos_total = 0.0, neg_total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    (labels[i] > 0.5 ? pos_total : neg_total) += w[i];
  if (pos_total <= 0.0 || neg_total <= 0.0)
    throw NumericError("AUC: needs both classes present");

  double hits = 0.0;       // weighted pairs where the positive ranks higher
  double neg_below = 0.0;  // negative weight at strictly smaller scores
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double pos_here = 0.0, neg_here = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] > 0.5 ? pos_here : neg_here) += w[order[j]];
      ++j;
    }
    hits += pos_here * (neg_below + 0.5 * neg_here);
    neg_below += neg_here;
    i = j;
  }
  return hits / (pos_total * neg_total);
}

double average_precision(const std::vector<double>& scores,
                         const std::vector<double>& labels,
                         const std::vector<double>& weights) {
  check_lengths(scores.size(), labels.size());
  std::vector<double> w = ones_if_empty(weights, scores.size());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  double pos_total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (labels[i] > 0.5) pos_total += w[i];
  if (pos_total <= 0.0)
    throw NumericError("average precision: no positive subjects");

  double tp = 0.0, seen = 0.0, ap = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double tp_here = 0.0, all_here = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] > 0.5) tp_here += w[order[j]];
      all_here += w[order[j]];
      ++j;
    }
    tp += tp_here;
    seen += all_here;
    if (tp_here > 0.0) ap += tp_here * (tp / seen);
    i = j;
  }
  return ap / pos_total;
}

double brier(const std::vector<double>& preds,
             const std::vector<double>& labels,
             const std::vector<double>& weights) {
  check_lengths(preds.size(), labels.size());
  std::vector<double> w = ones_if_empty(weights, preds.size());
  double acc = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    double d = preds[i] - labels[i];
    acc += w[i] * d * d;
    wsum += w[i];
  }
  if (wsum <= 0.0) throw NumericError("Brier: zero total weight");
  return acc / wsum;
}

std::vector<CalibrationBin> calibration_bins(const std::vector<double>& preds,
                                             const std::vector<double>& labels,
                                             const std::vector<double>& weights,
                                             int bins) {
  check_lengths(preds.size(), labels.size());
  if (bins < 1) throw ArgumentError("calibration: bins must be positive");
  std::vector<double> w = ones_if_empty(weights, preds.size());
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a] < preds[b];
  });

  const std::size_t n = preds.size();
  std::vector<CalibrationBin> out;
  for (int b = 0; b < bins; ++b) {
    std::size_t lo = n * static_cast<std::size_t>(b) / bins;
    std::size_t hi = n * (static_cast<std::size_t>(b) + 1) / bins;
    if (lo >= hi) continue;
    CalibrationBin bin;
    double pw = 0.0, ow = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      std::size_t idx = order[k];
      pw += w[idx] * preds[idx];
      ow += w[idx] * labels[idx];
      bin.weight += w[idx];
      bin.count++;
    }
    if (bin.weight > 0.0) {
      bin.mean_pred = pw / bin.weight;
      bin.mean_obs = ow / bin.weight;
    }
    out.push_back(bin);
  }
  return out;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  check_lengths(a.size(), b.size());
  const double n = static_cast<double>(a.size());
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0)
    throw NumericError("correlation: constant input");
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    double mean_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mean_rank;
    i = j;
  }
  return ranks;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(average_ranks(a), average_ranks(b));
}

}  // namespace pedrisk
