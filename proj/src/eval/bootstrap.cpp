#include "eval/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "eval/metrics.hpp"

namespace pedrisk {

namespace {

double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return std::nan("");
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

MetricSummary summarize_replicates(double point, std::vector<double> values,
                                   double ci_level) {
  MetricSummary s;
  s.point = point;
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return !std::isfinite(v); }),
               values.end());
  s.valid_replicates = static_cast<int>(values.size());
  std::sort(values.begin(), values.end());
  double alpha = (1.0 - ci_level) / 2.0;
  s.lo = quantile_sorted(values, alpha);
  s.hi = quantile_sorted(values, 1.0 - alpha);
  return s;
}

BootstrapComparison bootstrap_compare(
    const std::vector<std::string>& names,
    const std::vector<std::vector<double>>& model_preds,
    const std::vector<double>& labels,
    const std::vector<double>& weights,
    int replicates, double ci_level, std::uint64_t seed) {
  const std::size_t n_models = model_preds.size();
  if (names.size() != n_models)
    throw ArgumentError("bootstrap: one name per model required");
  if (n_models == 0) throw ArgumentError("bootstrap: no models");
  const std::size_t n = labels.size();
  for (const auto& p : model_preds)
    if (p.size() != n) throw ArgumentError("bootstrap: prediction length mismatch");
  if (!weights.empty() && weights.size() != n)
    throw ArgumentError("bootstrap: weight length mismatch");
  if (replicates < 1) throw ArgumentError("bootstrap: needs replicates");

  BootstrapComparison out;
  out.names = names;
  out.replicates = replicates;

  std::vector<std::vector<double>> auc_reps(n_models), oe_reps(n_models),
      brier_reps(n_models);
  out.auc_wins.assign(n_models, std::vector<double>(n_models, 0.0));
  out.oe_wins.assign(n_models, std::vector<double>(n_models, 0.0));

  Rng rng(seed);
  std::vector<double> rp(n), rl(n), rw;
  std::vector<std::size_t> idx(n);
  int paired_valid = 0;  // replicates where every model produced an AUC

  for (int b = 0; b < replicates; ++b) {
    for (std::size_t i = 0; i < n; ++i)
      idx[i] = static_cast<std::size_t>(rng.uniform_int(n));
    rl.clear();
    rw.clear();
    for (std::size_t i = 0; i < n; ++i) rl.push_back(labels[idx[i]]);
    if (!weights.empty())
      for (std::size_t i = 0; i < n; ++i) rw.push_back(weights[idx[i]]);

    std::vector<double> rep_auc(n_models, std::nan("")),
        rep_oe(n_models, std::nan(""));
    bool all_auc = true;
    for (std::size_t m = 0; m < n_models; ++m) {
      for (std::size_t i = 0; i < n; ++i) rp[i] = model_preds[m][idx[i]];
      double a = std::nan(""), o = std::nan(""), br = std::nan("");
      try {
        a = auc(rp, rl, rw);
      } catch (const NumericError&) {
        all_auc = false;
      }
      try {
        o = oe_ratio(rp, rl, rw);
      } catch (const NumericError&) {
      }
      try {
        br = brier(rp, rl, rw);
      } catch (const NumericError&) {
      }
      rep_auc[m] = a;
      rep_oe[m] = o;
      auc_reps[m].push_back(a);
      oe_reps[m].push_back(o);
      brier_reps[m].push_back(br);
    }

    if (all_auc) {
      ++paired_valid;
      for (std::size_t i = 0; i < n_models; ++i)
        for (std::size_t j = 0; j < n_models; ++j) {
          if (i == j) continue;
          if (rep_auc[i] > rep_auc[j]) out.auc_wins[i][j] += 1.0;
          double di = std::abs(rep_oe[i] - 1.0), dj = std::abs(rep_oe[j] - 1.0);
          if (std::isfinite(di) && std::isfinite(dj) && di < dj)
            out.oe_wins[i][j] += 1.0;
        }
    }
  }

  double denom = paired_valid > 0 ? static_cast<double>(paired_valid) : 1.0;
  for (std::size_t i = 0; i < n_models; ++i)
    for (std::size_t j = 0; j < n_models; ++j) {
      out.auc_wins[i][j] /= denom;
      out.oe_wins[i][j] /= denom;
    }

  for (std::size_t m = 0; m < n_models; ++m) {
    double a_pt = auc(model_preds[m], labels, weights);
    double o_pt = oe_ratio(model_preds[m], labels, weights);
    double b_pt = brier(model_preds[m], labels, weights);
    out.auc.push_back(summarize_replicates(a_pt, auc_reps[m], ci_level));
    out.oe.push_back(summarize_replicates(o_pt, oe_reps[m], ci_level));
    out.brier.push_back(summarize_replicates(b_pt, brier_reps[m], ci_level));
  }
  return out;
}

}  // namespace pedrisk
