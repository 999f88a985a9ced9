#include "eval/ipcw.hpp"

#include <algorithm>
#include <vector>

#include "core/errors.hpp"

namespace pedrisk {

std::vector<double> ipcw_weights(const std::vector<FollowUp>& subjects,
                                 double horizon) {
  if (subjects.empty()) throw ArgumentError("ipcw: empty cohort");
  if (horizon <= 0.0) throw ArgumentError("ipcw: horizon must be positive");

  std::vector<double> all_times;
  all_times.reserve(subjects.size());
  std::vector<double> censor_times;
  for (const FollowUp& s : subjects) {
    if (s.time < 0.0) throw ArgumentError("ipcw: negative follow-up time");
    all_times.push_back(s.time);
    // Reaching the horizon without an event is administrative end of
    // follow-up, not a censoring the weights must correct for.
    if (!s.event && s.time < horizon) censor_times.push_back(s.time);
  }
  std::sort(all_times.begin(), all_times.end());
  std::sort(censor_times.begin(), censor_times.end());

  // Distinct censoring times with the reverse Kaplan-Meier survival reached
  // after each one; at-risk counts everyone whose follow-up is >= the time.
  std::vector<double> steps;       // distinct censoring times, ascending
  std::vector<double> g_after;     // G just after steps[i]
  double g = 1.0;
  std::size_t i = 0;
  while (i < censor_times.size()) {
    std::size_t j = i;
    while (j < censor_times.size() && censor_times[j] == censor_times[i]) ++j;
    double t = censor_times[i];
    auto below = std::lower_bound(all_times.begin(), all_times.end(), t);
    double at_risk =
        static_cast<double>(all_times.end() - below);  // time >= t
    g *= 1.0 - static_cast<double>(j - i) / at_risk;
    steps.push_back(t);
    g_after.push_back(g);
    i = j;
  }

  // G(x-): survival after the last censoring time strictly below x.
  auto g_minus = [&](double x) {
    auto it = std::lower_bound(steps.begin(), steps.end(), x);
    if (it == steps.begin()) return 1.0;
    return g_after[static_cast<std::size_t>(it - steps.begin()) - 1];
  };

  std::vector<double> w;
  w.reserve(subjects.size());
  for (const FollowUp& s : subjects) {
    double weight = 0.0;
    if (s.event && s.time <= horizon) {
      double gv = g_minus(s.time);
      if (gv <= 0.0) throw NumericError("ipcw: censoring curve hit zero");
      weight = 1.0 / gv;
    } else if (s.time >= horizon) {
      double gv = g_minus(horizon);
      if (gv <= 0.0) throw NumericError("ipcw: censoring curve hit zero");
      weight = 1.0 / gv;
    }
    w.push_back(weight);
  }
  return w;
}

std::vector<double> ipcw_labels(const std::vector<FollowUp>& subjects,
                                double horizon) {
  std::vector<double> y;
  y.reserve(subjects.size());
  for (const FollowUp& s : subjects)
    y.push_back(s.event && s.time <= horizon ? 1.0 : 0.0);
  return y;
}

}  // namespace pedrisk
