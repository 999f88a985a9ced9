#pragma once

#include <vector>

namespace pedrisk {

// One subject's follow-up: `time` is years from baseline to the breast
// cancer diagnosis (event = true) or to the end of observation (event =
// false, censoring or death).
struct FollowUp {
  double time = 0.0;
  bool event = false;
};

// Inverse-probability-of-censoring weights for a t-year binary endpoint.
// The censoring survival curve comes from the reverse Kaplan-Meier estimate
// (censorings as events; at-risk counts everyone with follow-up >= that
// time). Weights:
//   event at e <= t      -> 1 / G(e-)
//   followed past t      -> 1 / G(t-)
//   censored before t    -> 0
// G(x-) is the product over censoring times strictly before x. A zero G
// under a needed weight throws NumericError.
std::vector<double> ipcw_weights(const std::vector<FollowUp>& subjects,
                                 double horizon);

// 0/1 endpoint paired with the weights: 1 iff the event happened by the
// horizon.
std::vector<double> ipcw_labels(const std::vector<FollowUp>& subjects,
                                double horizon);

}  // namespace pedrisk
