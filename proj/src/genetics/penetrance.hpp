#pragma once

#include <array>
#include <string>

#include "core/pedigree.hpp"
#include "core/rng.hpp"
#include "genetics/genetics.hpp"

namespace pedrisk {

enum class Cancer : int { Breast = 0, Ovarian = 1 };
constexpr int kNumCancers = 2;
constexpr int kMaxAge = 94;  // onset support is 1..94

// Lifetime onset probability per carrier class, order matching the class
// index: noncarrier, locus1 only, locus2 only, both.
using ClassValues = std::array<double, kNumClasses>;

struct PenetranceConfig {
  double allele_freq1 = 0.014;
  double allele_freq2 = 0.012;

  ClassValues breast_female_lifetime = {0.12, 0.65, 0.55, 0.79};
  // Nonzero so a falsely reported male breast case cannot zero out every
  // genotype class; values are synthetic, dominated by locus2.
  ClassValues breast_male_lifetime = {0.001, 0.01, 0.07, 0.08};
  ClassValues ovarian_female_lifetime = {0.015, 0.40, 0.18, 0.45};

  double median_onset_noncarrier = 65.0;
  double median_onset_carrier = 45.0;
  // Separate curve steepness per carrier status: the noncarrier curve keeps
  // early onsets rare while the flatter carrier curve spreads onset mass
  // across ages, so an early diagnosis is strong carrier evidence and a late
  // one still favors carriage.
  double weibull_shape_noncarrier = 6.0;
  double weibull_shape_carrier = 2.0;

  double death_age_mean = 80.0;
  double death_age_sd = 15.0;
  double death_age_min = 1.0;
  double death_age_max = 110.0;

  double age_gap_mean = 27.0;
  double age_gap_sd = 6.0;
};

PenetranceConfig load_penetrance_config(const std::string& json_path);
void save_penetrance_config(const PenetranceConfig& cfg,
                            const std::string& json_path);
PenetranceConfig parse_penetrance_config(const std::string& json_text);

// Discrete annual onset tables plus their running sums. onset[...][a] is
// P(onset at exactly age a); cumulative[...][a] is P(onset <= a). Index 0 is
// unused padding so ages address directly.
class PenetranceModel {
 public:
  double onset(int cls, Sex sex, Cancer cancer, int age) const {
    return onset_[idx(cls, sex, cancer)][age];
  }
  double cumulative(int cls, Sex sex, Cancer cancer, int age) const {
    return cum_[idx(cls, sex, cancer)][age];
  }
  double lifetime(int cls, Sex sex, Cancer cancer) const {
    return cum_[idx(cls, sex, cancer)][kMaxAge];
  }

  const PenetranceConfig& config() const { return config_; }

  // Latent onset age draw: 0 means the cancer never develops.
  int sample_onset(int cls, Sex sex, Cancer cancer, Rng& rng) const;

  // Checks table shape: nonnegative entries, total mass <= 1, zero male
  // ovarian risk, and the carrier-above-noncarrier cumulative ordering.
  void check() const;

  friend PenetranceModel build_penetrance(const PenetranceConfig& cfg);

 private:
  static int idx(int cls, Sex sex, Cancer cancer) {
    return (cls * 2 + static_cast<int>(sex)) * 2 + static_cast<int>(cancer);
  }
  std::array<std::array<double, kMaxAge + 1>, kNumClasses * 2 * 2> onset_{};
  std::array<std::array<double, kMaxAge + 1>, kNumClasses * 2 * 2> cum_{};
  PenetranceConfig config_;
};

// Fits one discretized Weibull per (class, sex, cancer): mass equals the
// configured lifetime value exactly, and the conditional-on-onset median
// matches the configured median (noncarrier vs carrier).
PenetranceModel build_penetrance(const PenetranceConfig& cfg);

// Likelihood of one member's phenotype record given a carrier class:
// product over cancers of the onset probability (affected at a known age),
// the cumulative mass (affected, age unrecorded), or the survival mass
// (unaffected through current_age). Missing current age contributes 1.
double phenotype_likelihood(const PenetranceModel& model, const Member& m,
                            int cls);

}  // namespace pedrisk
