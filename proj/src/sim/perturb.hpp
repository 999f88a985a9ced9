#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/pedigree.hpp"

namespace pedrisk {

// Self-report error rates per cancer and relative degree, plus the onset/age
// noise mechanism (|normal(mean, sd)| with a random sign). Degree-2 rates
// also cover members beyond degree 2.
struct MisreportConfig {
  struct Rates {
    double fnr_deg1, fpr_deg1, fnr_deg2, fpr_deg2;
  };
  Rates breast = {0.05, 0.03, 0.18, 0.03};
  Rates ovarian = {0.17, 0.01, 0.56, 0.02};
  double onset_fraction_breast = 0.03;
  double onset_fraction_ovarian = 0.04;
  double current_age_fraction = 0.03;
  double error_mean = 4.0;
  double error_sd = 3.0;

  static MisreportConfig load(const std::string& json_path);
  static MisreportConfig parse(const std::string& json_text);
};

// Applies status flips, onset-age noise, and current-age noise to every
// non-counselee member; the counselee record is never modified. Family i
// uses derive_seed(seed, i).
std::vector<Pedigree> perturb_misreport(const std::vector<Pedigree>& peds,
                                        const MisreportConfig& cfg,
                                        std::uint64_t seed);

enum class DropMode { Any, UnaffectedOnly };

// Removes each eligible non-counselee member independently with the given
// probability; children of a removed member lose that parent link.
std::vector<Pedigree> drop_relatives(const std::vector<Pedigree>& peds,
                                     double fraction, DropMode mode,
                                     std::uint64_t seed);

// Forgets recorded diagnosis ages of affected non-counselee members, each
// independently with the given probability.
std::vector<Pedigree> blank_onset_ages(const std::vector<Pedigree>& peds,
                                       double fraction, std::uint64_t seed);

// Fills every missing diagnosis age: 50 when the member is over 50 (or the
// age is unknown), otherwise the member's current age.
std::vector<Pedigree> impute_onset_ages(const std::vector<Pedigree>& peds);

}  // namespace pedrisk
