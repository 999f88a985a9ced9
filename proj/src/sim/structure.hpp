#pragma once

#include <array>
#include <string>
#include <vector>

#include "core/pedigree.hpp"
#include "core/rng.hpp"

namespace pedrisk {

// How many relatives of each type a simulated family has. Counts are drawn
// from per-type distributions over 0..cap (cap at most 5); core members
// (parents, grandparents) default to always present.
struct StructureDistribution {
  struct CountDist {
    std::vector<double> probs;  // index = count, normalized at build time
    int sample(Rng& rng) const;
  };

  // Indexed by RelativeType for the ten variable slots; fixed types
  // (counselee, parents, grandparents) use presence probabilities.
  std::array<CountDist, kNumRelativeTypes> counts;
  double baseline_age_mean = 48.0;
  double baseline_age_sd = 16.0;
  int baseline_age_min = 20;
  int baseline_age_max = 80;

  static StructureDistribution defaults();
  static StructureDistribution load(const std::string& json_path);
  static StructureDistribution parse(const std::string& json_text);
  void save(const std::string& json_path) const;

  // Truncated-and-renormalized Poisson over 0..cap.
  static CountDist truncated_poisson(double lambda, int cap);
  static CountDist always(int count);
  static CountDist present_with_prob(double p);
};

}  // namespace pedrisk
