#pragma once

#include <cstdint>
#include <string>

#include "core/pedigree.hpp"
#include "genetics/penetrance.hpp"
#include "sim/structure.hpp"

namespace pedrisk {

struct SimParams {
  std::size_t n_families = 0;
  int horizon_years = 10;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string family_id_prefix = "f";
  // Keep families the baseline filter would resample (dead counselee or
  // breast cancer by baseline). Only for penetrance diagnostics.
  bool keep_excluded = false;
};

// Draws complete families: founder genotypes from the Hardy-Weinberg prior,
// descent by Mendelian transmission, ages from the generation-gap model,
// phenotypes from the penetrance tables censored at min(baseline age, death).
// The label y0 marks a latent counselee breast onset inside
// (baseline, baseline + horizon]. Family i is generated from
// derive_seed(seed, i), so outputs are identical for any worker count.
Cohort simulate_cohort(const SimParams& params,
                       const StructureDistribution& structure,
                       const PenetranceModel& model);

}  // namespace pedrisk
