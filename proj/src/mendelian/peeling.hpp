#pragma once

#include <array>
#include <vector>

#include "core/pedigree.hpp"
#include "genetics/penetrance.hpp"

namespace pedrisk {

using ClassPosterior = std::array<double, kNumClasses>;

// Carrier-class posterior for the counselee given every recorded phenotype,
// computed by peeling the pedigree nuclear family by nuclear family.
// Members with exactly one recorded parent get an unobserved phantom
// co-parent (one per couple); members with no parents are founders under the
// Hardy-Weinberg prior. Pedigrees whose family graph has a loop are rejected.
ClassPosterior carrier_posterior(const Pedigree& p,
                                 const PenetranceModel& model);

// Same posterior by direct enumeration of the joint genotype space
// (9^members states, phantoms included). Capped at 10 members. Used as the
// reference the peeling engine must agree with.
ClassPosterior brute_force_posterior(const Pedigree& p,
                                     const PenetranceModel& model);

// t-year breast cancer risk for the counselee: posterior-weighted interval
// mass (F(a0+t) - F(a0)) / (1 - F(a0)) per class, table capped at age 94.
double future_risk(const ClassPosterior& posterior, const Member& counselee,
                   const PenetranceModel& model, int horizon_years);

struct MendelianPrediction {
  ClassPosterior posterior;
  double risk = 0.0;
};

MendelianPrediction predict_family(const Pedigree& p,
                                   const PenetranceModel& model,
                                   int horizon_years);

// Whole-cohort scoring; families are independent, so the worker split does
// not change any output bit.
std::vector<MendelianPrediction> mendelian_predict(
    const Cohort& cohort, const PenetranceModel& model, int horizon_years,
    int workers = 1);

}  // namespace pedrisk
