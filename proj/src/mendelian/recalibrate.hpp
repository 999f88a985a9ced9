#pragma once

#include <array>
#include <string>
#include <vector>

#include "core/pedigree.hpp"

namespace pedrisk {

// Population baseline risk by counselee age, scaled by a relative-risk
// ladder over the number of breast-affected first-degree relatives
// (1.0 / 1.8 / 2.9 / 3.9 for 0 / 1 / 2 / 3-or-more).
struct ReferenceRiskTable {
  // (minimum age, horizon risk) rows sorted by age; lookup takes the last
  // row at or below the counselee age.
  std::vector<std::pair<int, double>> age_risk;
  std::array<double, 3> rr = {1.8, 2.9, 3.9};

  static ReferenceRiskTable default_table();
  static ReferenceRiskTable load(const std::string& json_path);
  void save(const std::string& json_path) const;

  double base_risk(int age) const;
};

int count_affected_first_degree(const Pedigree& p);

// Family-history-adjusted reference risk, clamped to [0, 1].
double reference_risk(const Pedigree& p, const ReferenceRiskTable& table);

struct RecalibrationFit {
  double slope = 1.0;
  double intercept = 0.0;
};

// Ordinary least squares of reference risks on model predictions. Constant
// predictions make the fit singular and are reported as a numeric error.
RecalibrationFit recalibrate_fit(const std::vector<double>& predictions,
                                 const std::vector<double>& reference);

double recalibrate_apply(const RecalibrationFit& fit, double prediction);

}  // namespace pedrisk
