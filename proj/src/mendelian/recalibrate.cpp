#include "mendelian/recalibrate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "json.hpp"

namespace pedrisk {

ReferenceRiskTable ReferenceRiskTable::default_table() {
  ReferenceRiskTable t;
  // Synthetic 10-year baseline breast risks by age band.
  t.age_risk = {{20, 0.004}, {30, 0.007}, {40, 0.015}, {50, 0.024},
                {60, 0.034}, {70, 0.039}, {80, 0.030}};
  return t;
}

ReferenceRiskTable ReferenceRiskTable::load(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open file: " + json_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad reference risk JSON: ") + e.what(), 0);
  }
  ReferenceRiskTable t = default_table();
  if (j.contains("age_risk")) {
    t.age_risk.clear();
    for (const auto& row : j["age_risk"])
      t.age_risk.emplace_back(row.at(0).get<int>(), row.at(1).get<double>());
    std::sort(t.age_risk.begin(), t.age_risk.end());
  }
  if (j.contains("rr")) {
    auto rr = j["rr"];
    if (!rr.is_array() || rr.size() != 3)
      throw ValidationError("rr must list multipliers for 1, 2, >=3 affected");
    for (int i = 0; i < 3; ++i) t.rr[i] = rr[i].get<double>();
  }
  if (t.age_risk.empty())
    throw ValidationError("reference risk table has no age rows");
  return t;
}

void ReferenceRiskTable::save(const std::string& json_path) const {
  nlohmann::json j;
  j["age_risk"] = nlohmann::json::array();
  for (const auto& [age, risk] : age_risk)
    j["age_risk"].push_back({age, risk});
  j["rr"] = {rr[0], rr[1], rr[2]};
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + json_path);
  out << j.dump(2) << "\n";
}

double ReferenceRiskTable::base_risk(int age) const {
  double risk = age_risk.front().second;
  for (const auto& [min_age, r] : age_risk)
    if (age >= min_age) risk = r;
  return risk;
}

int count_affected_first_degree(const Pedigree& p) {
  int count = 0;
  for (std::size_t r = 1; r < p.members.size(); ++r) {
    if (!p.members[r].bc_affected) continue;
    if (relative_type_degree(classify_relative(p, static_cast<int>(r))) == 1)
      ++count;
  }
  return count;
}

double reference_risk(const Pedigree& p, const ReferenceRiskTable& table) {
  const Member& c = p.counselee();
  if (!c.current_age)
    throw ValidationError("counselee needs a current age for reference risk");
  int affected = count_affected_first_degree(p);
  double mult = 1.0;
  if (affected >= 3)
    mult = table.rr[2];
  else if (affected > 0)
    mult = table.rr[affected - 1];
  return std::clamp(table.base_risk(*c.current_age) * mult, 0.0, 1.0);
}

RecalibrationFit recalibrate_fit(const std::vector<double>& predictions,
                                 const std::vector<double>& reference) {
  if (predictions.size() != reference.size() || predictions.empty())
    throw ArgumentError("recalibration needs matched non-empty vectors");
  const double n = static_cast<double>(predictions.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    mx += predictions[i];
    my += reference[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double dx = predictions[i] - mx;
    sxx += dx * dx;
    sxy += dx * (reference[i] - my);
  }
  if (!(sxx > 0.0) || !std::isfinite(sxx))
    throw NumericError("recalibration fit is singular: constant predictions");
  RecalibrationFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double recalibrate_apply(const RecalibrationFit& fit, double prediction) {
  return std::clamp(fit.intercept + fit.slope * prediction, 0.0, 1.0);
}

}  // namespace pedrisk
