#include "sim/structure.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "json.hpp"

namespace pedrisk {

namespace {
constexpr int kCountCap = 5;
}

int StructureDistribution::CountDist::sample(Rng& rng) const {
  if (probs.empty()) return 0;
  double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(probs.size()) - 1;
}

StructureDistribution::CountDist StructureDistribution::truncated_poisson(
    double lambda, int cap) {
  if (cap < 0 || cap > kCountCap)
    throw ValidationError("relative count cap must lie in [0, 5]");
  CountDist d;
  double total = 0.0;
  double term = std::exp(-lambda);
  for (int k = 0; k <= cap; ++k) {
    d.probs.push_back(term);
    total += term;
    term *= lambda / (k + 1);
  }
  for (double& p : d.probs) p /= total;
  return d;
}

StructureDistribution::CountDist StructureDistribution::always(int count) {
  if (count < 0 || count > kCountCap)
    throw ValidationError("relative count must lie in [0, 5]");
  CountDist d;
  d.probs.assign(count + 1, 0.0);
  d.probs[count] = 1.0;
  return d;
}

StructureDistribution::CountDist StructureDistribution::present_with_prob(
    double p) {
  CountDist d;
  d.probs = {1.0 - p, p};
  return d;
}

StructureDistribution StructureDistribution::defaults() {
  StructureDistribution s;
  auto set = [&](RelativeType t, CountDist d) {
    s.counts[static_cast<int>(t)] = std::move(d);
  };
  set(RelativeType::Counselee, always(1));
  set(RelativeType::Mother, always(1));
  set(RelativeType::Father, always(1));
  set(RelativeType::MaternalGrandmother, always(1));
  set(RelativeType::MaternalGrandfather, always(1));
  set(RelativeType::PaternalGrandmother, always(1));
  set(RelativeType::PaternalGrandfather, always(1));
  set(RelativeType::MaternalAunt, truncated_poisson(2.5, 3));
  set(RelativeType::MaternalUncle, truncated_poisson(2.5, 3));
  set(RelativeType::PaternalAunt, truncated_poisson(2.5, 3));
  set(RelativeType::PaternalUncle, truncated_poisson(2.5, 3));
  set(RelativeType::Sister, truncated_poisson(2.0, 3));
  set(RelativeType::Brother, truncated_poisson(2.0, 3));
  set(RelativeType::Daughter, truncated_poisson(1.2, 2));
  set(RelativeType::Son, truncated_poisson(1.2, 2));
  set(RelativeType::Other, always(0));
  return s;
}

StructureDistribution StructureDistribution::parse(
    const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad structure JSON: ") + e.what(), 0);
  }
  StructureDistribution s = defaults();
  if (j.contains("baseline_age")) {
    const auto& b = j["baseline_age"];
    s.baseline_age_mean = b.value("mean", s.baseline_age_mean);
    s.baseline_age_sd = b.value("sd", s.baseline_age_sd);
    s.baseline_age_min = b.value("min", s.baseline_age_min);
    s.baseline_age_max = b.value("max", s.baseline_age_max);
  }
  if (j.contains("counts")) {
    for (auto it = j["counts"].begin(); it != j["counts"].end(); ++it) {
      auto type = relative_type_from_name(it.key());
      if (!type || *type == RelativeType::Counselee ||
          *type == RelativeType::Other)
        throw ValidationError("unknown relative type in counts: " + it.key());
      const auto& spec = it.value();
      CountDist d;
      if (spec.contains("poisson")) {
        d = truncated_poisson(spec.at("poisson").get<double>(),
                              spec.value("cap", kCountCap));
      } else if (spec.contains("present")) {
        d = present_with_prob(spec.at("present").get<double>());
      } else if (spec.contains("table")) {
        for (const auto& v : spec.at("table"))
          d.probs.push_back(v.get<double>());
        if (d.probs.empty() ||
            d.probs.size() > static_cast<std::size_t>(kCountCap) + 1)
          throw ValidationError("count table for " + it.key() +
                                " must have 1..6 entries");
        double total = 0.0;
        for (double p : d.probs) {
          if (p < 0) throw ValidationError("negative count probability");
          total += p;
        }
        if (total <= 0) throw ValidationError("count table sums to zero");
        for (double& p : d.probs) p /= total;
      } else {
        throw ValidationError("count spec for " + it.key() +
                              " needs poisson, present, or table");
      }
      s.counts[static_cast<int>(*type)] = std::move(d);
    }
  }
  return s;
}

StructureDistribution StructureDistribution::load(
    const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open file: " + json_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void StructureDistribution::save(const std::string& json_path) const {
  nlohmann::json j;
  j["baseline_age"] = {{"mean", baseline_age_mean},
                       {"sd", baseline_age_sd},
                       {"min", baseline_age_min},
                       {"max", baseline_age_max}};
  j["counts"] = nlohmann::json::object();
  for (int t = 0; t < kNumRelativeTypes; ++t) {
    auto type = static_cast<RelativeType>(t);
    if (type == RelativeType::Counselee || type == RelativeType::Other)
      continue;
    j["counts"][relative_type_name(type)] = {
        {"table", counts[t].probs}};
  }
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + json_path);
  out << j.dump(2) << "\n";
}

}  // namespace pedrisk
