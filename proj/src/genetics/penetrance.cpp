#include "genetics/penetrance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "json.hpp"

namespace pedrisk {

namespace {

using nlohmann::json;

double weibull_cdf(double a, double shape, double scale) {
  if (a <= 0.0) return 0.0;
  return 1.0 - std::exp(-std::pow(a / scale, shape));
}

// Scale such that G(median)/G(94) == 1/2; the ratio decreases monotonically
// in the scale, so bisection is safe.
double solve_scale(double median, double shape) {
  auto ratio = [&](double scale) {
    return weibull_cdf(median, shape, scale) /
           weibull_cdf(kMaxAge, shape, scale);
  };
  double lo = 1e-3, hi = 1e5;
  if (ratio(lo) < 0.5 || ratio(hi) > 0.5)
    throw NumericError("onset median " + std::to_string(median) +
                       " not reachable with shape " + std::to_string(shape));
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (ratio(mid) > 0.5)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

ClassValues read_class_values(const json& j, const char* key,
                              const ClassValues& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  ClassValues out = fallback;
  const char* names[kNumClasses] = {"noncarrier", "locus1", "locus2", "both"};
  for (int c = 0; c < kNumClasses; ++c)
    if (v.contains(names[c])) out[c] = v.at(names[c]).get<double>();
  return out;
}

json class_values_to_json(const ClassValues& v) {
  return json{{"noncarrier", v[0]}, {"locus1", v[1]}, {"locus2", v[2]},
              {"both", v[3]}};
}

}  // namespace

PenetranceConfig parse_penetrance_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad penetrance JSON: ") + e.what(), 0);
  }
  PenetranceConfig cfg;
  if (j.contains("allele_freq")) {
    cfg.allele_freq1 = j["allele_freq"].value("locus1", cfg.allele_freq1);
    cfg.allele_freq2 = j["allele_freq"].value("locus2", cfg.allele_freq2);
  }
  if (j.contains("breast")) {
    const auto& b = j["breast"];
    cfg.breast_female_lifetime =
        read_class_values(b, "lifetime", cfg.breast_female_lifetime);
    cfg.breast_male_lifetime =
        read_class_values(b, "male_lifetime", cfg.breast_male_lifetime);
  }
  if (j.contains("ovarian"))
    cfg.ovarian_female_lifetime = read_class_values(
        j["ovarian"], "lifetime", cfg.ovarian_female_lifetime);
  if (j.contains("median_onset")) {
    cfg.median_onset_noncarrier =
        j["median_onset"].value("noncarrier", cfg.median_onset_noncarrier);
    cfg.median_onset_carrier =
        j["median_onset"].value("carrier", cfg.median_onset_carrier);
  }
  if (j.contains("weibull_shape")) {
    const auto& s = j.at("weibull_shape");
    if (s.is_number()) {
      cfg.weibull_shape_noncarrier = s.get<double>();
      cfg.weibull_shape_carrier = s.get<double>();
    } else {
      cfg.weibull_shape_noncarrier =
          s.value("noncarrier", cfg.weibull_shape_noncarrier);
      cfg.weibull_shape_carrier = s.value("carrier", cfg.weibull_shape_carrier);
    }
  }
  if (j.contains("death_age")) {
    cfg.death_age_mean = j["death_age"].value("mean", cfg.death_age_mean);
    cfg.death_age_sd = j["death_age"].value("sd", cfg.death_age_sd);
    cfg.death_age_min = j["death_age"].value("min", cfg.death_age_min);
    cfg.death_age_max = j["death_age"].value("max", cfg.death_age_max);
  }
  if (j.contains("age_gap")) {
    cfg.age_gap_mean = j["age_gap"].value("mean", cfg.age_gap_mean);
    cfg.age_gap_sd = j["age_gap"].value("sd", cfg.age_gap_sd);
  }

  if (cfg.allele_freq1 <= 0 || cfg.allele_freq1 >= 1 ||
      cfg.allele_freq2 <= 0 || cfg.allele_freq2 >= 1)
    throw ValidationError("allele frequencies must lie in (0, 1)");
  for (const auto* lv :
       {&cfg.breast_female_lifetime, &cfg.breast_male_lifetime,
        &cfg.ovarian_female_lifetime})
    for (double v : *lv)
      if (v < 0.0 || v > 1.0)
        throw ValidationError("lifetime values must lie in [0, 1]");
  if (cfg.weibull_shape_noncarrier <= 0 || cfg.weibull_shape_carrier <= 0)
    throw ValidationError("weibull_shape must be positive");
  return cfg;
}

PenetranceConfig load_penetrance_config(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open file: " + json_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_penetrance_config(ss.str());
}

void save_penetrance_config(const PenetranceConfig& cfg,
                            const std::string& json_path) {
  json j;
  j["allele_freq"] = {{"locus1", cfg.allele_freq1},
                      {"locus2", cfg.allele_freq2}};
  j["breast"] = {{"lifetime", class_values_to_json(cfg.breast_female_lifetime)},
                 {"male_lifetime",
                  class_values_to_json(cfg.breast_male_lifetime)}};
  j["ovarian"] = {
      {"lifetime", class_values_to_json(cfg.ovarian_female_lifetime)}};
  j["median_onset"] = {{"noncarrier", cfg.median_onset_noncarrier},
                       {"carrier", cfg.median_onset_carrier}};
  j["weibull_shape"] = {{"noncarrier", cfg.weibull_shape_noncarrier},
                        {"carrier", cfg.weibull_shape_carrier}};
  j["death_age"] = {{"mean", cfg.death_age_mean},
                    {"sd", cfg.death_age_sd},
                    {"min", cfg.death_age_min},
                    {"max", cfg.death_age_max}};
  j["age_gap"] = {{"mean", cfg.age_gap_mean}, {"sd", cfg.age_gap_sd}};
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + json_path);
  out << j.dump(2) << "\n";
}

PenetranceModel build_penetrance(const PenetranceConfig& cfg) {
  PenetranceModel model;
  model.config_ = cfg;

  auto fill = [&](int cls, Sex sex, Cancer cancer, double lifetime) {
    int k = PenetranceModel::idx(cls, sex, cancer);
    auto& onset = model.onset_[k];
    auto& cum = model.cum_[k];
    onset.fill(0.0);
    cum.fill(0.0);
    if (lifetime <= 0.0) return;
    double median = cls == 0 ? cfg.median_onset_noncarrier
                             : cfg.median_onset_carrier;
    double shape = cls == 0 ? cfg.weibull_shape_noncarrier
                            : cfg.weibull_shape_carrier;
    double scale = solve_scale(median, shape);
    double total = weibull_cdf(kMaxAge, shape, scale);
    double prev = 0.0;
    for (int a = 1; a <= kMaxAge; ++a) {
      double f = lifetime * weibull_cdf(a, shape, scale) / total;
      onset[a] = f - prev;
      cum[a] = f;
      prev = f;
    }
    cum[kMaxAge] = lifetime;  // exact despite rounding in the ratio
  };

  for (int cls = 0; cls < kNumClasses; ++cls) {
    fill(cls, Sex::Female, Cancer::Breast, cfg.breast_female_lifetime[cls]);
    fill(cls, Sex::Male, Cancer::Breast, cfg.breast_male_lifetime[cls]);
    fill(cls, Sex::Female, Cancer::Ovarian, cfg.ovarian_female_lifetime[cls]);
    // male ovarian rows stay zero
  }
  model.check();
  return model;
}

void PenetranceModel::check() const {
  for (int cls = 0; cls < kNumClasses; ++cls) {
    for (int s = 0; s < 2; ++s) {
      for (int c = 0; c < kNumCancers; ++c) {
        const auto& onset = onset_[idx(cls, static_cast<Sex>(s),
                                       static_cast<Cancer>(c))];
        double total = 0.0;
        for (int a = 1; a <= kMaxAge; ++a) {
          if (onset[a] < -1e-15)
            throw NumericError("negative onset probability");
          total += onset[a];
        }
        if (total > 1.0 + 1e-9)
          throw NumericError("onset mass exceeds 1");
      }
    }
  }
  for (int a = 1; a <= kMaxAge; ++a)
    if (onset_[idx(0, Sex::Male, Cancer::Ovarian)][a] != 0.0 ||
        onset_[idx(3, Sex::Male, Cancer::Ovarian)][a] != 0.0)
      throw NumericError("male ovarian penetrance must be zero");

  // Carriers accumulate onset mass at least as fast as noncarriers whenever
  // their lifetime risk is at least as large.
  for (int s = 0; s < 2; ++s) {
    for (int c = 0; c < kNumCancers; ++c) {
      Sex sex = static_cast<Sex>(s);
      Cancer cancer = static_cast<Cancer>(c);
      for (int cls = 1; cls < kNumClasses; ++cls) {
        if (lifetime(cls, sex, cancer) < lifetime(0, sex, cancer)) continue;
        for (int a = 1; a <= kMaxAge; ++a)
          if (cumulative(cls, sex, cancer, a) <
              cumulative(0, sex, cancer, a) - 1e-12)
            throw NumericError("carrier cumulative onset fell below noncarrier");
      }
    }
  }
}

int PenetranceModel::sample_onset(int cls, Sex sex, Cancer cancer,
                                  Rng& rng) const {
  const auto& cum = cum_[idx(cls, sex, cancer)];
  double u = rng.uniform01();
  if (u >= cum[kMaxAge]) return 0;
  auto it = std::upper_bound(cum.begin() + 1, cum.end(), u);
  return static_cast<int>(it - cum.begin());
}

double phenotype_likelihood(const PenetranceModel& model, const Member& m,
                            int cls) {
  double lik = 1.0;
  auto one_cancer = [&](bool affected, const std::optional<int>& onset,
                        Cancer cancer) {
    if (affected) {
      if (onset && *onset > 0) {
        lik *= model.onset(cls, m.sex, cancer, std::min(*onset, kMaxAge));
      } else if (m.current_age) {
        lik *= model.cumulative(cls, m.sex, cancer,
                                std::min(*m.current_age, kMaxAge));
      } else {
        lik *= model.lifetime(cls, m.sex, cancer);
      }
    } else if (m.current_age) {
      lik *= 1.0 - model.cumulative(cls, m.sex, cancer,
                                    std::min(*m.current_age, kMaxAge));
    }
    // unaffected with unknown age: no observation window, factor 1
  };
  one_cancer(m.bc_affected, m.bc_onset_age, Cancer::Breast);
  one_cancer(m.oc_affected, m.oc_onset_age, Cancer::Ovarian);
  return lik;
}

}  // namespace pedrisk
