#include "sim/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "json.hpp"

namespace pedrisk {

namespace {

MisreportConfig::Rates parse_rates(const nlohmann::json& j,
                                   MisreportConfig::Rates fallback) {
  MisreportConfig::Rates r = fallback;
  r.fnr_deg1 = j.value("fnr_deg1", r.fnr_deg1);
  r.fpr_deg1 = j.value("fpr_deg1", r.fpr_deg1);
  r.fnr_deg2 = j.value("fnr_deg2", r.fnr_deg2);
  r.fpr_deg2 = j.value("fpr_deg2", r.fpr_deg2);
  return r;
}

// Signed integer error: |normal(mean, sd)| rounded, coin-flip sign.
int signed_error(const MisreportConfig& cfg, Rng& rng) {
  int mag = static_cast<int>(
      std::round(std::fabs(rng.normal(cfg.error_mean, cfg.error_sd))));
  return rng.bernoulli(0.5) ? mag : -mag;
}

}  // namespace

MisreportConfig MisreportConfig::parse(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad misreport JSON: ") + e.what(), 0);
  }
  MisreportConfig cfg;
  if (j.contains("breast")) cfg.breast = parse_rates(j["breast"], cfg.breast);
  if (j.contains("ovarian"))
    cfg.ovarian = parse_rates(j["ovarian"], cfg.ovarian);
  cfg.onset_fraction_breast =
      j.value("onset_fraction_breast", cfg.onset_fraction_breast);
  cfg.onset_fraction_ovarian =
      j.value("onset_fraction_ovarian", cfg.onset_fraction_ovarian);
  cfg.current_age_fraction =
      j.value("current_age_fraction", cfg.current_age_fraction);
  cfg.error_mean = j.value("error_mean", cfg.error_mean);
  cfg.error_sd = j.value("error_sd", cfg.error_sd);
  return cfg;
}

MisreportConfig MisreportConfig::load(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open file: " + json_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::vector<Pedigree> perturb_misreport(const std::vector<Pedigree>& peds,
                                        const MisreportConfig& cfg,
                                        std::uint64_t seed) {
  std::vector<Pedigree> out = peds;
  for (std::size_t fi = 0; fi < out.size(); ++fi) {
    Pedigree& p = out[fi];
    Rng rng(derive_seed(seed, fi));
    auto types = classify_all(p);
    for (std::size_t r = 1; r < p.members.size(); ++r) {
      Member& m = p.members[r];
      int degree = relative_type_degree(types[r]);
      bool deg1 = degree == 1;

      // Status flips. A false positive needs a plausible diagnosis age, so
      // members younger than 18 (or with unknown age) are never flipped on.
      auto flip = [&](bool& affected, std::optional<int>& onset,
                      const MisreportConfig::Rates& rates, bool female_only) {
        double fnr = deg1 ? rates.fnr_deg1 : rates.fnr_deg2;
        double fpr = deg1 ? rates.fpr_deg1 : rates.fpr_deg2;
        if (affected) {
          if (rng.bernoulli(fnr)) {
            affected = false;
            onset = 0;
          }
        } else {
          if (female_only && m.sex != Sex::Female) return;
          if (!m.current_age || *m.current_age < 18) return;
          if (rng.bernoulli(fpr)) {
            affected = true;
            onset = 18 + static_cast<int>(
                             rng.uniform_int(*m.current_age - 18 + 1));
          }
        }
      };
      flip(m.bc_affected, m.bc_onset_age, cfg.breast, false);
      flip(m.oc_affected, m.oc_onset_age, cfg.ovarian, true);

      // Diagnosis-age noise on surviving records.
      auto jitter_onset = [&](bool affected, std::optional<int>& onset,
                              double fraction) {
        if (!affected || !onset || *onset <= 0) return;
        if (!rng.bernoulli(fraction)) return;
        int hi = m.current_age ? *m.current_age : 94;
        *onset = std::clamp(*onset + signed_error(cfg, rng), 1, std::max(1, hi));
      };
      jitter_onset(m.bc_affected, m.bc_onset_age, cfg.onset_fraction_breast);
      jitter_onset(m.oc_affected, m.oc_onset_age, cfg.onset_fraction_ovarian);

      // Current-age noise; never report an age below a recorded onset.
      if (m.current_age && rng.bernoulli(cfg.current_age_fraction)) {
        int lo = 1;
        if (m.bc_affected && m.bc_onset_age) lo = std::max(lo, *m.bc_onset_age);
        if (m.oc_affected && m.oc_onset_age) lo = std::max(lo, *m.oc_onset_age);
        m.current_age =
            std::clamp(*m.current_age + signed_error(cfg, rng), lo, 94);
      }
    }
  }
  return out;
}

std::vector<Pedigree> drop_relatives(const std::vector<Pedigree>& peds,
                                     double fraction, DropMode mode,
                                     std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0)
    throw ArgumentError("drop fraction must lie in [0, 1]");
  std::vector<Pedigree> out;
  out.reserve(peds.size());
  for (std::size_t fi = 0; fi < peds.size(); ++fi) {
    const Pedigree& p = peds[fi];
    Rng rng(derive_seed(seed, fi));
    std::vector<bool> keep(p.members.size(), true);
    for (std::size_t r = 1; r < p.members.size(); ++r) {
      const Member& m = p.members[r];
      bool eligible = mode == DropMode::Any ||
                      (!m.bc_affected && !m.oc_affected);
      if (eligible && rng.bernoulli(fraction)) keep[r] = false;
    }
    Pedigree q;
    q.family_id = p.family_id;
    std::vector<int> new_id(p.members.size(), -1);
    for (std::size_t r = 0; r < p.members.size(); ++r) {
      if (!keep[r]) continue;
      new_id[r] = static_cast<int>(q.members.size());
      q.members.push_back(p.members[r]);
    }
    for (Member& m : q.members) {
      m.id = new_id[m.id];
      auto remap = [&](std::optional<int>& ref) {
        if (ref && new_id[*ref] >= 0)
          ref = new_id[*ref];
        else
          ref = std::nullopt;
      };
      remap(m.mother_id);
      remap(m.father_id);
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Pedigree> blank_onset_ages(const std::vector<Pedigree>& peds,
                                       double fraction, std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0)
    throw ArgumentError("blank fraction must lie in [0, 1]");
  std::vector<Pedigree> out = peds;
  for (std::size_t fi = 0; fi < out.size(); ++fi) {
    Rng rng(derive_seed(seed, fi));
    for (std::size_t r = 1; r < out[fi].members.size(); ++r) {
      Member& m = out[fi].members[r];
      if (m.bc_affected && m.bc_onset_age && rng.bernoulli(fraction))
        m.bc_onset_age = std::nullopt;
      if (m.oc_affected && m.oc_onset_age && rng.bernoulli(fraction))
        m.oc_onset_age = std::nullopt;
    }
  }
  return out;
}

std::vector<Pedigree> impute_onset_ages(const std::vector<Pedigree>& peds) {
  std::vector<Pedigree> out = peds;
  for (Pedigree& p : out) {
    for (Member& m : p.members) {
      auto impute = [&](bool affected, std::optional<int>& onset) {
        if (!affected || onset) return;
        if (!m.current_age || *m.current_age > 50)
          onset = 50;
        else
          onset = std::max(1, *m.current_age);
      };
      impute(m.bc_affected, m.bc_onset_age);
      impute(m.oc_affected, m.oc_onset_age);
    }
  }
  return out;
}

}  // namespace pedrisk
