#include "sim/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "core/errors.hpp"
#include "genetics/genetics.hpp"

namespace pedrisk {

namespace {

struct LatentPerson {
  int genotype = 0;
  double chrono_age = 0.0;  // age at baseline had they lived
  double death_age = 200.0;
  Sex sex = Sex::Female;
  std::optional<int> mother_idx, father_idx;  // indices into latent vector
  bool observed = true;  // emitted into the pedigree
  int bc_onset = 0, oc_onset = 0;
};

using Vec9 = std::array<double, kNumGenotypes>;

int sample_founder(const Vec9& prior, Rng& rng) {
  double u = rng.uniform01();
  double acc = 0.0;
  for (int g = 0; g < kNumGenotypes - 1; ++g) {
    acc += prior[g];
    if (u < acc) return g;
  }
  return kNumGenotypes - 1;
}

int transmit_locus(int mother_count, int father_count, Rng& rng) {
  int from_mother = rng.bernoulli(mother_count / 2.0) ? 1 : 0;
  int from_father = rng.bernoulli(father_count / 2.0) ? 1 : 0;
  return from_mother + from_father;
}

int sample_child(int gm, int gf, Rng& rng) {
  int c1 = transmit_locus(locus1_count(gm), locus1_count(gf), rng);
  int c2 = transmit_locus(locus2_count(gm), locus2_count(gf), rng);
  return genotype_index(c1, c2);
}

struct FamilyDraw {
  Pedigree pedigree;
  FamilyTruth truth;
  std::int8_t y0 = 0;
  bool excluded = false;
};

class FamilyBuilder {
 public:
  FamilyBuilder(const StructureDistribution& s, const PenetranceModel& m)
      : structure_(s), model_(m),
        prior_(founder_prior(m.config().allele_freq1,
                             m.config().allele_freq2)) {}

  FamilyDraw draw(Rng& rng, int horizon) const {
    FamilyDraw out;
    const auto& cfg = model_.config();

    auto gap = [&] {
      return rng.normal_trunc(cfg.age_gap_mean, cfg.age_gap_sd, 12.0, 55.0);
    };
    auto death = [&] {
      return rng.normal_trunc(cfg.death_age_mean, cfg.death_age_sd,
                              cfg.death_age_min, cfg.death_age_max);
    };
    auto count_of = [&](RelativeType t) {
      return structure_.counts[static_cast<int>(t)].sample(rng);
    };

    double a0 = std::round(rng.normal_trunc(
        structure_.baseline_age_mean, structure_.baseline_age_sd,
        structure_.baseline_age_min, structure_.baseline_age_max));

    // Latent skeleton. Grandparents and parents always exist as genotype
    // carriers; structure only decides whether they appear in the output.
    std::vector<LatentPerson> people;
    auto add = [&](LatentPerson p) {
      people.push_back(p);
      return static_cast<int>(people.size()) - 1;
    };

    auto founder = [&](Sex sex, double chrono, bool observed) {
      LatentPerson p;
      p.genotype = sample_founder(prior_, rng);
      p.sex = sex;
      p.chrono_age = chrono;
      p.death_age = death();
      p.observed = observed;
      return add(p);
    };
    auto child_of = [&](int mi, int fi, Sex sex, double chrono,
                        bool observed) {
      LatentPerson p;
      p.genotype = sample_child(people[mi].genotype, people[fi].genotype, rng);
      p.sex = sex;
      p.chrono_age = chrono;
      p.death_age = death();
      p.mother_idx = mi;
      p.father_idx = fi;
      p.observed = observed;
      return add(p);
    };

    bool mgm_obs = count_of(RelativeType::MaternalGrandmother) > 0;
    bool mgf_obs = count_of(RelativeType::MaternalGrandfather) > 0;
    bool pgm_obs = count_of(RelativeType::PaternalGrandmother) > 0;
    bool pgf_obs = count_of(RelativeType::PaternalGrandfather) > 0;
    bool mother_obs = count_of(RelativeType::Mother) > 0;
    bool father_obs = count_of(RelativeType::Father) > 0;

    double mother_age = a0 + gap();
    double father_age = a0 + gap();
    int mgm = founder(Sex::Female, mother_age + gap(), mgm_obs);
    int mgf = founder(Sex::Male, mother_age + gap(), mgf_obs);
    int pgm = founder(Sex::Female, father_age + gap(), pgm_obs);
    int pgf = founder(Sex::Male, father_age + gap(), pgf_obs);
    int mother = child_of(mgm, mgf, Sex::Female, mother_age, mother_obs);
    int father = child_of(pgm, pgf, Sex::Male, father_age, father_obs);
    int counselee = child_of(mother, father, Sex::Female, a0, true);

    auto add_counted = [&](RelativeType t, int mi, int fi, Sex sex,
                           double parent_age) {
      int k = count_of(t);
      for (int i = 0; i < k; ++i) {
        double chrono = parent_age - gap();
        if (chrono < 0.0) continue;  // not yet born at baseline
        child_of(mi, fi, sex, chrono, true);
      }
    };
    add_counted(RelativeType::MaternalAunt, mgm, mgf, Sex::Female,
                people[mgm].chrono_age);
    add_counted(RelativeType::MaternalUncle, mgm, mgf, Sex::Male,
                people[mgm].chrono_age);
    add_counted(RelativeType::PaternalAunt, pgm, pgf, Sex::Female,
                people[pgm].chrono_age);
    add_counted(RelativeType::PaternalUncle, pgm, pgf, Sex::Male,
                people[pgm].chrono_age);
    add_counted(RelativeType::Sister, mother, father, Sex::Female, mother_age);
    add_counted(RelativeType::Brother, mother, father, Sex::Male, mother_age);

    // Children descend from the counselee and an unobserved co-parent drawn
    // from the founder prior (one per family).
    int spouse = -1;
    int daughters = count_of(RelativeType::Daughter);
    int sons = count_of(RelativeType::Son);
    auto add_child = [&](Sex sex) {
      double chrono = a0 - gap();
      if (chrono < 0.0) return;
      if (spouse < 0) {
        spouse = founder(Sex::Male, a0 + 2.0, false);
        people[spouse].observed = false;
      }
      child_of(counselee, spouse, sex, chrono, true);
    };
    for (int i = 0; i < daughters; ++i) add_child(Sex::Female);
    for (int i = 0; i < sons; ++i) add_child(Sex::Male);

    // Phenotypes: latent onsets censored at min(baseline age, death age).
    for (auto& p : people) {
      int cls = carrier_class_of(p.genotype);
      p.bc_onset = model_.sample_onset(cls, p.sex, Cancer::Breast, rng);
      p.oc_onset = model_.sample_onset(cls, p.sex, Cancer::Ovarian, rng);
    }

    const LatentPerson& c = people[counselee];
    out.truth.counselee_class = carrier_class_of(c.genotype);
    out.truth.latent_bc_onset = c.bc_onset;
    out.excluded = c.death_age < a0 || (c.bc_onset > 0 && c.bc_onset <= a0);
    out.y0 = (c.bc_onset > 0 && c.bc_onset > a0 &&
              c.bc_onset <= a0 + horizon)
                 ? 1
                 : 0;

    // Emit observed members, counselee first.
    std::vector<int> emit;
    emit.push_back(counselee);
    for (int i = 0; i < static_cast<int>(people.size()); ++i)
      if (i != counselee && people[i].observed) emit.push_back(i);
    std::vector<int> new_id(people.size(), -1);
    for (std::size_t k = 0; k < emit.size(); ++k) new_id[emit[k]] = (int)k;

    for (int idx : emit) {
      const LatentPerson& lp = people[idx];
      Member m;
      m.id = new_id[idx];
      if (lp.mother_idx && new_id[*lp.mother_idx] >= 0)
        m.mother_id = new_id[*lp.mother_idx];
      if (lp.father_idx && new_id[*lp.father_idx] >= 0)
        m.father_id = new_id[*lp.father_idx];
      m.sex = lp.sex;
      double window = std::min(lp.chrono_age, lp.death_age);
      m.deceased = lp.death_age < lp.chrono_age;
      m.current_age = static_cast<int>(
          std::clamp(std::floor(window), 0.0, double(kMaxAge)));
      int w = *m.current_age;
      m.bc_affected = lp.bc_onset > 0 && lp.bc_onset <= w;
      m.bc_onset_age = m.bc_affected ? lp.bc_onset : 0;
      m.oc_affected = lp.oc_onset > 0 && lp.oc_onset <= w;
      m.oc_onset_age = m.oc_affected ? lp.oc_onset : 0;
      out.pedigree.members.push_back(m);
    }
    return out;
  }

 private:
  const StructureDistribution& structure_;
  const PenetranceModel& model_;
  Vec9 prior_;
};

}  // namespace

Cohort simulate_cohort(const SimParams& params,
                       const StructureDistribution& structure,
                       const PenetranceModel& model) {
  Cohort cohort;
  cohort.families.resize(params.n_families);
  cohort.outcomes.resize(params.n_families);
  cohort.truth.resize(params.n_families);

  FamilyBuilder builder(structure, model);
  auto one_family = [&](std::size_t i) {
    Rng rng(derive_seed(params.seed, i));
    FamilyDraw draw;
    for (int attempt = 0;; ++attempt) {
      draw = builder.draw(rng, params.horizon_years);
      if (params.keep_excluded || !draw.excluded) break;
      if (attempt > 100000)
        throw NumericError("baseline filter rejected every draw");
    }
    draw.pedigree.family_id = params.family_id_prefix + std::to_string(i);
    cohort.families[i] = std::move(draw.pedigree);
    cohort.outcomes[i] = draw.y0;
    cohort.truth[i] = draw.truth;
  };

  int workers = std::max(1, params.workers);
  if (workers == 1 || params.n_families < 2) {
    for (std::size_t i = 0; i < params.n_families; ++i) one_family(i);
    return cohort;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error = nullptr;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= params.n_families) return;
        try {
          one_family(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return cohort;
}

}  // namespace pedrisk
