#include "mendelian/peeling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "core/errors.hpp"

namespace pedrisk {

namespace {

using Vec9 = std::array<double, kNumGenotypes>;

struct EngineMember {
  Vec9 lik;            // phenotype likelihood per joint genotype
  int mother = -1;     // engine indices; both set or both -1
  int father = -1;
  int child_family = -1;
  std::vector<int> spouse_families;
};

struct NuclearFamily {
  int mother = -1;
  int father = -1;
  std::vector<int> children;
};

// Real members keep their pedigree order; phantoms (unobserved co-parents
// synthesized for half-specified couples) are appended at the end.
struct EnginePedigree {
  std::vector<EngineMember> members;
  std::vector<NuclearFamily> families;
  Vec9 prior;
};

EnginePedigree build_engine(const Pedigree& p, const PenetranceModel& model) {
  EnginePedigree eng;
  eng.prior = founder_prior(model.config().allele_freq1,
                            model.config().allele_freq2);

  const int n = static_cast<int>(p.members.size());
  eng.members.resize(n);
  for (int i = 0; i < n; ++i) {
    ClassPosterior cls_lik;
    for (int c = 0; c < kNumClasses; ++c)
      cls_lik[c] = phenotype_likelihood(model, p.members[i], c);
    for (int g = 0; g < kNumGenotypes; ++g)
      eng.members[i].lik[g] = cls_lik[carrier_class_of(g)];
  }

  // Group children by their literal parent pair; missing halves share one
  // phantom per pair so same-mother children stay full siblings.
  std::map<std::pair<int, int>, int> family_of_pair;
  auto phantom = [&](Sex) {
    EngineMember ph;
    ph.lik.fill(1.0);
    eng.members.push_back(ph);
    return static_cast<int>(eng.members.size()) - 1;
  };
  for (int i = 0; i < n; ++i) {
    const Member& m = p.members[i];
    if (!m.mother_id && !m.father_id) continue;
    auto key = std::make_pair(m.mother_id.value_or(-1),
                              m.father_id.value_or(-1));
    auto it = family_of_pair.find(key);
    int fam;
    if (it == family_of_pair.end()) {
      NuclearFamily f;
      f.mother = key.first >= 0 ? key.first : phantom(Sex::Female);
      f.father = key.second >= 0 ? key.second : phantom(Sex::Male);
      eng.families.push_back(f);
      fam = static_cast<int>(eng.families.size()) - 1;
      family_of_pair.emplace(key, fam);
      eng.members[f.mother].spouse_families.push_back(fam);
      eng.members[f.father].spouse_families.push_back(fam);
    } else {
      fam = it->second;
    }
    eng.families[fam].children.push_back(i);
    eng.members[i].mother = eng.families[fam].mother;
    eng.members[i].father = eng.families[fam].father;
    eng.members[i].child_family = fam;
  }

  // The family graph must be a forest. Any two families share at most one
  // person, so a union-find pass over per-person memberships finds loops.
  std::vector<int> parent(eng.families.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = (int)i;
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < eng.members.size(); ++i) {
    std::vector<int> fams = eng.members[i].spouse_families;
    if (eng.members[i].child_family >= 0)
      fams.push_back(eng.members[i].child_family);
    for (std::size_t k = 1; k < fams.size(); ++k) {
      int a = find(fams[0]);
      int b = find(fams[k]);
      if (a == b)
        throw ValidationError("pedigree '" + p.family_id +
                              "' contains a loop and cannot be peeled");
      parent[a] = b;
    }
  }
  return eng;
}

// Peeling state: anterior vector per member, one outgoing message per
// (family, parent side). Messages are rescaled to max 1; only the direction
// of the final posterior matters.
class Peeler {
 public:
  explicit Peeler(const EnginePedigree& eng) : eng_(eng) {
    ant_.resize(eng.members.size());
    ant_done_.resize(eng.members.size(), false);
    msg_.resize(eng.families.size());
    msg_done_.resize(eng.families.size(), {false, false});
  }

  ClassPosterior posterior_for(int target) {
    Vec9 post = below(target);
    const Vec9 a = anterior(target);
    for (int g = 0; g < kNumGenotypes; ++g) post[g] *= a[g];
    double total = 0.0;
    for (double v : post) total += v;
    if (!(total > 0.0) || !std::isfinite(total))
      throw NumericError("family data has zero likelihood under the model");
    ClassPosterior out{};
    for (int g = 0; g < kNumGenotypes; ++g)
      out[carrier_class_of(g)] += post[g] / total;
    return out;
  }

 private:
  static void rescale(Vec9& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    if (m > 0.0)
      for (double& x : v) x /= m;
  }

  // Sum over a child's genotype of transmission times its below-vector.
  double child_sum(int child, int gm, int gf) {
    const Vec9 b = below(child);
    const double* t = joint_transmission().data() + 0;
    double s = 0.0;
    for (int gc = 0; gc < kNumGenotypes; ++gc)
      s += t[gc * 81 + gm * 9 + gf] * b[gc];
    return s;
  }

  // Own phenotype and every spouse-family subtree, optionally leaving one
  // family out (the one currently being peeled through).
  Vec9 below_except(int i, int excluded_family) {
    Vec9 v = eng_.members[i].lik;
    for (int f : eng_.members[i].spouse_families) {
      if (f == excluded_family) continue;
      const Vec9& m = message(f, i);
      for (int g = 0; g < kNumGenotypes; ++g) v[g] *= m[g];
    }
    return v;
  }

  Vec9 below(int i) { return below_except(i, -1); }

  const Vec9& anterior(int i) {
    if (ant_done_[i]) return ant_[i];
    ant_done_[i] = true;
    const EngineMember& m = eng_.members[i];
    if (m.child_family < 0) {
      ant_[i] = eng_.prior;
      return ant_[i];
    }
    const NuclearFamily& fam = eng_.families[m.child_family];
    Vec9 am = anterior(fam.mother);
    Vec9 bm = below_except(fam.mother, m.child_family);
    Vec9 af = anterior(fam.father);
    Vec9 bf = below_except(fam.father, m.child_family);
    Vec9 out{};
    for (int gm = 0; gm < kNumGenotypes; ++gm) {
      double wm = am[gm] * bm[gm];
      if (wm == 0.0) continue;
      for (int gf = 0; gf < kNumGenotypes; ++gf) {
        double w = wm * af[gf] * bf[gf];
        if (w == 0.0) continue;
        for (int sib : fam.children)
          if (sib != i) w *= child_sum(sib, gm, gf);
        const double* t = joint_transmission().data() + gm * 9 + gf;
        for (int gi = 0; gi < kNumGenotypes; ++gi) out[gi] += w * t[gi * 81];
      }
    }
    rescale(out);
    ant_[i] = out;
    return ant_[i];
  }

  // Message family f sends to parent i: spouse's anterior and remaining
  // families, folded with all the children's subtrees.
  const Vec9& message(int f, int i) {
    const NuclearFamily& fam = eng_.families[f];
    int side = i == fam.mother ? 0 : 1;
    if (msg_done_[f][side]) return msg_[f][side];
    msg_done_[f][side] = true;
    int spouse = side == 0 ? fam.father : fam.mother;
    Vec9 as = anterior(spouse);
    Vec9 bs = below_except(spouse, f);
    Vec9 out{};
    for (int gi = 0; gi < kNumGenotypes; ++gi) {
      double acc = 0.0;
      for (int gs = 0; gs < kNumGenotypes; ++gs) {
        double w = as[gs] * bs[gs];
        if (w == 0.0) continue;
        int gm = side == 0 ? gi : gs;
        int gf = side == 0 ? gs : gi;
        for (int c : fam.children) w *= child_sum(c, gm, gf);
        acc += w;
      }
      out[gi] = acc;
    }
    rescale(out);
    msg_[f][side] = out;
    return msg_[f][side];
  }

  const EnginePedigree& eng_;
  std::vector<Vec9> ant_;
  std::vector<bool> ant_done_;
  std::vector<std::array<Vec9, 2>> msg_;
  std::vector<std::array<bool, 2>> msg_done_;
};

std::vector<int> topological_order(const EnginePedigree& eng) {
  const int n = static_cast<int>(eng.members.size());
  std::vector<int> order;
  std::vector<bool> placed(n, false);
  order.reserve(n);
  while (static_cast<int>(order.size()) < n) {
    bool progress = false;
    for (int i = 0; i < n; ++i) {
      if (placed[i]) continue;
      const EngineMember& m = eng.members[i];
      bool ready = (m.mother < 0 || placed[m.mother]) &&
                   (m.father < 0 || placed[m.father]);
      if (ready) {
        order.push_back(i);
        placed[i] = true;
        progress = true;
      }
    }
    if (!progress)
      throw ValidationError("parent links contain a cycle");
  }
  return order;
}

}  // namespace

ClassPosterior carrier_posterior(const Pedigree& p,
                                 const PenetranceModel& model) {
  EnginePedigree eng = build_engine(p, model);
  Peeler peeler(eng);
  return peeler.posterior_for(0);
}

ClassPosterior brute_force_posterior(const Pedigree& p,
                                     const PenetranceModel& model) {
  EnginePedigree eng = build_engine(p, model);
  const int n = static_cast<int>(eng.members.size());
  if (n > 10)
    throw ArgumentError(
        "brute force enumeration capped at 10 members (phantoms included)");

  std::vector<int> order = topological_order(eng);

  // A childless non-counselee member is moved to the end: its genotype sum
  // collapses into an 81-entry table indexed by its parents, shrinking the
  // enumerated space one decade. Everything else is enumerated in full.
  std::vector<bool> has_children(n, false);
  for (const auto& fam : eng.families)
    if (!fam.children.empty()) {
      has_children[fam.mother] = true;
      has_children[fam.father] = true;
    }
  int collapsed = -1;
  for (int i : order)
    if (i != 0 && !has_children[i]) collapsed = i;  // last such in topo order
  if (collapsed >= 0) {
    order.erase(std::find(order.begin(), order.end(), collapsed));
    order.push_back(collapsed);
  }

  const int digits = collapsed >= 0 ? n - 1 : n;
  std::vector<int> pos_of(n);
  for (int k = 0; k < n; ++k) pos_of[order[k]] = k;

  // Factor tables in enumeration order: founders use prior*lik (9 entries
  // broadcast over parent states), children use transmission*lik.
  std::vector<std::vector<double>> fac(n);
  std::vector<int> mom_pos(n, -1), dad_pos(n, -1);
  for (int k = 0; k < n; ++k) {
    int i = order[k];
    const EngineMember& m = eng.members[i];
    if (m.mother < 0) {
      fac[k].resize(kNumGenotypes);
      for (int g = 0; g < kNumGenotypes; ++g)
        fac[k][g] = eng.prior[g] * m.lik[g];
    } else {
      fac[k].resize(81 * kNumGenotypes);
      for (int gm = 0; gm < kNumGenotypes; ++gm)
        for (int gf = 0; gf < kNumGenotypes; ++gf)
          for (int g = 0; g < kNumGenotypes; ++g)
            fac[k][(gm * 9 + gf) * 9 + g] =
                transmission(g, gm, gf) * m.lik[g];
      mom_pos[k] = pos_of[m.mother];
      dad_pos[k] = pos_of[m.father];
    }
  }

  // Row sums of the collapsed member's factor, per parent pair.
  std::vector<double> rowsum;
  int rs_mom = -1, rs_dad = -1;
  if (collapsed >= 0) {
    const int k = n - 1;
    rowsum.assign(81, 0.0);
    if (mom_pos[k] >= 0) {
      for (int pp = 0; pp < 81; ++pp)
        for (int g = 0; g < kNumGenotypes; ++g)
          rowsum[pp] += fac[k][pp * 9 + g];
      rs_mom = mom_pos[k];
      rs_dad = dad_pos[k];
    } else {
      double s = 0.0;
      for (int g = 0; g < kNumGenotypes; ++g) s += fac[k][g];
      rowsum.assign(81, s);
      rs_mom = rs_dad = 0;  // any digit; constant table
    }
  }

  const int cpos = pos_of[0];
  std::array<double, kNumClasses> acc{};
  std::vector<int> d(digits, 0);
  std::vector<double> prefix(digits + 1, 1.0);

  auto factor_at = [&](int k) -> double {
    if (mom_pos[k] < 0) return fac[k][d[k]];
    return fac[k][(d[mom_pos[k]] * 9 + d[dad_pos[k]]) * 9 + d[k]];
  };

  int k = 0;
  for (;;) {
    // Fill prefix products from position k to the last digit.
    for (; k < digits; ++k) prefix[k + 1] = prefix[k] * factor_at(k);
    double leaf = prefix[digits];
    if (collapsed >= 0) leaf *= rowsum[d[rs_mom] * 9 + d[rs_dad]];
    acc[carrier_class_of(d[cpos])] += leaf;

    // Odometer advance from the last digit.
    k = digits - 1;
    while (k >= 0 && d[k] == kNumGenotypes - 1) d[k--] = 0;
    if (k < 0) break;
    ++d[k];
  }

  double total = acc[0] + acc[1] + acc[2] + acc[3];
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericError("family data has zero likelihood under the model");
  ClassPosterior out{};
  for (int c = 0; c < kNumClasses; ++c) out[c] = acc[c] / total;
  return out;
}

double future_risk(const ClassPosterior& posterior, const Member& counselee,
                   const PenetranceModel& model, int horizon_years) {
  if (!counselee.current_age)
    throw ValidationError("counselee needs a current age for risk prediction");
  if (horizon_years < 0)
    throw ArgumentError("risk horizon must be nonnegative");
  int a0 = std::min(*counselee.current_age, kMaxAge);
  int a1 = std::min(a0 + horizon_years, kMaxAge);
  double risk = 0.0;
  for (int cls = 0; cls < kNumClasses; ++cls) {
    double f0 = model.cumulative(cls, counselee.sex, Cancer::Breast, a0);
    double f1 = model.cumulative(cls, counselee.sex, Cancer::Breast, a1);
    double den = 1.0 - f0;
    if (den > 0.0) risk += posterior[cls] * (f1 - f0) / den;
  }
  return risk;
}

MendelianPrediction predict_family(const Pedigree& p,
                                   const PenetranceModel& model,
                                   int horizon_years) {
  MendelianPrediction out;
  out.posterior = carrier_posterior(p, model);
  out.risk = future_risk(out.posterior, p.counselee(), model, horizon_years);
  return out;
}

std::vector<MendelianPrediction> mendelian_predict(
    const Cohort& cohort, const PenetranceModel& model, int horizon_years,
    int workers) {
  const std::size_t n = cohort.families.size();
  std::vector<MendelianPrediction> out(n);
  if (workers < 1) workers = 1;
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = predict_family(cohort.families[i], model, horizon_years);
    return out;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error = nullptr;
  std::mutex err_mu;
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          out[i] = predict_family(cohort.families[i], model, horizon_years);
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
  return out;
}

}  // namespace pedrisk
