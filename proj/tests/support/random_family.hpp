#pragma once

// Random pedigrees small enough for exhaustive genotype enumeration. The
// structural templates keep real members plus phantom co-parents within the
// brute-force cap while still exercising every likelihood path: missing
// ages, missing onset ages, deceased members, single recorded parents, male
// breast cancer, and ovarian cases.

#include <optional>
#include <string>

#include "core/pedigree.hpp"
#include "core/rng.hpp"

namespace pedrisk::testsupport {

inline Member random_person(Rng& rng, int id, Sex sex,
                            std::optional<int> mother,
                            std::optional<int> father) {
  Member m;
  m.id = id;
  m.sex = sex;
  m.mother_id = mother;
  m.father_id = father;
  int age = 20 + static_cast<int>(rng.uniform_int(70));
  m.deceased = rng.bernoulli(0.2);
  if (id != 0 && rng.bernoulli(0.1))
    m.current_age.reset();
  else
    m.current_age = age;

  double p_bc = sex == Sex::Female ? 0.30 : 0.05;
  if (rng.bernoulli(p_bc)) {
    m.bc_affected = true;
    if (rng.bernoulli(0.15)) {
      m.bc_onset_age.reset();
    } else {
      int hi = m.current_age ? *m.current_age : 80;
      m.bc_onset_age = 18 + static_cast<int>(rng.uniform_int(hi - 18 + 1));
    }
  }
  if (sex == Sex::Female && rng.bernoulli(0.12)) {
    m.oc_affected = true;
    if (rng.bernoulli(0.15)) {
      m.oc_onset_age.reset();
    } else {
      int hi = m.current_age ? *m.current_age : 80;
      m.oc_onset_age = 18 + static_cast<int>(rng.uniform_int(hi - 18 + 1));
    }
  }
  return m;
}

// Members plus phantom co-parents stay at or below 10 in every template, so
// brute_force_posterior always accepts the result.
inline Pedigree random_small_family(Rng& rng) {
  Pedigree p;
  p.family_id = "rand";
  auto add = [&](Sex sex, std::optional<int> mother, std::optional<int> father) {
    int id = static_cast<int>(p.members.size());
    p.members.push_back(random_person(rng, id, sex, mother, father));
    return id;
  };
  Sex csex = rng.bernoulli(0.9) ? Sex::Female : Sex::Male;

  switch (rng.uniform_int(7)) {
    case 0: {  // counselee alone
      add(csex, {}, {});
      break;
    }
    case 1: {  // mother only, phantom father
      add(csex, 1, {});
      add(Sex::Female, {}, {});
      break;
    }
    case 2: {  // both parents, up to two siblings
      add(csex, 1, 2);
      add(Sex::Female, {}, {});
      add(Sex::Male, {}, {});
      int extra = static_cast<int>(rng.uniform_int(3));
      for (int i = 0; i < extra; ++i)
        add(rng.bernoulli(0.5) ? Sex::Female : Sex::Male, 1, 2);
      break;
    }
    case 3: {  // maternal grandparents, sometimes an aunt or uncle
      add(csex, 1, 2);
      add(Sex::Female, 3, 4);
      add(Sex::Male, {}, {});
      add(Sex::Female, {}, {});
      add(Sex::Male, {}, {});
      if (rng.bernoulli(0.6))
        add(rng.bernoulli(0.5) ? Sex::Female : Sex::Male, 3, 4);
      break;
    }
    case 4: {  // female counselee with children, two phantom mates
      add(Sex::Female, 1, {});
      add(Sex::Female, {}, {});
      int kids = 1 + static_cast<int>(rng.uniform_int(2));
      for (int i = 0; i < kids; ++i)
        add(rng.bernoulli(0.5) ? Sex::Female : Sex::Male, 0, {});
      break;
    }
    case 5: {  // three generations on one branch plus a child
      add(Sex::Female, 1, 2);
      add(Sex::Female, 5, {});
      add(Sex::Male, {}, {});
      add(rng.bernoulli(0.5) ? Sex::Female : Sex::Male, 1, 2);
      add(rng.bernoulli(0.5) ? Sex::Female : Sex::Male, 0, {});
      add(Sex::Female, {}, {});
      break;
    }
    default: {  // widest case: parents, three siblings, grandparents, aunt
      add(csex, 1, 2);
      add(Sex::Female, 3, 4);
      add(Sex::Male, {}, {});
      add(Sex::Female, {}, {});
      add(Sex::Male, {}, {});
      for (int i = 0; i < 3; ++i)
        add(rng.bernoulli(0.5) ? Sex::Female : Sex::Male, 1, 2);
      add(rng.bernoulli(0.5) ? Sex::Female : Sex::Male, 3, 4);
      break;
    }
  }
  return p;
}

}  // namespace pedrisk::testsupport
