#include <array>
#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "genetics/genetics.hpp"
#include "genetics/penetrance.hpp"
#include "mendelian/peeling.hpp"
#include "support/random_family.hpp"

using namespace pedrisk;

namespace {

const PenetranceModel& model() {
  static PenetranceModel m = build_penetrance(PenetranceConfig{});
  return m;
}

Member woman(int id, int age) {
  Member m;
  m.id = id;
  m.sex = Sex::Female;
  m.current_age = age;
  return m;
}

double max_abs_diff(const ClassPosterior& a, const ClassPosterior& b) {
  double d = 0.0;
  for (int c = 0; c < kNumClasses; ++c)
    d = std::max(d, std::abs(a[c] - b[c]));
  return d;
}

}  // namespace

TEST_CASE("lone counselee reduces to prior times likelihood") {
  Pedigree p;
  p.family_id = "solo";
  p.members.push_back(woman(0, 40));

  auto want_raw = founder_prior(0.014, 0.012);
  ClassPosterior want{};
  double total = 0.0;
  for (int g = 0; g < kNumGenotypes; ++g) {
    double v = want_raw[g] *
               phenotype_likelihood(model(), p.members[0], carrier_class_of(g));
    want[carrier_class_of(g)] += v;
    total += v;
  }
  for (auto& v : want) v /= total;

  auto got = carrier_posterior(p, model());
  CHECK(max_abs_diff(got, want) < 1e-14);
}

TEST_CASE("peeling agrees with exhaustive enumeration") {
  Rng rng(7);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    Pedigree p = testsupport::random_small_family(rng);
    CAPTURE(i);
    REQUIRE(validate(p).empty());
    auto peeled = carrier_posterior(p, model());
    auto brute = brute_force_posterior(p, model());
    double s = peeled[0] + peeled[1] + peeled[2] + peeled[3];
    CHECK(std::abs(s - 1.0) < 1e-12);
    worst = std::max(worst, max_abs_diff(peeled, brute));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("sibling order does not change the posterior") {
  Pedigree p;
  p.family_id = "sibs";
  p.members.push_back(woman(0, 35));
  p.members.push_back(woman(1, 62));
  Member father;
  father.id = 2;
  father.sex = Sex::Male;
  father.current_age = 66;
  p.members.push_back(father);
  Member sick = woman(3, 44);
  sick.bc_affected = true;
  sick.bc_onset_age = 39;
  sick.mother_id = 1;
  sick.father_id = 2;
  Member well = woman(4, 58);
  well.mother_id = 1;
  well.father_id = 2;
  p.members.push_back(sick);
  p.members.push_back(well);

  auto before = carrier_posterior(p, model());
  std::swap(p.members[3], p.members[4]);
  std::swap(p.members[3].id, p.members[4].id);
  auto after = carrier_posterior(p, model());
  CHECK(max_abs_diff(before, after) < 1e-14);
}

TEST_CASE("explicit blank co-parent matches the phantom") {
  Pedigree single;
  single.family_id = "ph";
  Member c = woman(0, 30);
  c.mother_id = 1;
  single.members.push_back(c);
  Member mother = woman(1, 58);
  mother.bc_affected = true;
  mother.bc_onset_age = 41;
  single.members.push_back(mother);

  Pedigree both = single;
  both.members[0].father_id = 2;
  Member blank;
  blank.id = 2;
  blank.sex = Sex::Male;
  both.members.push_back(blank);

  auto a = carrier_posterior(single, model());
  auto b = carrier_posterior(both, model());
  CHECK(max_abs_diff(a, b) < 1e-12);
}

TEST_CASE("family history moves the posterior the right way") {
  Pedigree quiet;
  quiet.family_id = "q";
  quiet.members.push_back(woman(0, 35));
  Member mother = woman(1, 60);
  mother.mother_id.reset();
  quiet.members.push_back(mother);
  quiet.members[0].mother_id = 1;

  Pedigree loud = quiet;
  loud.members[1].bc_affected = true;
  loud.members[1].bc_onset_age = 34;

  auto pq = carrier_posterior(quiet, model());
  auto pl = carrier_posterior(loud, model());
  CHECK(1.0 - pl[0] > 1.0 - pq[0]);

  // An old unaffected counselee has survived more risk years than a young
  // one, so her noncarrier mass must be higher.
  Pedigree young;
  young.family_id = "y";
  young.members.push_back(woman(0, 30));
  Pedigree old = young;
  old.members[0].current_age = 85;
  CHECK(carrier_posterior(old, model())[0] >
        carrier_posterior(young, model())[0]);
}

TEST_CASE("future risk behaves like an interval mass") {
  Member c = woman(0, 40);
  ClassPosterior flat{0.25, 0.25, 0.25, 0.25};

  CHECK(future_risk(flat, c, model(), 0) == 0.0);

  double last = 0.0;
  for (int t : {5, 10, 20, 40}) {
    double r = future_risk(flat, c, model(), t);
    CHECK(r >= last);
    CHECK(r <= 1.0);
    last = r;
  }

  ClassPosterior noncarrier{1, 0, 0, 0};
  ClassPosterior both{0, 0, 0, 1};
  CHECK(future_risk(both, c, model(), 10) >
        future_risk(noncarrier, c, model(), 10));

  Member capped = woman(0, 94);
  CHECK(future_risk(flat, capped, model(), 10) == 0.0);

  Member unknown = woman(0, 40);
  unknown.current_age.reset();
  CHECK_THROWS_AS(future_risk(flat, unknown, model(), 10), ValidationError);
  CHECK_THROWS_AS(future_risk(flat, c, model(), -1), ArgumentError);
}

TEST_CASE("predict_family composes posterior and risk") {
  Rng rng(11);
  Pedigree p = testsupport::random_small_family(rng);
  auto pred = predict_family(p, model(), 10);
  auto post = carrier_posterior(p, model());
  CHECK(max_abs_diff(pred.posterior, post) == 0.0);
  CHECK(pred.risk == future_risk(post, p.counselee(), model(), 10));
}

TEST_CASE("looped pedigrees are rejected") {
  Pedigree p;
  p.family_id = "loop";
  Member c = woman(0, 30);
  c.mother_id = 1;
  c.father_id = 2;
  p.members.push_back(c);
  Member mother = woman(1, 55);
  mother.mother_id = 3;
  p.members.push_back(mother);
  Member father;
  father.id = 2;
  father.sex = Sex::Male;
  father.current_age = 57;
  father.mother_id = 3;
  p.members.push_back(father);
  p.members.push_back(woman(3, 80));
  CHECK_THROWS_AS(carrier_posterior(p, model()), ValidationError);
}

TEST_CASE("brute force rejects families beyond the enumeration cap") {
  Pedigree p;
  p.family_id = "big";
  Member c = woman(0, 30);
  c.mother_id = 1;
  c.father_id = 2;
  p.members.push_back(c);
  p.members.push_back(woman(1, 60));
  Member father;
  father.id = 2;
  father.sex = Sex::Male;
  father.current_age = 62;
  p.members.push_back(father);
  for (int i = 0; i < 9; ++i) {
    Member s = woman(3 + i, 25 + i);
    s.mother_id = 1;
    s.father_id = 2;
    p.members.push_back(s);
  }
  CHECK_THROWS_AS(brute_force_posterior(p, model()), ArgumentError);
  CHECK_NOTHROW(carrier_posterior(p, model()));
}
