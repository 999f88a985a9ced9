#include <array>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/pedigree.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "genetics/genetics.hpp"
#include "genetics/penetrance.hpp"

using namespace pedrisk;

TEST_CASE("hardy-weinberg priors") {
  auto p = hwe_prior(0.014);
  CHECK(p[0] == doctest::Approx(0.986 * 0.986).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(2 * 0.014 * 0.986).epsilon(1e-14));
  CHECK(p[2] == doctest::Approx(0.014 * 0.014).epsilon(1e-14));
  CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-14));

  auto joint = founder_prior(0.014, 0.012);
  double total = std::accumulate(joint.begin(), joint.end(), 0.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  auto q = hwe_prior(0.012);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(joint[genotype_index(a, b)] ==
            doctest::Approx(p[a] * q[b]).epsilon(1e-14));
}

TEST_CASE("single locus transmission") {
  // Each parent passes the pathogenic allele with probability count/2, so
  // rows are exact binomial mixtures.
  for (int m = 0; m < 3; ++m)
    for (int f = 0; f < 3; ++f) {
      double sum = 0.0;
      for (int c = 0; c < 3; ++c) sum += locus_transmission(c, m, f);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
  CHECK(locus_transmission(0, 0, 0) == doctest::Approx(1.0));
  CHECK(locus_transmission(1, 0, 0) == doctest::Approx(0.0));
  // Het x noncarrier: child is het with probability 1/2.
  CHECK(locus_transmission(0, 1, 0) == doctest::Approx(0.5));
  CHECK(locus_transmission(1, 1, 0) == doctest::Approx(0.5));
  CHECK(locus_transmission(2, 1, 0) == doctest::Approx(0.0));
  // Het x het: 1/4, 1/2, 1/4.
  CHECK(locus_transmission(0, 1, 1) == doctest::Approx(0.25));
  CHECK(locus_transmission(1, 1, 1) == doctest::Approx(0.5));
  CHECK(locus_transmission(2, 1, 1) == doctest::Approx(0.25));
  // Hom x hom: child always hom.
  CHECK(locus_transmission(2, 2, 2) == doctest::Approx(1.0));
}

TEST_CASE("joint transmission factorizes over loci") {
  for (int gm : {0, 4, 8}) {
    for (int gf : {0, 1, 5}) {
      double sum = 0.0;
      for (int gc = 0; gc < kNumGenotypes; ++gc) {
        double expect =
            locus_transmission(locus1_count(gc), locus1_count(gm),
                               locus1_count(gf)) *
            locus_transmission(locus2_count(gc), locus2_count(gm),
                               locus2_count(gf));
        CHECK(transmission(gc, gm, gf) == doctest::Approx(expect).epsilon(1e-14));
        sum += transmission(gc, gm, gf);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("carrier class collapse") {
  CHECK(carrier_class_of(genotype_index(0, 0)) == 0);
  CHECK(carrier_class_of(genotype_index(1, 0)) == 1);
  CHECK(carrier_class_of(genotype_index(2, 0)) == 1);
  CHECK(carrier_class_of(genotype_index(0, 1)) == 2);
  CHECK(carrier_class_of(genotype_index(0, 2)) == 2);
  CHECK(carrier_class_of(genotype_index(1, 1)) == 3);
  CHECK(carrier_class_of(genotype_index(2, 2)) == 3);
}

TEST_CASE("penetrance tables hit lifetime targets") {
  auto model = build_penetrance(PenetranceConfig{});
  const auto& cfg = model.config();
  for (int cls = 0; cls < kNumClasses; ++cls) {
    CHECK(model.lifetime(cls, Sex::Female, Cancer::Breast) ==
          doctest::Approx(cfg.breast_female_lifetime[cls]).epsilon(1e-12));
    CHECK(model.lifetime(cls, Sex::Male, Cancer::Breast) ==
          doctest::Approx(cfg.breast_male_lifetime[cls]).epsilon(1e-12));
    CHECK(model.lifetime(cls, Sex::Female, Cancer::Ovarian) ==
          doctest::Approx(cfg.ovarian_female_lifetime[cls]).epsilon(1e-12));
    CHECK(model.lifetime(cls, Sex::Male, Cancer::Ovarian) == 0.0);
  }
}

TEST_CASE("penetrance conditional medians land on the configured ages") {
  auto model = build_penetrance(PenetranceConfig{});
  // Half the lifetime mass sits at or before the configured median age, so
  // the cumulative there must equal lifetime/2 up to solver tolerance.
  auto mass_at = [&](int cls, int age) {
    return model.cumulative(cls, Sex::Female, Cancer::Breast, age) /
           model.lifetime(cls, Sex::Female, Cancer::Breast);
  };
  CHECK(mass_at(0, 65) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mass_at(1, 45) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mass_at(3, 45) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mass_at(0, 64) < 0.5);
  CHECK(mass_at(0, 66) > 0.5);
  CHECK(mass_at(1, 44) < 0.5);
  CHECK(mass_at(1, 46) > 0.5);
}

TEST_CASE("carrier cumulative onset dominates noncarrier") {
  auto model = build_penetrance(PenetranceConfig{});
  for (int cls = 1; cls < kNumClasses; ++cls)
    for (int a = 1; a <= kMaxAge; ++a)
      CHECK(model.cumulative(cls, Sex::Female, Cancer::Breast, a) >=
            model.cumulative(0, Sex::Female, Cancer::Breast, a) - 1e-12);
}

TEST_CASE("early onset is much stronger carrier evidence than late onset") {
  auto model = build_penetrance(PenetranceConfig{});
  auto ratio = [&](int age) {
    return model.onset(3, Sex::Female, Cancer::Breast, age) /
           model.onset(0, Sex::Female, Cancer::Breast, age);
  };
  CHECK(ratio(35) > 10.0);
  CHECK(ratio(35) > ratio(60));
  CHECK(ratio(60) > ratio(80));
  // A diagnosis never argues against carriage at any age.
  for (int a = 25; a <= kMaxAge; ++a) CHECK(ratio(a) > 1.0);
}

TEST_CASE("onset sampling matches the table") {
  auto model = build_penetrance(PenetranceConfig{});
  Rng rng(31);
  const int n = 200000;
  int affected = 0;
  double sum_age = 0.0;
  for (int i = 0; i < n; ++i) {
    int a = model.sample_onset(1, Sex::Female, Cancer::Breast, rng);
    if (a > 0) {
      ++affected;
      sum_age += a;
    }
  }
  double rate = static_cast<double>(affected) / n;
  CHECK(rate == doctest::Approx(0.65).epsilon(0.01));
  // Mean latent onset age matches the table expectation.
  double expect = 0.0;
  for (int a = 1; a <= kMaxAge; ++a)
    expect += a * model.onset(1, Sex::Female, Cancer::Breast, a);
  expect /= model.lifetime(1, Sex::Female, Cancer::Breast);
  CHECK(sum_age / affected == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("phenotype likelihood uses the right table rows") {
  auto model = build_penetrance(PenetranceConfig{});
  Member m;
  m.sex = Sex::Female;
  m.current_age = 50;

  SUBCASE("unaffected survival term") {
    for (int cls = 0; cls < kNumClasses; ++cls)
      CHECK(phenotype_likelihood(model, m, cls) ==
            doctest::Approx(
                (1.0 - model.cumulative(cls, Sex::Female, Cancer::Breast, 50)) *
                (1.0 - model.cumulative(cls, Sex::Female, Cancer::Ovarian, 50))));
  }
  SUBCASE("affected with onset age uses the onset mass") {
    m.bc_affected = true;
    m.bc_onset_age = 42;
    double expect =
        model.onset(2, Sex::Female, Cancer::Breast, 42) *
        (1.0 - model.cumulative(2, Sex::Female, Cancer::Ovarian, 50));
    CHECK(phenotype_likelihood(model, m, 2) == doctest::Approx(expect));
  }
  SUBCASE("affected with unknown onset age falls back to cumulative") {
    m.bc_affected = true;
    m.bc_onset_age.reset();
    double expect =
        model.cumulative(1, Sex::Female, Cancer::Breast, 50) *
        (1.0 - model.cumulative(1, Sex::Female, Cancer::Ovarian, 50));
    CHECK(phenotype_likelihood(model, m, 1) == doctest::Approx(expect));
  }
  SUBCASE("unknown age contributes no observation window") {
    Member blank;
    blank.sex = Sex::Male;
    blank.current_age.reset();
    for (int cls = 0; cls < kNumClasses; ++cls)
      CHECK(phenotype_likelihood(model, blank, cls) == doctest::Approx(1.0));
  }
}

TEST_CASE("penetrance config roundtrip and validation") {
  PenetranceConfig cfg;
  cfg.allele_freq1 = 0.02;
  cfg.weibull_shape_noncarrier = 4.0;
  cfg.weibull_shape_carrier = 1.8;
  std::string path = "penetrance_roundtrip.json";
  save_penetrance_config(cfg, path);
  auto back = load_penetrance_config(path);
  CHECK(back.allele_freq1 == doctest::Approx(0.02));
  CHECK(back.weibull_shape_noncarrier == doctest::Approx(4.0));
  CHECK(back.weibull_shape_carrier == doctest::Approx(1.8));
  CHECK(back.breast_female_lifetime[3] == doctest::Approx(0.79));

  CHECK_THROWS_AS(parse_penetrance_config("{\"allele_freq\":{\"locus1\":1.5}}"),
                  ValidationError);
  CHECK_THROWS_AS(parse_penetrance_config("{\"weibull_shape\":-1}"),
                  ValidationError);
  CHECK_THROWS_AS(parse_penetrance_config("not json"), ParseError);
  // Scalar shape applies to both curves.
  auto both = parse_penetrance_config("{\"weibull_shape\":3.0}");
  CHECK(both.weibull_shape_noncarrier == doctest::Approx(3.0));
  CHECK(both.weibull_shape_carrier == doctest::Approx(3.0));
}
