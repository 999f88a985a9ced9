#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "eval/bootstrap.hpp"
#include "eval/ipcw.hpp"
#include "eval/metrics.hpp"

using namespace pedrisk;

namespace {
using V = std::vector<double>;
}

TEST_CASE("auc pair counting") {
  // Four subjects, one discordant pair out of four: 3/4.
  V scores{0.1, 0.4, 0.35, 0.8};
  V labels{0, 0, 1, 1};
  CHECK(auc(scores, labels) == doctest::Approx(0.75).epsilon(1e-12));

  // Upweighting the easy negative shifts the pair mass: 5/6.
  V w{2, 1, 1, 1};
  CHECK(auc(scores, labels, w) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

  CHECK(auc({0.3, 0.3, 0.3, 0.3}, labels) == doctest::Approx(0.5));
  CHECK(auc({0.0, 1.0}, {0.0, 1.0}) == doctest::Approx(1.0));
  CHECK(auc({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(0.0));

  CHECK_THROWS_AS(auc({0.1, 0.2}, {0.0, 0.0}), NumericError);
  CHECK_THROWS_AS(auc({0.1, 0.2}, {1.0, 1.0}), NumericError);
}

TEST_CASE("auc invariant under strictly monotone transforms") {
  Rng rng(555);
  V scores, labels;
  for (int i = 0; i < 400; ++i) {
    scores.push_back(rng.uniform01());
    labels.push_back(rng.uniform01() < 0.3 ? 1.0 : 0.0);
  }
  double base = auc(scores, labels);
  V warped;
  for (double s : scores) warped.push_back(1.0 / (1.0 + std::exp(-(3 * s - 1))));
  CHECK(auc(warped, labels) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("average precision fixtures") {
  // Ranked desc: 1 at rank 1 (prec 1), 1 at rank 3 (prec 2/3) -> mean 5/6.
  CHECK(average_precision({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(average_precision({0.9, 0.8, 0.1}, {1, 1, 0}) == doctest::Approx(1.0));
  // One tied block: precision equals prevalence.
  CHECK(average_precision({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}) ==
        doctest::Approx(0.5));
}

TEST_CASE("random scores give pr-auc near prevalence") {
  Rng rng(2026);
  V scores, labels;
  const double prevalence = 0.029;
  for (int i = 0; i < 20000; ++i) {
    scores.push_back(rng.uniform01());
    labels.push_back(rng.uniform01() < prevalence ? 1.0 : 0.0);
  }
  double ap = average_precision(scores, labels);
  double observed = 0.0;
  for (double y : labels) observed += y;
  observed /= static_cast<double>(labels.size());
  CHECK(std::abs(ap - observed) < 0.005);
}

TEST_CASE("oe ratio") {
  CHECK(oe_ratio({0.2, 0.4}, {1, 0}) == doctest::Approx(1.0 / 0.6));
  // Weights scale observed and expected sums together.
  CHECK(oe_ratio({0.2, 0.4, 0.4}, {1, 0, 1}, {1, 1, 2}) ==
        doctest::Approx(3.0 / 1.4).epsilon(1e-12));
  CHECK(oe_ratio({0.5, 0.5}, {1, 0}) == doctest::Approx(1.0));
}

TEST_CASE("brier score") {
  CHECK(brier({0.2, 0.7}, {0, 1}) == doctest::Approx(0.065).epsilon(1e-12));
  CHECK(brier({0.0, 1.0}, {0, 1}) == doctest::Approx(0.0));
  // Weighted: (2*0.04 + 0.09) / 3.
  CHECK(brier({0.2, 0.7}, {0, 1}, {2, 1}) ==
        doctest::Approx(0.17 / 3.0).epsilon(1e-12));
}

TEST_CASE("calibration bins") {
  SUBCASE("predictions equal to labels bin exactly") {
    V preds, labels;
    for (int i = 0; i < 50; ++i) {
      preds.push_back(i < 25 ? 0.0 : 1.0);
      labels.push_back(preds.back());
    }
    auto bins = calibration_bins(preds, labels, {}, 10);
    REQUIRE(bins.size() == 10);
    for (const auto& b : bins) {
      CHECK(b.mean_pred == doctest::Approx(b.mean_obs));
      CHECK(b.count == 5);
    }
  }
  SUBCASE("constant predictions replicate one bin") {
    V preds(40, 0.3), labels(40, 0.0);
    for (int i = 0; i < 12; ++i) labels[i] = 1.0;
    auto bins = calibration_bins(preds, labels, {}, 10);
    for (const auto& b : bins) CHECK(b.mean_pred == doctest::Approx(0.3));
  }
  SUBCASE("bernoulli labels match within binomial noise") {
    Rng rng(99);
    V preds, labels;
    for (int i = 0; i < 20000; ++i) {
      double p = rng.uniform01();
      preds.push_back(p);
      labels.push_back(rng.uniform01() < p ? 1.0 : 0.0);
    }
    auto bins = calibration_bins(preds, labels, {}, 10);
    for (const auto& b : bins) {
      double se =
          std::sqrt(b.mean_pred * (1.0 - b.mean_pred) /
                    static_cast<double>(b.count));
      CHECK(std::abs(b.mean_obs - b.mean_pred) < 3.0 * se + 0.03);
    }
  }
}

TEST_CASE("correlation fixtures") {
  CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
  CHECK(pearson({1, 2, 3}, {6, 4, 2}) == doctest::Approx(-1.0));
  CHECK(pearson({1, 2, 4}, {1, 3, 3}) ==
        doctest::Approx(2.0 / std::sqrt(7.0)).epsilon(1e-12));

  // Rank correlation sees through monotone warps.
  CHECK(spearman({1, 2, 3, 4}, {1, 8, 27, 64}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 2, 3}, {10, 20, 30, 40}) ==
        doctest::Approx(std::sqrt(0.9)).epsilon(1e-12));

  auto r = average_ranks({10, 20, 20, 30});
  REQUIRE(r.size() == 4);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(r[1] == doctest::Approx(2.5));
  CHECK(r[2] == doctest::Approx(2.5));
  CHECK(r[3] == doctest::Approx(4.0));
}

TEST_CASE("ipcw weights") {
  SUBCASE("hand-computed reverse km fixture") {
    // Censorings at 1 (6 at risk) and 3 (4 at risk): G drops to 5/6 then
    // 5/6 * 3/4 = 5/8. Weights: event@2 -> 1/G(2-) = 1.2; event@4 and
    // everyone followed past the horizon -> 1/G = 1.6; censored pre-horizon
    // subjects are zeroed out.
    std::vector<FollowUp> fu{{1, false}, {2, true}, {3, false},
                             {4, true},  {6, false}, {7, true}};
    auto w = ipcw_weights(fu, 5.0);
    REQUIRE(w.size() == 6);
    CHECK(w[0] == doctest::Approx(0.0));
    CHECK(w[1] == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(w[2] == doctest::Approx(0.0));
    CHECK(w[3] == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(w[4] == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(w[5] == doctest::Approx(1.6).epsilon(1e-12));

    auto y = ipcw_labels(fu, 5.0);
    CHECK(y == V{0, 1, 0, 1, 0, 0});
  }
  SUBCASE("no censoring gives unit weights") {
    std::vector<FollowUp> fu{{1, true}, {2, true}, {12, false}, {30, false}};
    for (double w : ipcw_weights(fu, 10.0)) CHECK(w == doctest::Approx(1.0));
  }
  SUBCASE("all censored at baseline are excluded") {
    std::vector<FollowUp> fu{{0, false}, {0, false}};
    for (double w : ipcw_weights(fu, 5.0)) CHECK(w == doctest::Approx(0.0));
  }
}

TEST_CASE("bootstrap comparison") {
  Rng rng(7);
  V labels, perfect, random_scores;
  for (int i = 0; i < 1000; ++i) {
    double y = rng.uniform01() < 0.1 ? 1.0 : 0.0;
    labels.push_back(y);
    perfect.push_back(y * 0.8 + 0.1);
    random_scores.push_back(rng.uniform01());
  }

  SUBCASE("identical models tie every replicate") {
    auto cmp = bootstrap_compare({"a", "b"}, {perfect, perfect}, labels, {},
                                 50, 0.95, 11);
    CHECK(cmp.auc_wins[0][1] == doctest::Approx(0.0));
    CHECK(cmp.auc_wins[1][0] == doctest::Approx(0.0));
    CHECK(cmp.oe_wins[0][1] == doctest::Approx(0.0));
    double tie = 1.0 - cmp.auc_wins[0][1] - cmp.auc_wins[1][0];
    CHECK(tie == doctest::Approx(1.0));
  }
  SUBCASE("perfect predictor dominates a random one") {
    auto cmp = bootstrap_compare({"good", "noise"}, {perfect, random_scores},
                                 labels, {}, 200, 0.95, 12);
    CHECK(cmp.auc_wins[0][1] == doctest::Approx(1.0));
    CHECK(cmp.auc[0].lo <= cmp.auc[0].point);
    CHECK(cmp.auc[0].point <= cmp.auc[0].hi);
  }
  SUBCASE("same seed reproduces, different seed varies") {
    auto a = bootstrap_compare({"good", "noise"}, {perfect, random_scores},
                               labels, {}, 60, 0.95, 21);
    auto b = bootstrap_compare({"good", "noise"}, {perfect, random_scores},
                               labels, {}, 60, 0.95, 21);
    auto c = bootstrap_compare({"good", "noise"}, {perfect, random_scores},
                               labels, {}, 60, 0.95, 22);
    CHECK(a.auc[1].lo == b.auc[1].lo);
    CHECK(a.auc[1].hi == b.auc[1].hi);
    CHECK(a.auc[1].lo != c.auc[1].lo);
  }
  SUBCASE("single replicate collapses the interval") {
    auto cmp = bootstrap_compare({"m"}, {perfect}, labels, {}, 1, 0.95, 5);
    CHECK(cmp.auc[0].lo == doctest::Approx(cmp.auc[0].hi));
    CHECK(cmp.auc[0].valid_replicates == 1);
  }
}

TEST_CASE("summarize_replicates drops non-finite values") {
  auto s = summarize_replicates(
      0.5, {std::nan(""), 0.2, 0.4, 0.6}, 0.95);
  CHECK(s.valid_replicates == 3);
  CHECK(s.point == doctest::Approx(0.5));
  CHECK(s.lo >= 0.2);
  CHECK(s.hi <= 0.6);
  CHECK(s.lo <= s.hi);
}
