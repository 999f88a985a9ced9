#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "doctest.h"

#include "core/rng.hpp"
#include "encode/reference.hpp"
#include "nn/checkpoint.hpp"
#include "nn/network.hpp"
#include "nn/search.hpp"
#include "nn/train.hpp"

using namespace pedrisk;

namespace {

Mat random_input(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Mat X(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) X(r, c) = rng.uniform01();
  return X;
}

Vec random_labels(Eigen::Index rows, double rate, std::uint64_t seed) {
  Rng rng(seed);
  Vec y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) y(r) = rng.bernoulli(rate) ? 1.0 : 0.0;
  return y;
}

ArchitectureSpec fcnn_spec(const ReferenceStructure& ref,
                           std::vector<int> hidden,
                           Activation act = Activation::Elu) {
  ArchitectureSpec spec;
  spec.kind = ModelKind::Fcnn;
  spec.hidden = std::move(hidden);
  spec.activation = act;
  spec.dropout = 0.0;
  spec.n_slots = ref.total_slots();
  spec.slot_features = kFeaturesPerSlot;
  return spec;
}

ArchitectureSpec cnn_spec(const ReferenceStructure& ref,
                          std::vector<int> channels,
                          Activation act = Activation::Elu) {
  ArchitectureSpec spec;
  spec.kind = ModelKind::PedigreeCnn;
  spec.channels = std::move(channels);
  spec.activation = act;
  spec.dropout = 0.0;
  spec.n_slots = ref.total_slots();
  spec.slot_features = kFeaturesPerSlot;
  return spec;
}

}  // namespace

TEST_CASE("gradient check passes for both architectures and losses") {
  ReferenceStructure ref = ReferenceStructure::preset("q1s");
  NeighborhoodMap nbr = build_neighborhoods(ref, NeighborhoodSpec{}, 5);
  Mat X = random_input(16, ref.total_slots() * kFeaturesPerSlot, 11);
  Vec y = random_labels(16, 0.4, 12);

  for (Activation act : {Activation::Elu, Activation::Logistic}) {
    for (LossKind loss : {LossKind::CrossEntropy, LossKind::SquaredError}) {
      CAPTURE(static_cast<int>(act));
      CAPTURE(static_cast<int>(loss));
      Network fc = Network::init(fcnn_spec(ref, {30, 10}, act), nullptr, 21);
      REQUIRE(fc.num_params() > 200);
      GradientCheckResult r = gradient_check(fc, X, y, loss);
      CHECK(r.params_checked > 200);
      CHECK(r.max_rel_error < 1e-4);

      Network cn = Network::init(cnn_spec(ref, {10, 5}, act), &nbr, 22);
      REQUIRE(cn.num_params() > 200);
      GradientCheckResult rc = gradient_check(cn, X, y, loss);
      CHECK(rc.params_checked > 200);
      CHECK(rc.max_rel_error < 1e-4);
    }
  }
}

TEST_CASE("gradient check covers weighted samples") {
  ReferenceStructure ref = ReferenceStructure::preset("q1s");
  Mat X = random_input(8, ref.total_slots() * kFeaturesPerSlot, 31);
  Vec y = random_labels(8, 0.5, 32);
  Network fc = Network::init(fcnn_spec(ref, {12}, Activation::Elu), nullptr, 3);

  // Duplicating a sample must match doubling its weight.
  Mat X2(9, X.cols());
  X2.topRows(8) = X;
  X2.row(8) = X.row(0);
  Vec y2(9);
  y2.head(8) = y;
  y2(8) = y(0);
  Vec w = Vec::Ones(8);
  w(0) = 2.0;

  Network::Cache c1, c2;
  fc.forward(X, c1, nullptr);
  fc.forward(X2, c2, nullptr);
  Gradients g1 = fc.zero_gradients();
  Gradients g2 = fc.zero_gradients();
  fc.backward(X, c1, y, w, LossKind::CrossEntropy, g1);
  fc.backward(X2, c2, y2, Vec::Ones(9), LossKind::CrossEntropy, g2);
  std::vector<double> f1, f2;
  Network::flatten_gradients(g1, f1);
  Network::flatten_gradients(g2, f2);
  REQUIRE(f1.size() == f2.size());
  for (std::size_t i = 0; i < f1.size(); ++i)
    CHECK(f1[i] == doctest::Approx(f2[i]).epsilon(1e-12));
}

TEST_CASE("logistic kind bias gradient matches the closed form") {
  ReferenceStructure ref = ReferenceStructure::preset("q1s");
  ArchitectureSpec spec = fcnn_spec(ref, {});
  spec.kind = ModelKind::Logistic;
  Network net = Network::init(spec, nullptr, 7);

  const Eigen::Index n = 6;
  Mat X = Mat::Zero(n, spec.input_dim());
  Vec y(n);
  y << 1, 0, 0, 1, 0, 0;

  Network::Cache cache;
  Vec yhat = net.forward(X, cache, nullptr);
  Gradients g = net.zero_gradients();

  net.backward(X, cache, y, Vec::Ones(n), LossKind::CrossEntropy, g);
  double expect = (yhat - y).mean();
  CHECK(g.out.b(0) == doctest::Approx(expect).epsilon(1e-12));

  net.backward(X, cache, y, Vec::Ones(n), LossKind::SquaredError, g);
  double expect_mse = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    expect_mse += 2.0 * (yhat(i) - y(i)) * yhat(i) * (1.0 - yhat(i));
  expect_mse /= static_cast<double>(n);
  CHECK(g.out.b(0) == doctest::Approx(expect_mse).epsilon(1e-12));
}

TEST_CASE("training separates a linearly separable toy set") {
  ReferenceStructure ref = ReferenceStructure::preset("q1s");
  const int dim = ref.total_slots() * kFeaturesPerSlot;
  Rng rng(99);
  const Eigen::Index n = 20;
  Mat X = Mat::Zero(n, dim);
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = i < n / 2 ? 0.0 : 1.0;
    X(i, 0) = y(i) > 0.5 ? 0.8 + 0.02 * rng.uniform01()
                         : 0.2 + 0.02 * rng.uniform01();
    X(i, 1) = rng.uniform01();
  }

  Network net = Network::init(fcnn_spec(ref, {8}), nullptr, 17);
  TrainConfig cfg;
  cfg.epochs = 80;
  cfg.batch_size = 20;
  cfg.learning_rate = 0.05;
  cfg.loss = LossKind::CrossEntropy;
  cfg.seed = 5;
  TrainResult result = train_network(net, X, y, Vec(), cfg);

  REQUIRE(result.epoch_loss.size() == 80);
  for (int e = 1; e < 5; ++e)
    CHECK(result.epoch_loss[e] < result.epoch_loss[e - 1]);

  Vec pred = net.predict(X);
  for (Eigen::Index i = 0; i < n; ++i)
    CHECK((pred(i) > 0.5) == (y(i) > 0.5));
}

TEST_CASE("squared error training converges to the conditional mean") {
  ReferenceStructure ref = ReferenceStructure::preset("q1s");
  ArchitectureSpec spec = fcnn_spec(ref, {});
  spec.kind = ModelKind::Logistic;
  const int dim = spec.input_dim();

  const Eigen::Index n = 600;
  Mat X = Mat::Zero(n, dim);  // one shared input: best constant is the mean
  Vec y = random_labels(n, 0.3, 41);

  Network net = Network::init(spec, nullptr, 2);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 600;
  cfg.learning_rate = 0.05;
  cfg.loss = LossKind::SquaredError;
  train_network(net, X, y, Vec(), cfg);

  double target = y.mean();
  CHECK(net.predict(X)(0) == doctest::Approx(target).epsilon(0.02));
}

TEST_CASE("training is deterministic in the seed") {
  ReferenceStructure ref = ReferenceStructure::preset("q1s");
  Mat X = random_input(64, ref.total_slots() * kFeaturesPerSlot, 51);
  Vec y = random_labels(64, 0.3, 52);

  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 16;
  cfg.seed = 77;

  ArchitectureSpec spec = fcnn_spec(ref, {10});
  spec.dropout = 0.2;  // exercises the mask stream too
  Network a = Network::init(spec, nullptr, 9);
  Network b = Network::init(spec, nullptr, 9);
  train_network(a, X, y, Vec(), cfg);
  train_network(b, X, y, Vec(), cfg);

  std::vector<double> pa, pb;
  a.get_params(pa);
  b.get_params(pb);
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);
}

TEST_CASE("one convolution layer cannot see past first-degree slots") {
  ReferenceStructure ref = ReferenceStructure::preset("default");
  NeighborhoodMap nbr = build_neighborhoods(ref, NeighborhoodSpec{}, 5);
  Mat X = random_input(4, ref.total_slots() * kFeaturesPerSlot, 61);

  std::vector<int> degree2_slots;
  std::vector<int> degree1_slots;
  for (int s = 0; s < ref.total_slots(); ++s) {
    int deg = relative_type_degree(ref.type_of_slot(s));
    if (deg == 2) degree2_slots.push_back(s);
    if (deg == 1) degree1_slots.push_back(s);
  }
  REQUIRE(!degree2_slots.empty());
  REQUIRE(!degree1_slots.empty());

  Network one = Network::init(cnn_spec(ref, {6}), &nbr, 71);
  Mat g1 = one.prediction_input_gradient(X);
  double deg2_mass = 0.0;
  for (int s : degree2_slots)
    deg2_mass += g1.middleCols(s * kFeaturesPerSlot, kFeaturesPerSlot)
                     .cwiseAbs()
                     .sum();
  CHECK(deg2_mass == 0.0);
  double deg1_mass = 0.0;
  for (int s : degree1_slots)
    deg1_mass += g1.middleCols(s * kFeaturesPerSlot, kFeaturesPerSlot)
                     .cwiseAbs()
                     .sum();
  CHECK(deg1_mass > 0.0);

  Network two = Network::init(cnn_spec(ref, {6, 4}), &nbr, 72);
  Mat g2 = two.prediction_input_gradient(X);
  double deg2_mass_two = 0.0;
  for (int s : degree2_slots)
    deg2_mass_two += g2.middleCols(s * kFeaturesPerSlot, kFeaturesPerSlot)
                         .cwiseAbs()
                         .sum();
  CHECK(deg2_mass_two > 0.0);
}

TEST_CASE("checkpoint round trip is bit exact") {
  ReferenceStructure ref = ReferenceStructure::preset("q2s");
  NeighborhoodMap nbr = build_neighborhoods(ref, NeighborhoodSpec{}, 5);

  ModelBundle bundle;
  bundle.spec = cnn_spec(ref, {7, 3}, Activation::Relu);
  bundle.spec.dropout = 0.35;
  bundle.loss = LossKind::SquaredError;
  bundle.ref = ref;
  bundle.net = Network::init(bundle.spec, &nbr, 123);
  bundle.meta_json = "{\"note\":\"roundtrip\"}";

  EncodedDataset data;
  data.n = 3;
  data.dim = bundle.spec.input_dim();
  data.n_slots = ref.total_slots();
  Mat X = random_input(3, data.dim, 81);
  data.x.assign(X.data(), X.data() + X.size());
  // EncodedDataset rows are sample-major.
  for (Eigen::Index i = 0; i < 3; ++i)
    for (int c = 0; c < data.dim; ++c) data.x[i * data.dim + c] = X(i, c);
  bundle.scaler.fit(data);

  std::string path =
      (std::filesystem::temp_directory_path() / "roundtrip.ckpt").string();
  save_model(path, bundle);
  ModelBundle loaded = load_model(path);
  std::filesystem::remove(path);

  CHECK(loaded.spec.kind == bundle.spec.kind);
  CHECK(loaded.spec.activation == bundle.spec.activation);
  CHECK(loaded.spec.channels == bundle.spec.channels);
  CHECK(loaded.spec.dropout == bundle.spec.dropout);
  CHECK(loaded.loss == bundle.loss);
  CHECK(loaded.ref.slots == bundle.ref.slots);

  std::vector<double> p0, p1;
  bundle.net.get_params(p0);
  loaded.net.get_params(p1);
  REQUIRE(p0.size() == p1.size());
  for (std::size_t i = 0; i < p0.size(); ++i) CHECK(p0[i] == p1[i]);

  CHECK(loaded.scaler.mins() == bundle.scaler.mins());
  CHECK(loaded.scaler.ranges() == bundle.scaler.ranges());

  Mat probe = random_input(5, bundle.spec.input_dim(), 91);
  Vec y0 = bundle.net.predict(probe);
  Vec y1 = loaded.net.predict(probe);
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(y0(i) == y1(i));
}

TEST_CASE("random search stays inside the sampling ranges") {
  ReferenceStructure ref = ReferenceStructure::preset("q1s");
  Mat X = random_input(60, ref.total_slots() * kFeaturesPerSlot, 13);
  Vec y = random_labels(60, 0.5, 14);

  ArchitectureSpec base = fcnn_spec(ref, {10});
  TrainConfig train;
  train.epochs = 2;
  train.batch_size = 30;

  SearchSpace space;
  space.layers_min = 1;
  space.layers_max = 3;
  space.width_min = 10;
  space.width_max = 100;
  SearchResult result = random_search(base, train, space, nullptr, X, y, 6, 3);
  REQUIRE(result.candidates.size() == 6);
  bool widths_vary = false;
  for (const SearchCandidate& c : result.candidates) {
    CHECK(c.train.learning_rate >= space.lr_min);
    CHECK(c.train.learning_rate <= space.lr_max);
    CHECK(c.train.weight_decay >= 0.0);
    CHECK(c.train.weight_decay <= space.decay_max);
    CHECK(c.spec.dropout >= 0.0);
    CHECK(c.spec.dropout <= space.dropout_max);
    REQUIRE(c.spec.hidden.size() >= 1);
    REQUIRE(c.spec.hidden.size() <= 3);
    for (int w : c.spec.hidden) {
      CHECK(w >= space.width_min);
      CHECK(w <= space.width_max);
    }
    if (c.spec.hidden != result.candidates[0].spec.hidden) widths_vary = true;
  }
  CHECK(widths_vary);
  CHECK(result.best < result.candidates.size());

  SearchResult again = random_search(base, train, space, nullptr, X, y, 6, 3);
  CHECK(again.best == result.best);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(again.candidates[i].holdout_auc ==
          doctest::Approx(result.candidates[i].holdout_auc).epsilon(1e-15));
}
