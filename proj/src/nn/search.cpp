#include "nn/search.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "eval/metrics.hpp"

namespace pedrisk {

SearchResult random_search(const ArchitectureSpec& base_spec,
                           const TrainConfig& base_train,
                           const SearchSpace& space,
                           const NeighborhoodMap* nbr, const Mat& X,
                           const Vec& y, int n_candidates, std::uint64_t seed) {
  if (n_candidates < 1) throw ArgumentError("search: needs candidates");
  const Eigen::Index n = X.rows();
  if (n < 10) throw ArgumentError("search: dataset too small to split");

  Rng rng(derive_seed(seed, 0));
  std::vector<std::uint32_t> order = rng.permutation(static_cast<std::size_t>(n));
  const Eigen::Index n_val = std::max<Eigen::Index>(1, n / 10);
  const Eigen::Index n_fit = n - n_val;
  Mat Xf(n_fit, X.cols()), Xv(n_val, X.cols());
  Vec yf(n_fit), yv(n_val);
  for (Eigen::Index i = 0; i < n_fit; ++i) {
    Xf.row(i) = X.row(order[static_cast<std::size_t>(i)]);
    yf(i) = y(order[static_cast<std::size_t>(i)]);
  }
  for (Eigen::Index i = 0; i < n_val; ++i) {
    Xv.row(i) = X.row(order[static_cast<std::size_t>(n_fit + i)]);
    yv(i) = y(order[static_cast<std::size_t>(n_fit + i)]);
  }

  if (space.layers_min < 1 || space.layers_max < space.layers_min ||
      space.width_min < 1 || space.width_max < space.width_min ||
      space.filters_min < 1 || space.filters_max < space.filters_min ||
      space.lr_min <= 0.0 || space.lr_max < space.lr_min ||
      space.decay_max < space.decay_min || space.dropout_min < 0.0 ||
      space.dropout_max >= 1.0 || space.dropout_max < space.dropout_min ||
      space.activations.empty())
    throw ArgumentError("search: malformed sampling ranges");

  auto uniform_in = [&rng](double lo, double hi) {
    return lo + (hi - lo) * rng.uniform01();
  };
  auto int_in = [&rng](int lo, int hi) {
    return lo + static_cast<int>(
                    rng.uniform_int(static_cast<std::uint64_t>(hi - lo) + 1));
  };

  SearchResult result;
  double best_auc = -1.0;
  for (int c = 0; c < n_candidates; ++c) {
    SearchCandidate cand;
    cand.spec = base_spec;
    cand.train = base_train;
    cand.train.learning_rate =
        std::exp(uniform_in(std::log(space.lr_min), std::log(space.lr_max)));
    cand.train.weight_decay = uniform_in(space.decay_min, space.decay_max);
    cand.spec.dropout = uniform_in(space.dropout_min, space.dropout_max);
    cand.spec.activation =
        space.activations[rng.uniform_int(space.activations.size())];
    int layers = int_in(space.layers_min, space.layers_max);
    if (base_spec.kind == ModelKind::Fcnn) {
      cand.spec.hidden.clear();
      for (int l = 0; l < layers; ++l)
        cand.spec.hidden.push_back(int_in(space.width_min, space.width_max));
    } else if (base_spec.kind == ModelKind::PedigreeCnn) {
      cand.spec.channels.clear();
      for (int l = 0; l < layers; ++l)
        cand.spec.channels.push_back(
            int_in(space.filters_min, space.filters_max));
    }
    cand.train.seed = derive_seed(seed, static_cast<std::uint64_t>(c) + 1);

    Network net = Network::init(cand.spec, nbr, cand.train.seed);
    train_network(net, Xf, yf, Vec(), cand.train);
    Vec pv = net.predict(Xv);
    std::vector<double> scores(pv.data(), pv.data() + pv.size());
    std::vector<double> labels(yv.data(), yv.data() + yv.size());
    double a;
    try {
      a = auc(scores, labels);
    } catch (const NumericError&) {
      a = std::nan("");  // one-class holdout; candidate can't be ranked
    }
    cand.holdout_auc = a;
    if (std::isfinite(a) && a > best_auc) {
      best_auc = a;
      result.best = result.candidates.size();
    }
    result.candidates.push_back(std::move(cand));
  }
  return result;
}

}  // namespace pedrisk
