#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nn/network.hpp"
#include "nn/train.hpp"

namespace pedrisk {

// Sampling ranges for random search. Layer count and per-layer size are
// integer-uniform, the learning rate is log-uniform, decay and dropout are
// uniform, the activation is drawn from the listed set.
struct SearchSpace {
  int layers_min = 1, layers_max = 3;
  int width_min = 10, width_max = 100;   // fcnn hidden sizes
  int filters_min = 3, filters_max = 10; // cnn channels
  double lr_min = 1e-4, lr_max = 1e-2;
  double decay_min = 0.0, decay_max = 0.01;
  double dropout_min = 0.0, dropout_max = 0.5;
  std::vector<Activation> activations = {Activation::Relu, Activation::Elu};
};

struct SearchCandidate {
  ArchitectureSpec spec;
  TrainConfig train;
  double holdout_auc = 0.0;
};

struct SearchResult {
  std::vector<SearchCandidate> candidates;  // evaluation order
  std::size_t best = 0;
};

// Draws `n_candidates` configurations, trains each on a fixed 90% split and
// scores the held-out 10% by AUC. `base_spec` fixes the geometry and model
// kind; `base_train` fixes epochs/batch/loss. Deterministic in `seed`.
SearchResult random_search(const ArchitectureSpec& base_spec,
                           const TrainConfig& base_train,
                           const SearchSpace& space,
                           const NeighborhoodMap* nbr, const Mat& X,
                           const Vec& y, int n_candidates, std::uint64_t seed);

}  // namespace pedrisk
