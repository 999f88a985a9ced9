#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "encode/encode.hpp"
#include "nn/network.hpp"

namespace pedrisk {

struct TrainConfig {
  int epochs = 30;
  int batch_size = 256;
  double learning_rate = 1e-3;
  double weight_decay = 0.0;  // L2 on weights only, biases untouched
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  LossKind loss = LossKind::SquaredError;
  std::uint64_t seed = 1;
};

struct TrainResult {
  std::vector<double> epoch_loss;  // full-data loss after each epoch
};

// Minibatch Adam on the flattened parameter vector. `weights` scales each
// sample's loss contribution; pass empty for uniform. The shuffle, dropout
// masks and updates all derive from config.seed, so a rerun is bit-identical.
TrainResult train_network(Network& net, const Mat& X, const Vec& y,
                          const Vec& weights, const TrainConfig& config,
                          const std::function<void(int, double)>& on_epoch = {});

// Copies an encoded dataset into the matrix/vector shapes the trainer wants.
Mat dataset_matrix(const EncodedDataset& data);
Vec dataset_labels(const EncodedDataset& data);

struct GradientCheckResult {
  double max_rel_error = 0.0;
  std::size_t params_checked = 0;
};

// Central-difference check of the analytic gradient on a small batch, run
// with dropout off. Checks every parameter when there are at most
// `max_checks`, otherwise an evenly strided subset.
GradientCheckResult gradient_check(Network& net, const Mat& X, const Vec& y,
                                   LossKind loss, double step = 1e-5,
                                   std::size_t max_checks = 4096);

}  // namespace pedrisk
