#include "nn/train.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace pedrisk {

Mat dataset_matrix(const EncodedDataset& data) {
  Mat X(data.n, data.dim);
  for (std::size_t i = 0; i < data.n; ++i) {
    const double* r = data.row(i);
    for (std::size_t j = 0; j < data.dim; ++j)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[j];
  }
  return X;
}

Vec dataset_labels(const EncodedDataset& data) {
  if (data.y.size() != data.n)
    throw ArgumentError("dataset has no outcome column");
  Vec y(data.n);
  for (std::size_t i = 0; i < data.n; ++i)
    y(static_cast<Eigen::Index>(i)) = data.y[i];
  return y;
}

TrainResult train_network(Network& net, const Mat& X, const Vec& y,
                          const Vec& weights, const TrainConfig& config,
                          const std::function<void(int, double)>& on_epoch) {
  const Eigen::Index n = X.rows();
  if (y.size() != n) throw ArgumentError("train: label count mismatch");
  if (n == 0) throw ArgumentError("train: empty dataset");
  Vec w = weights;
  if (w.size() == 0) w = Vec::Ones(n);
  if (w.size() != n) throw ArgumentError("train: weight count mismatch");

  Rng shuffle_rng(derive_seed(config.seed, 0));
  Rng dropout_rng(derive_seed(config.seed, 1));

  std::vector<double> theta;
  net.get_params(theta);
  const std::size_t P = theta.size();
  std::vector<double> m(P, 0.0), v(P, 0.0), grad;
  std::vector<std::uint8_t> is_weight = net.weight_mask();
  Gradients g = net.zero_gradients();
  Network::Cache cache;

  TrainResult result;
  long step_count = 0;
  const int batch = std::max(1, config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::uint32_t> order =
        shuffle_rng.permutation(static_cast<std::size_t>(n));
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index b = std::min<Eigen::Index>(batch, n - start);
      Mat Xb(b, X.cols());
      Vec yb(b), wb(b);
      for (Eigen::Index i = 0; i < b; ++i) {
        Eigen::Index src = order[static_cast<std::size_t>(start + i)];
        Xb.row(i) = X.row(src);
        yb(i) = y(src);
        wb(i) = w(src);
      }
      net.forward(Xb, cache, net.spec().dropout > 0.0 ? &dropout_rng : nullptr);
      net.backward(Xb, cache, yb, wb, config.loss, g);
      Network::flatten_gradients(g, grad);

      ++step_count;
      double bc1 = 1.0 - std::pow(config.adam_beta1, step_count);
      double bc2 = 1.0 - std::pow(config.adam_beta2, step_count);
      for (std::size_t p = 0; p < P; ++p) {
        double gp = grad[p];
        if (is_weight[p] && config.weight_decay > 0.0)
          gp += config.weight_decay * theta[p];
        m[p] = config.adam_beta1 * m[p] + (1.0 - config.adam_beta1) * gp;
        v[p] = config.adam_beta2 * v[p] + (1.0 - config.adam_beta2) * gp * gp;
        theta[p] -= config.learning_rate * (m[p] / bc1) /
                    (std::sqrt(v[p] / bc2) + config.adam_eps);
      }
      net.set_params(theta);
    }
    Vec yhat = net.predict(X);
    double loss = Network::loss_value(yhat, y, w, config.loss);
    result.epoch_loss.push_back(loss);
    if (on_epoch) on_epoch(epoch, loss);
  }
  return result;
}

GradientCheckResult gradient_check(Network& net, const Mat& X, const Vec& y,
                                   LossKind loss, double step,
                                   std::size_t max_checks) {
  Vec w = Vec::Ones(X.rows());
  Network::Cache cache;
  net.forward(X, cache, nullptr);
  Gradients g = net.zero_gradients();
  net.backward(X, cache, y, w, loss, g);
  std::vector<double> analytic;
  Network::flatten_gradients(g, analytic);

  std::vector<double> theta;
  net.get_params(theta);
  const std::size_t P = theta.size();
  const std::size_t stride = P <= max_checks ? 1 : (P + max_checks - 1) / max_checks;

  GradientCheckResult result;
  for (std::size_t p = 0; p < P; p += stride) {
    double keep = theta[p];
    theta[p] = keep + step;
    net.set_params(theta);
    double up = Network::loss_value(net.predict(X), y, w, loss);
    theta[p] = keep - step;
    net.set_params(theta);
    double down = Network::loss_value(net.predict(X), y, w, loss);
    theta[p] = keep;
    double numeric = (up - down) / (2.0 * step);
    double denom = std::max({std::abs(numeric), std::abs(analytic[p]), 1e-8});
    double rel = std::abs(numeric - analytic[p]) / denom;
    result.max_rel_error = std::max(result.max_rel_error, rel);
    ++result.params_checked;
  }
  net.set_params(theta);
  return result;
}

}  // namespace pedrisk
