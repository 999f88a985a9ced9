#include "nn/network.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace pedrisk {

namespace {

Mat activation_apply(const Mat& z, Activation a) {
  switch (a) {
    case Activation::Relu:
      return z.cwiseMax(0.0);
    case Activation::Elu:
      return z.unaryExpr(
          [](double v) { return v > 0.0 ? v : std::expm1(v); });
    case Activation::Logistic:
      return z.unaryExpr(
          [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  }
  return z;
}

// Slope recovered from the activation value itself. Works because every
// supported function has a derivative expressible in its output: relu is
// 1 iff the output is positive, elu is exp(z) = output + 1 on the negative
// branch, logistic is a(1-a).
Mat activation_slope(const Mat& act, Activation a) {
  switch (a) {
    case Activation::Relu:
      return (act.array() > 0.0).cast<double>().matrix();
    case Activation::Elu:
      return act.unaryExpr(
          [](double v) { return v > 0.0 ? 1.0 : v + 1.0; });
    case Activation::Logistic:
      return (act.array() * (1.0 - act.array())).matrix();
  }
  return Mat::Ones(act.rows(), act.cols());
}

Vec sigmoid(const Vec& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

DenseLayer glorot_layer(int out, int in, Rng& rng) {
  DenseLayer l;
  l.W.resize(out, in);
  double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  for (int c = 0; c < in; ++c)
    for (int r = 0; r < out; ++r)
      l.W(r, c) = limit * (2.0 * rng.uniform01() - 1.0);
  l.b = Vec::Zero(out);
  return l;
}

// Keep-probability-scaled mask: entries are 0 or 1/(1-p), so multiplying by
// the mask both drops and rescales (the deterministic pass needs no change).
Mat dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
  Mat m(rows, cols);
  double keep = 1.0 - p;
  double scale = 1.0 / keep;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
      m(r, c) = rng.uniform01() < keep ? scale : 0.0;
  return m;
}

}  // namespace

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Logistic: return "logistic";
    case ModelKind::Fcnn: return "fcnn";
    case ModelKind::PedigreeCnn: return "pedigree_cnn";
  }
  return "unknown";
}

const char* loss_kind_name(LossKind k) {
  return k == LossKind::CrossEntropy ? "cross_entropy" : "squared_error";
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Elu: return "elu";
    case Activation::Logistic: return "logistic";
  }
  return "unknown";
}

Network Network::init(const ArchitectureSpec& spec, const NeighborhoodMap* nbr,
                      std::uint64_t seed) {
  if (spec.n_slots <= 0 || spec.slot_features <= 0)
    throw ArgumentError("network: slot geometry must be positive");
  if (spec.extra_inputs < 0) throw ArgumentError("network: negative extra inputs");
  Network net;
  net.spec_ = spec;
  Rng rng(seed);
  int out_in = spec.input_dim();
  switch (spec.kind) {
    case ModelKind::Logistic:
      break;
    case ModelKind::Fcnn: {
      int in = spec.input_dim();
      for (int width : spec.hidden) {
        if (width <= 0) throw ArgumentError("network: hidden width must be positive");
        net.layers_.push_back(glorot_layer(width, in, rng));
        in = width;
      }
      out_in = in;
      break;
    }
    case ModelKind::PedigreeCnn: {
      if (!nbr || nbr->n_slots != spec.n_slots)
        throw ArgumentError("network: convolution model needs a matching neighborhood map");
      if (spec.channels.empty())
        throw ArgumentError("network: convolution model needs at least one layer");
      net.nbr_ = *nbr;
      int m_prev = spec.slot_features;
      for (int ch : spec.channels) {
        if (ch <= 0) throw ArgumentError("network: channel count must be positive");
        net.layers_.push_back(glorot_layer(ch, nbr->width * m_prev, rng));
        m_prev = ch;
      }
      out_in = m_prev + spec.extra_inputs;
      break;
    }
  }
  net.out_ = glorot_layer(1, out_in, rng);
  return net;
}

Vec Network::forward(const Mat& X, Cache& cache, Rng* dropout_rng) const {
  if (X.cols() != spec_.input_dim())
    throw ArgumentError("network: input has wrong column count");
  const Eigen::Index B = X.rows();
  cache.acts.clear();
  cache.gathers.clear();
  cache.dropout_mask.resize(0, 0);

  if (spec_.kind == ModelKind::PedigreeCnn) {
    const int S = spec_.n_slots;
    const int U = nbr_.width;
    Mat A = X.leftCols(static_cast<Eigen::Index>(S) * spec_.slot_features);
    int m_prev = spec_.slot_features;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const DenseLayer& layer = layers_[l];
      const int m_out = static_cast<int>(layer.W.rows());
      Mat G = Mat::Zero(static_cast<Eigen::Index>(S) * B,
                        static_cast<Eigen::Index>(U) * m_prev);
      for (int s = 0; s < S; ++s)
        for (int k = 0; k < U; ++k) {
          int j = nbr_.at(s, k);
          if (j >= 0)
            G.block(static_cast<Eigen::Index>(s) * B,
                    static_cast<Eigen::Index>(k) * m_prev, B, m_prev) =
                A.middleCols(static_cast<Eigen::Index>(j) * m_prev, m_prev);
        }
      Mat Z = (G * layer.W.transpose()).rowwise() + layer.b.transpose();
      Mat A_next(B, static_cast<Eigen::Index>(S) * m_out);
      for (int s = 0; s < S; ++s)
        A_next.middleCols(static_cast<Eigen::Index>(s) * m_out, m_out) =
            activation_apply(Z.middleRows(static_cast<Eigen::Index>(s) * B, B),
                             spec_.activation);
      cache.gathers.push_back(std::move(G));
      cache.acts.push_back(A_next);
      if (l == 0 && dropout_rng && spec_.dropout > 0.0) {
        cache.dropout_mask = dropout_mask(A_next.rows(), A_next.cols(),
                                          spec_.dropout, *dropout_rng);
        A_next = A_next.cwiseProduct(cache.dropout_mask);
      }
      A = std::move(A_next);
      m_prev = m_out;
    }
    cache.out_feat.resize(B, m_prev + spec_.extra_inputs);
    cache.out_feat.leftCols(m_prev) = A.leftCols(m_prev);  // counselee slot
    if (spec_.extra_inputs > 0)
      cache.out_feat.rightCols(spec_.extra_inputs) = X.rightCols(spec_.extra_inputs);
  } else {
    Mat A = X;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Mat Z = (A * layers_[l].W.transpose()).rowwise() + layers_[l].b.transpose();
      Mat A_next = activation_apply(Z, spec_.activation);
      cache.acts.push_back(A_next);
      if (l == 0 && dropout_rng && spec_.dropout > 0.0) {
        cache.dropout_mask = dropout_mask(A_next.rows(), A_next.cols(),
                                          spec_.dropout, *dropout_rng);
        A_next = A_next.cwiseProduct(cache.dropout_mask);
      }
      A = std::move(A_next);
    }
    cache.out_feat = A;
  }

  cache.z_out =
      ((cache.out_feat * out_.W.transpose()).col(0).array() + out_.b(0))
          .matrix();
  cache.yhat = sigmoid(cache.z_out);
  return cache.yhat;
}

Vec Network::predict(const Mat& X) const {
  Cache cache;
  return forward(X, cache, nullptr);
}

double Network::loss_value(const Vec& yhat, const Vec& y, const Vec& w,
                           LossKind loss) {
  double wsum = w.sum();
  if (wsum <= 0.0) throw NumericError("loss: nonpositive weight total");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < yhat.size(); ++i) {
    if (loss == LossKind::SquaredError) {
      double d = yhat(i) - y(i);
      acc += w(i) * d * d;
    } else {
      double p = std::min(std::max(yhat(i), 1e-12), 1.0 - 1e-12);
      acc += -w(i) * (y(i) * std::log(p) + (1.0 - y(i)) * std::log(1.0 - p));
    }
  }
  return acc / wsum;
}

void Network::backward(const Mat& X, const Cache& cache, const Vec& y,
                       const Vec& w, LossKind loss, Gradients& g) const {
  const Eigen::Index B = X.rows();
  double wsum = w.sum();
  if (wsum <= 0.0) throw NumericError("loss: nonpositive weight total");

  // dLoss/dz at the output unit. Cross-entropy cancels the sigmoid slope;
  // squared error keeps it.
  Vec dz(B);
  for (Eigen::Index i = 0; i < B; ++i) {
    double p = cache.yhat(i);
    double base = loss == LossKind::CrossEntropy
                      ? p - y(i)
                      : 2.0 * (p - y(i)) * p * (1.0 - p);
    dz(i) = base * w(i) / wsum;
  }

  g.out.W = (cache.out_feat.transpose() * dz).transpose();
  g.out.b.resize(1);
  g.out.b(0) = dz.sum();
  Mat dfeat = dz * out_.W;  // B x out_in

  if (spec_.kind == ModelKind::PedigreeCnn) {
    const int S = spec_.n_slots;
    const int U = nbr_.width;
    const int m_last = static_cast<int>(layers_.back().W.rows());
    Mat dA = Mat::Zero(B, static_cast<Eigen::Index>(S) * m_last);
    dA.leftCols(m_last) = dfeat.leftCols(m_last);
    for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
      const DenseLayer& layer = layers_[l];
      const int m_out = static_cast<int>(layer.W.rows());
      const int m_in = static_cast<int>(layer.W.cols()) / U;
      if (l == 0 && cache.dropout_mask.size() > 0)
        dA = dA.cwiseProduct(cache.dropout_mask);
      dA = dA.cwiseProduct(activation_slope(cache.acts[l], spec_.activation));
      Mat dZ(static_cast<Eigen::Index>(S) * B, m_out);
      for (int s = 0; s < S; ++s)
        dZ.middleRows(static_cast<Eigen::Index>(s) * B, B) =
            dA.middleCols(static_cast<Eigen::Index>(s) * m_out, m_out);
      g.layers[l].W = dZ.transpose() * cache.gathers[l];
      g.layers[l].b = dZ.colwise().sum().transpose();
      if (l > 0) {
        Mat dG = dZ * layer.W;
        Mat dA_prev = Mat::Zero(B, static_cast<Eigen::Index>(S) * m_in);
        for (int s = 0; s < S; ++s)
          for (int k = 0; k < U; ++k) {
            int j = nbr_.at(s, k);
            if (j >= 0)
              dA_prev.middleCols(static_cast<Eigen::Index>(j) * m_in, m_in) +=
                  dG.block(static_cast<Eigen::Index>(s) * B,
                           static_cast<Eigen::Index>(k) * m_in, B, m_in);
          }
        dA = std::move(dA_prev);
      }
    }
  } else {
    Mat dA = std::move(dfeat);
    for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
      if (l == 0 && cache.dropout_mask.size() > 0)
        dA = dA.cwiseProduct(cache.dropout_mask);
      Mat dZ = dA.cwiseProduct(activation_slope(cache.acts[l], spec_.activation));
      // Layer 1 consumed the post-dropout version of layer 0's output.
      if (l == 0)
        g.layers[l].W = dZ.transpose() * X;
      else if (l == 1 && cache.dropout_mask.size() > 0)
        g.layers[l].W =
            dZ.transpose() * cache.acts[0].cwiseProduct(cache.dropout_mask);
      else
        g.layers[l].W = dZ.transpose() * cache.acts[l - 1];
      g.layers[l].b = dZ.colwise().sum().transpose();
      dA = dZ * layers_[l].W;
    }
  }
}

Mat Network::prediction_input_gradient(const Mat& X) const {
  Cache cache;
  forward(X, cache, nullptr);
  const Eigen::Index B = X.rows();
  Vec dz = (cache.yhat.array() * (1.0 - cache.yhat.array())).matrix();
  Mat dfeat = dz * out_.W;
  Mat dX = Mat::Zero(B, X.cols());

  if (spec_.kind == ModelKind::PedigreeCnn) {
    const int S = spec_.n_slots;
    const int U = nbr_.width;
    const int m_last = static_cast<int>(layers_.back().W.rows());
    if (spec_.extra_inputs > 0)
      dX.rightCols(spec_.extra_inputs) = dfeat.rightCols(spec_.extra_inputs);
    Mat dA = Mat::Zero(B, static_cast<Eigen::Index>(S) * m_last);
    dA.leftCols(m_last) = dfeat.leftCols(m_last);
    for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
      const DenseLayer& layer = layers_[l];
      const int m_out = static_cast<int>(layer.W.rows());
      const int m_in = static_cast<int>(layer.W.cols()) / U;
      dA = dA.cwiseProduct(activation_slope(cache.acts[l], spec_.activation));
      Mat dZ(static_cast<Eigen::Index>(S) * B, m_out);
      for (int s = 0; s < S; ++s)
        dZ.middleRows(static_cast<Eigen::Index>(s) * B, B) =
            dA.middleCols(static_cast<Eigen::Index>(s) * m_out, m_out);
      Mat dG = dZ * layer.W;
      Mat dA_prev = Mat::Zero(B, static_cast<Eigen::Index>(S) * m_in);
      for (int s = 0; s < S; ++s)
        for (int k = 0; k < U; ++k) {
          int j = nbr_.at(s, k);
          if (j >= 0)
            dA_prev.middleCols(static_cast<Eigen::Index>(j) * m_in, m_in) +=
                dG.block(static_cast<Eigen::Index>(s) * B,
                         static_cast<Eigen::Index>(k) * m_in, B, m_in);
        }
      dA = std::move(dA_prev);
    }
    dX.leftCols(static_cast<Eigen::Index>(S) * spec_.slot_features) = dA;
  } else {
    Mat dA = std::move(dfeat);
    for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
      Mat dZ = dA.cwiseProduct(activation_slope(cache.acts[l], spec_.activation));
      dA = dZ * layers_[l].W;
    }
    dX = dA;
  }
  return dX;
}

Gradients Network::zero_gradients() const {
  Gradients g;
  g.layers.resize(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    g.layers[l].W = Mat::Zero(layers_[l].W.rows(), layers_[l].W.cols());
    g.layers[l].b = Vec::Zero(layers_[l].b.size());
  }
  g.out.W = Mat::Zero(out_.W.rows(), out_.W.cols());
  g.out.b = Vec::Zero(1);
  return g;
}

std::size_t Network::num_params() const {
  std::size_t n = 0;
  for (const DenseLayer& l : layers_) n += l.W.size() + l.b.size();
  return n + out_.W.size() + out_.b.size();
}

namespace {

void append_layer(const DenseLayer& l, std::vector<double>& out) {
  out.insert(out.end(), l.W.data(), l.W.data() + l.W.size());
  out.insert(out.end(), l.b.data(), l.b.data() + l.b.size());
}

const double* read_layer(DenseLayer& l, const double* p) {
  std::copy(p, p + l.W.size(), l.W.data());
  p += l.W.size();
  std::copy(p, p + l.b.size(), l.b.data());
  return p + l.b.size();
}

}  // namespace

void Network::get_params(std::vector<double>& out) const {
  out.clear();
  out.reserve(num_params());
  for (const DenseLayer& l : layers_) append_layer(l, out);
  append_layer(out_, out);
}

void Network::set_params(const std::vector<double>& in) {
  if (in.size() != num_params())
    throw ArgumentError("network: parameter vector has wrong length");
  const double* p = in.data();
  for (DenseLayer& l : layers_) p = read_layer(l, p);
  read_layer(out_, p);
}

void Network::flatten_gradients(const Gradients& g, std::vector<double>& out) {
  out.clear();
  for (const DenseLayer& l : g.layers) append_layer(l, out);
  append_layer(g.out, out);
}

std::vector<std::uint8_t> Network::weight_mask() const {
  std::vector<std::uint8_t> mask;
  mask.reserve(num_params());
  auto push = [&](const DenseLayer& l) {
    mask.insert(mask.end(), static_cast<std::size_t>(l.W.size()), 1);
    mask.insert(mask.end(), static_cast<std::size_t>(l.b.size()), 0);
  };
  for (const DenseLayer& l : layers_) push(l);
  push(out_);
  return mask;
}

}  // namespace pedrisk
