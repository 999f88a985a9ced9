#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "encode/reference.hpp"

namespace pedrisk {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class ModelKind { Logistic = 0, Fcnn = 1, PedigreeCnn = 2 };
enum class LossKind { CrossEntropy = 0, SquaredError = 1 };
enum class Activation { Relu = 0, Elu = 1, Logistic = 2 };

const char* model_kind_name(ModelKind k);
const char* loss_kind_name(LossKind k);
const char* activation_name(Activation a);

// Shape of one model. Fcnn reads `hidden`; PedigreeCnn reads `channels` (one
// entry per convolution layer) plus the slot geometry. `extra_inputs` counts
// covariate columns appended after the slot block; the convolutional stack
// never sees them, they join the counselee features at the output unit.
struct ArchitectureSpec {
  ModelKind kind = ModelKind::Fcnn;
  std::vector<int> hidden;
  std::vector<int> channels;
  Activation activation = Activation::Elu;
  double dropout = 0.2;  // after the first hidden / convolution layer
  int n_slots = 0;
  int slot_features = 0;
  int extra_inputs = 0;

  int input_dim() const { return n_slots * slot_features + extra_inputs; }
};

struct DenseLayer {
  Mat W;  // out x in
  Vec b;  // out
};

struct Gradients {
  std::vector<DenseLayer> layers;
  DenseLayer out;
};

// Fully-connected and pedigree-convolution models behind one interface.
// Hidden and convolution layers share one configurable activation; the
// output unit is a single sigmoid. Convolution layers share one weight
// matrix across slots: slot s reads the concatenated features of its
// neighborhood (self, mother, father, then capped sibling/children lists),
// with -1 entries contributing zeros.
class Network {
 public:
  static Network init(const ArchitectureSpec& spec, const NeighborhoodMap* nbr,
                      std::uint64_t seed);

  // Deterministic forward pass (no dropout); X is samples x input_dim.
  Vec predict(const Mat& X) const;

  struct Cache {
    // Post-activation, before dropout; the mask is applied separately so the
    // activation slope can be recovered from these values.
    std::vector<Mat> acts;
    std::vector<Mat> gathers;   // cnn only: gathered input per conv layer
    Mat out_feat;               // features entering the output unit
    Vec z_out, yhat;
    Mat dropout_mask;           // empty when dropout is off
  };

  // Training forward pass; pass `dropout_rng` to sample a mask.
  Vec forward(const Mat& X, Cache& cache, class Rng* dropout_rng) const;

  // Fills `g` with dLoss/dParams for the cached pass. `w` holds sample
  // weights (pass ones for plain means); the loss is the weighted mean.
  void backward(const Mat& X, const Cache& cache, const Vec& y, const Vec& w,
                LossKind loss, Gradients& g) const;

  static double loss_value(const Vec& yhat, const Vec& y, const Vec& w,
                           LossKind loss);

  // d yhat / d input, one row per sample. Exposes what the model can see.
  Mat prediction_input_gradient(const Mat& X) const;

  Gradients zero_gradients() const;
  std::size_t num_params() const;
  void get_params(std::vector<double>& out) const;
  void set_params(const std::vector<double>& in);
  static void flatten_gradients(const Gradients& g, std::vector<double>& out);
  // 1 where the parameter is a weight (L2-decayed), 0 for biases.
  std::vector<std::uint8_t> weight_mask() const;

  const ArchitectureSpec& spec() const { return spec_; }
  const NeighborhoodMap& neighborhoods() const { return nbr_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  const DenseLayer& output_layer() const { return out_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }
  DenseLayer& mutable_output_layer() { return out_; }
  void set_neighborhoods(NeighborhoodMap nbr) { nbr_ = std::move(nbr); }

 private:
  ArchitectureSpec spec_;
  NeighborhoodMap nbr_;  // empty for logistic / fcnn
  std::vector<DenseLayer> layers_;
  DenseLayer out_;
};

}  // namespace pedrisk
