#pragma once

// Dense ReLU/softmax classifier with explicit backpropagation and Adam.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaitrel/metrics.hpp"
#include "gaitrel/signal.hpp"

namespace gaitrel {

enum class Activation { ReLU, Softmax, Identity };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

/// 600 inputs, five ReLU hidden layers, two-way softmax head.
inline constexpr std::array<std::size_t, 7> kDefaultLayerDims = {600, 500, 250, 50, 20, 4, 2};

struct LayerParams {
  Eigen::MatrixXd weights;  // out_dim x in_dim
  Eigen::VectorXd biases;   // out_dim
  Activation activation = Activation::ReLU;

  std::size_t in_dim() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weights.rows()); }
};

struct DenseNetwork {
  std::vector<LayerParams> layers;
  NormStats norm_stats;  // empty when the network was built outside the training pipeline
  std::array<std::string, kNumChannels> channel_order{"GX", "GY", "GZ", "AX", "AY", "AZ"};
  std::uint64_t seed = 0;

  std::size_t input_dim() const { return layers.front().in_dim(); }
  std::size_t output_dim() const { return layers.back().out_dim(); }
  std::vector<std::size_t> dims() const;
  std::size_t parameter_count() const;

  // Adjacent dimensions agree and only the last layer may be Softmax.
  void validate() const;
  // validate() plus the exact default layer dimensions and a 600-wide NormStats.
  void validate_default_architecture() const;
};

/// He-uniform weights in +-sqrt(6 / in_dim), zero biases. Hidden layers are
/// ReLU, the last layer Softmax.
DenseNetwork init_network(std::span<const std::size_t> dims, std::uint64_t seed);
DenseNetwork init_network(std::uint64_t seed);

struct ForwardTrace {
  std::vector<Eigen::VectorXd> pre;  // z for each layer
  std::vector<Eigen::VectorXd> act;  // act[0] is the input, act[l + 1] = activation(pre[l])

  const Eigen::VectorXd& logits() const { return pre.back(); }
  const Eigen::VectorXd& output() const { return act.back(); }
};

/// Max-subtracted softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

ForwardTrace forward(const DenseNetwork& net, std::span<const double> input);

/// -ln(clamp(probs[label], 1e-12, 1)).
double cross_entropy(std::span<const double> probs, Gender label);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static Gradients zeros_like(const DenseNetwork& net);
};

/// Parameter gradients of the loss given the delta at the last layer's
/// pre-activation, and the gradient with respect to the input.
struct BackpropResult {
  Gradients grads;
  Eigen::VectorXd input_grad;
};
BackpropResult backprop(const DenseNetwork& net, const ForwardTrace& trace,
                        const Eigen::VectorXd& output_delta, bool param_grads = true);

/// Cross-entropy gradients. The output delta is probs - onehot(label).
Gradients backward(const DenseNetwork& net, const ForwardTrace& trace, Gender label);

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Gradients m;
  Gradients v;
  long long t = 0;
  AdamHyper hyper;

  static AdamState fresh(const DenseNetwork& net, const AdamHyper& hyper = {});
};

/// One bias-corrected Adam update. Increments state.t before use.
void adam_step(DenseNetwork& net, const Gradients& grads, AdamState& state);

struct TrainConfig {
  std::size_t batch_size = 16;
  int max_epochs = 200;
  int patience = 10;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_macro_f1 = 0.0;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  bool early_stopped = false;
};

struct TrainResult {
  DenseNetwork net;
  TrainingHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Minibatch Adam on split.train (already normalized). Validation loss drives
/// early stopping; the parameters of the best validation epoch are returned.
/// When the validation part is empty the training loss is monitored instead.
TrainResult train(DenseNetwork net, const DatasetSplit& split, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

struct Prediction {
  Gender label = Gender::Female;
  std::array<double, 2> probs{0.0, 0.0};
};

/// Index of the largest entry; exact ties go to the lower index.
std::size_t argmax(std::span<const double> values);

Prediction predict(const DenseNetwork& net, const FeatureWindow& window, bool pre_normalized);

double mean_loss(const DenseNetwork& net, std::span<const FeatureWindow> normalized);
EvalReport evaluate(const DenseNetwork& net, std::span<const FeatureWindow> windows,
                    bool pre_normalized);

}  // namespace gaitrel
