#include "gaitrel/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gaitrel/error.hpp"

namespace gaitrel {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void apply_activation(Activation a, VectorXd& z_to_act) {
  switch (a) {
    case Activation::ReLU: z_to_act = z_to_act.cwiseMax(0.0); break;
    case Activation::Softmax: z_to_act = softmax(z_to_act); break;
    case Activation::Identity: break;
  }
}

// Column-wise activation for a batch (features x samples).
void apply_activation(Activation a, MatrixXd& z_to_act) {
  switch (a) {
    case Activation::ReLU: z_to_act = z_to_act.cwiseMax(0.0); break;
    case Activation::Softmax:
      for (Eigen::Index c = 0; c < z_to_act.cols(); ++c) {
        VectorXd col = z_to_act.col(c);
        z_to_act.col(c) = softmax(col);
      }
      break;
    case Activation::Identity: break;
  }
}

// Multiplies a delta by the local derivative of a hidden activation.
template <typename Delta, typename Pre>
void gate_delta(Activation a, Delta& delta, const Pre& pre) {
  if (a == Activation::ReLU) delta = delta.cwiseProduct((pre.array() > 0.0).template cast<double>().matrix());
}

struct BatchTrace {
  std::vector<MatrixXd> pre;
  std::vector<MatrixXd> act;
};

BatchTrace forward_batch(const DenseNetwork& net, MatrixXd input) {
  BatchTrace t;
  t.pre.reserve(net.layers.size());
  t.act.reserve(net.layers.size() + 1);
  t.act.push_back(std::move(input));
  for (const auto& layer : net.layers) {
    MatrixXd z = layer.weights * t.act.back();
    z.colwise() += layer.biases;
    t.pre.push_back(z);
    apply_activation(layer.activation, z);
    t.act.push_back(std::move(z));
  }
  return t;
}

// Accumulates batch-averaged cross-entropy gradients into `grads` and returns the summed loss.
double batch_gradients(const DenseNetwork& net, const MatrixXd& inputs, const std::vector<int>& labels,
                       Gradients& grads) {
  const BatchTrace t = forward_batch(net, inputs);
  const auto batch = static_cast<double>(inputs.cols());

  MatrixXd delta = t.act.back();
  double loss = 0.0;
  for (Eigen::Index c = 0; c < delta.cols(); ++c) {
    const int y = labels[static_cast<std::size_t>(c)];
    loss -= std::log(std::clamp(delta(y, c), 1e-12, 1.0));
    delta(y, c) -= 1.0;
  }

  for (std::size_t l = net.layers.size(); l-- > 0;) {
    grads.weights[l].noalias() = delta * t.act[l].transpose() / batch;
    grads.biases[l] = delta.rowwise().sum() / batch;
    if (l == 0) break;
    MatrixXd prev = net.layers[l].weights.transpose() * delta;
    gate_delta(net.layers[l - 1].activation, prev, t.pre[l - 1]);
    delta = std::move(prev);
  }
  return loss;
}

}  // namespace

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::ReLU: return "relu";
    case Activation::Softmax: return "softmax";
    case Activation::Identity: return "identity";
  }
  return "relu";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "softmax") return Activation::Softmax;
  if (name == "identity") return Activation::Identity;
  fail(ErrorKind::Format, "unknown activation \"" + std::string(name) + "\"");
}

std::vector<std::size_t> DenseNetwork::dims() const {
  std::vector<std::size_t> d;
  if (layers.empty()) return d;
  d.push_back(input_dim());
  for (const auto& layer : layers) d.push_back(layer.out_dim());
  return d;
}

std::size_t DenseNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += static_cast<std::size_t>(layer.weights.size() + layer.biases.size());
  return n;
}

void DenseNetwork::validate() const {
  require(!layers.empty(), "network has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    require(layer.out_dim() >= 1 && layer.in_dim() >= 1, "layer with zero dimension");
    require(static_cast<std::size_t>(layer.biases.size()) == layer.out_dim(), "bias length mismatch");
    if (l > 0) require(layer.in_dim() == layers[l - 1].out_dim(), "adjacent layer dimensions disagree");
    if (l + 1 < layers.size()) {
      require(layer.activation != Activation::Softmax, "only the final layer may use softmax");
    }
  }
  if (norm_stats.size() > 0) {
    require(norm_stats.size() == input_dim() && norm_stats.std.size() == input_dim(),
            "normalization statistics do not match input dimension");
  }
}

void DenseNetwork::validate_default_architecture() const {
  validate();
  const auto d = dims();
  require(std::equal(d.begin(), d.end(), kDefaultLayerDims.begin(), kDefaultLayerDims.end()),
          "network does not have the 600-500-250-50-20-4-2 architecture");
  require(norm_stats.size() == kFeatureDim, "network is missing 600-wide normalization statistics");
}

DenseNetwork init_network(std::span<const std::size_t> dims, std::uint64_t seed) {
  require(dims.size() >= 2, "init_network: need at least input and output dimensions");
  DenseNetwork net;
  net.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(dims[l]);
    const auto out = static_cast<Eigen::Index>(dims[l + 1]);
    require(in >= 1 && out >= 1, "init_network: zero dimension");
    const double limit = std::sqrt(6.0 / static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-limit, limit);
    LayerParams layer;
    layer.weights.resize(out, in);
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = dist(rng);
    }
    layer.biases = VectorXd::Zero(out);
    layer.activation = l + 2 == dims.size() ? Activation::Softmax : Activation::ReLU;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

DenseNetwork init_network(std::uint64_t seed) { return init_network(kDefaultLayerDims, seed); }

VectorXd softmax(const VectorXd& logits) {
  VectorXd e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

ForwardTrace forward(const DenseNetwork& net, std::span<const double> input) {
  require(!net.layers.empty(), "forward: empty network");
  require(input.size() == net.input_dim(), "forward: input length does not match network");
  ForwardTrace t;
  t.pre.reserve(net.layers.size());
  t.act.reserve(net.layers.size() + 1);
  t.act.push_back(Eigen::Map<const VectorXd>(input.data(), static_cast<Eigen::Index>(input.size())));
  for (const auto& layer : net.layers) {
    require(layer.in_dim() == static_cast<std::size_t>(t.act.back().size()), "forward: layer dimension mismatch");
    VectorXd z = layer.weights * t.act.back() + layer.biases;
    t.pre.push_back(z);
    apply_activation(layer.activation, z);
    t.act.push_back(std::move(z));
  }
  return t;
}

double cross_entropy(std::span<const double> probs, Gender label) {
  require(probs.size() == 2, "cross_entropy: expected two probabilities");
  double sum = 0.0;
  for (double p : probs) {
    require(p >= 0.0 && p <= 1.0, "cross_entropy: probability outside [0, 1]");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-9, "cross_entropy: probabilities do not sum to 1");
  return -std::log(std::clamp(probs[static_cast<std::size_t>(label)], 1e-12, 1.0));
}

Gradients Gradients::zeros_like(const DenseNetwork& net) {
  Gradients g;
  for (const auto& layer : net.layers) {
    g.weights.push_back(MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()));
    g.biases.push_back(VectorXd::Zero(layer.biases.size()));
  }
  return g;
}

BackpropResult backprop(const DenseNetwork& net, const ForwardTrace& trace, const VectorXd& output_delta,
                        bool param_grads) {
  const std::size_t n_layers = net.layers.size();
  require(trace.pre.size() == n_layers && trace.act.size() == n_layers + 1,
          "backprop: trace does not match network depth");
  for (std::size_t l = 0; l < n_layers; ++l) {
    require(static_cast<std::size_t>(trace.pre[l].size()) == net.layers[l].out_dim() &&
                static_cast<std::size_t>(trace.act[l].size()) == net.layers[l].in_dim(),
            "backprop: trace does not match layer dimensions");
  }
  require(static_cast<std::size_t>(output_delta.size()) == net.output_dim(), "backprop: output delta size");

  BackpropResult out;
  if (param_grads) {
    out.grads.weights.resize(n_layers);
    out.grads.biases.resize(n_layers);
  }
  VectorXd delta = output_delta;
  for (std::size_t l = n_layers; l-- > 0;) {
    if (param_grads) {
      out.grads.weights[l] = delta * trace.act[l].transpose();
      out.grads.biases[l] = delta;
    }
    VectorXd prev = net.layers[l].weights.transpose() * delta;
    if (l > 0) gate_delta(net.layers[l - 1].activation, prev, trace.pre[l - 1]);
    delta = std::move(prev);
  }
  out.input_grad = std::move(delta);
  return out;
}

Gradients backward(const DenseNetwork& net, const ForwardTrace& trace, Gender label) {
  require(!net.layers.empty() && net.layers.back().activation == Activation::Softmax,
          "backward: cross-entropy gradients need a softmax output layer");
  require(net.output_dim() == 2, "backward: expected a two-class output");
  require(trace.act.size() == net.layers.size() + 1, "backward: trace does not match network depth");
  VectorXd delta = trace.output();
  delta(static_cast<int>(label)) -= 1.0;
  return backprop(net, trace, delta, true).grads;
}

AdamState AdamState::fresh(const DenseNetwork& net, const AdamHyper& hyper) {
  return AdamState{Gradients::zeros_like(net), Gradients::zeros_like(net), 0, hyper};
}

void adam_step(DenseNetwork& net, const Gradients& grads, AdamState& state) {
  const std::size_t n = net.layers.size();
  require(grads.weights.size() == n && grads.biases.size() == n && state.m.weights.size() == n &&
              state.v.weights.size() == n,
          "adam_step: gradient/state shapes do not match network");
  const auto& h = state.hyper;
  ++state.t;
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.t));

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    require(param.rows() == g.rows() && param.cols() == g.cols() && m.rows() == g.rows() &&
                m.cols() == g.cols(),
            "adam_step: parameter shape mismatch");
    m = h.beta1 * m + (1.0 - h.beta1) * g;
    v = h.beta2 * v + (1.0 - h.beta2) * g.cwiseProduct(g);
    param.array() -= h.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + h.epsilon);
  };
  for (std::size_t l = 0; l < n; ++l) {
    update(net.layers[l].weights, grads.weights[l], state.m.weights[l], state.v.weights[l]);
    update(net.layers[l].biases, grads.biases[l], state.m.biases[l], state.v.biases[l]);
  }
}

TrainResult train(DenseNetwork net, const DatasetSplit& split, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  require(!split.train.empty(), "train: empty training set");
  require(cfg.batch_size >= 1, "train: batch_size must be >= 1");
  require(cfg.max_epochs >= 1, "train: max_epochs must be >= 1");
  require(cfg.patience >= 1, "train: patience must be >= 1");
  net.validate();
  require(net.layers.back().activation == Activation::Softmax && net.output_dim() == 2,
          "train: network must end in a two-way softmax");

  const std::size_t dim = net.input_dim();
  const std::size_t n = split.train.size();
  for (const auto& w : split.train) require(w.features.size() == dim, "train: feature length mismatch");

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  AdamState adam = AdamState::fresh(net, AdamHyper{.lr = cfg.lr});
  Gradients grads = Gradients::zeros_like(net);

  TrainResult result{net, {}};
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;
  const bool has_validation = !split.validation.empty();

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, n - start);
      MatrixXd inputs(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count));
      std::vector<int> labels(count);
      for (std::size_t b = 0; b < count; ++b) {
        const auto& w = split.train[order[start + b]];
        inputs.col(static_cast<Eigen::Index>(b)) =
            Eigen::Map<const VectorXd>(w.features.data(), static_cast<Eigen::Index>(dim));
        labels[b] = static_cast<int>(w.label);
      }
      loss_sum += batch_gradients(net, inputs, labels, grads);
      adam_step(net, grads, adam);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(n);
    if (has_validation) {
      record.val_loss = mean_loss(net, split.validation);
      record.val_macro_f1 = evaluate(net, split.validation, true).macro_f1;
    } else {
      record.val_loss = mean_loss(net, split.train);
      record.val_macro_f1 = evaluate(net, split.train, true).macro_f1;
    }
    result.history.epochs.push_back(record);
    if (on_epoch) on_epoch(record);

    if (record.val_loss < best_loss) {
      best_loss = record.val_loss;
      result.net = net;
      result.history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      result.history.early_stopped = true;
      break;
    }
  }
  return result;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Prediction predict(const DenseNetwork& net, const FeatureWindow& window, bool pre_normalized) {
  const FeatureWindow* input = &window;
  FeatureWindow normalized;
  if (!pre_normalized && net.norm_stats.size() > 0) {
    normalized = apply_normalizer(net.norm_stats, window);
    input = &normalized;
  }
  const ForwardTrace t = forward(net, input->features);
  const VectorXd& out = t.output();
  require(out.size() == 2, "predict: expected a two-class output");
  Prediction p;
  p.probs = {out(0), out(1)};
  p.label = argmax(p.probs) == 0 ? Gender::Female : Gender::Male;
  return p;
}

double mean_loss(const DenseNetwork& net, std::span<const FeatureWindow> normalized) {
  require(!normalized.empty(), "mean_loss: no windows");
  double sum = 0.0;
  for (const auto& w : normalized) {
    const ForwardTrace t = forward(net, w.features);
    sum += -std::log(std::clamp(t.output()(static_cast<int>(w.label)), 1e-12, 1.0));
  }
  return sum / static_cast<double>(normalized.size());
}

EvalReport evaluate(const DenseNetwork& net, std::span<const FeatureWindow> windows, bool pre_normalized) {
  std::vector<std::pair<Gender, Gender>> pairs;
  pairs.reserve(windows.size());
  for (const auto& w : windows) pairs.emplace_back(w.label, predict(net, w, pre_normalized).label);
  return make_report(confusion_matrix(pairs));
}

}  // namespace gaitrel
