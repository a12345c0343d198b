#include "gaitrel/relevance.hpp"

#include <cmath>

#include "gaitrel/error.hpp"
#include "gaitrel/parallel.hpp"

namespace gaitrel {
namespace {

using Eigen::ArrayXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_target(const DenseNetwork& net, int target) {
  require(target >= 0 && static_cast<std::size_t>(target) < net.output_dim(),
          "relevance target must be a valid class index");
}

RelevanceMap to_map(const VectorXd& v, RelevanceMethod method, int target) {
  RelevanceMap map;
  map.values.assign(v.data(), v.data() + v.size());
  map.method = method;
  map.target = target;
  return map;
}

VectorXd initial_relevance(const ForwardTrace& trace, int target) {
  VectorXd r = VectorXd::Zero(trace.logits().size());
  r(target) = trace.logits()(target);
  return r;
}

// One epsilon-rule step through a layer with input activations `a`.
VectorXd lrp_epsilon_layer(const LayerParams& layer, const VectorXd& a, const VectorXd& r_out, double eps) {
  const VectorXd z = layer.weights * a + layer.biases;
  const ArrayXd sign = (z.array() >= 0.0).select(ArrayXd::Ones(z.size()), -ArrayXd::Ones(z.size()));
  const VectorXd s = (r_out.array() / (z.array() + eps * sign)).matrix();
  return a.cwiseProduct(layer.weights.transpose() * s);
}

VectorXd lrp_alphabeta_layer(const LayerParams& layer, const VectorXd& a, const VectorXd& r_out, double alpha,
                             double beta) {
  // contrib(k, j) = a_j * w_kj
  const MatrixXd contrib = layer.weights.array().rowwise() * a.transpose().array();
  const MatrixXd pos = contrib.cwiseMax(0.0);
  const MatrixXd neg = contrib.cwiseMin(0.0);
  const VectorXd pos_pool = pos.rowwise().sum() + layer.biases.cwiseMax(0.0);
  const VectorXd neg_pool = neg.rowwise().sum() + layer.biases.cwiseMin(0.0);

  VectorXd pos_share(r_out.size());
  VectorXd neg_share(r_out.size());
  for (Eigen::Index k = 0; k < r_out.size(); ++k) {
    pos_share(k) = pos_pool(k) != 0.0 ? alpha * r_out(k) / pos_pool(k) : 0.0;
    // Both neg and neg_pool are <= 0, so the ratio is non-negative.
    neg_share(k) = neg_pool(k) != 0.0 ? beta * r_out(k) / neg_pool(k) : 0.0;
  }
  return pos.transpose() * pos_share - neg.transpose() * neg_share;
}

void check_input(const DenseNetwork& net, std::span<const double> input) {
  require(!net.layers.empty(), "relevance: empty network");
  require(input.size() == net.input_dim(), "relevance: input length does not match network");
}

}  // namespace

std::string_view method_token(RelevanceMethod m) {
  switch (m) {
    case RelevanceMethod::Gradient: return "gradient";
    case RelevanceMethod::LrpEpsilon: return "lrp-eps";
    case RelevanceMethod::LrpAlphaBeta: return "lrp-a2b1";
  }
  return "gradient";
}

std::optional<RelevanceMethod> parse_method_token(std::string_view token) {
  for (auto m : kAllMethods) {
    if (method_token(m) == token) return m;
  }
  return std::nullopt;
}

std::string_view group_token(Group g) {
  switch (g) {
    case Group::Overall: return "overall";
    case Group::Male: return "male";
    case Group::Female: return "female";
  }
  return "overall";
}

std::optional<Group> parse_group_token(std::string_view token) {
  for (auto g : kAllGroups) {
    if (group_token(g) == token) return g;
  }
  return std::nullopt;
}

std::string_view method_label(RelevanceMethod m) {
  switch (m) {
    case RelevanceMethod::Gradient: return "Gradient";
    case RelevanceMethod::LrpEpsilon: return "LRP";
    case RelevanceMethod::LrpAlphaBeta: return "LRP Alpha 2 Beta 1";
  }
  return "Gradient";
}

std::string_view group_label(Group g) {
  switch (g) {
    case Group::Overall: return "Overall";
    case Group::Male: return "Male";
    case Group::Female: return "Female";
  }
  return "Overall";
}

RelevanceMap explain_gradient(const DenseNetwork& net, std::span<const double> input, int target) {
  check_input(net, input);
  check_target(net, target);
  const ForwardTrace trace = forward(net, input);
  VectorXd seed = VectorXd::Zero(static_cast<Eigen::Index>(net.output_dim()));
  seed(target) = 1.0;
  return to_map(backprop(net, trace, seed, false).input_grad, RelevanceMethod::Gradient, target);
}

RelevanceMap explain_lrp_epsilon(const DenseNetwork& net, std::span<const double> input, int target,
                                 double eps) {
  check_input(net, input);
  check_target(net, target);
  const ForwardTrace trace = forward(net, input);
  VectorXd r = initial_relevance(trace, target);
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    r = lrp_epsilon_layer(net.layers[l], trace.act[l], r, eps);
  }
  return to_map(r, RelevanceMethod::LrpEpsilon, target);
}

RelevanceMap explain_lrp_alphabeta(const DenseNetwork& net, std::span<const double> input, int target,
                                   double alpha, double beta) {
  require(std::abs(alpha - beta - 1.0) <= 1e-12, "lrp alpha-beta: alpha - beta must equal 1");
  check_input(net, input);
  check_target(net, target);
  const ForwardTrace trace = forward(net, input);
  VectorXd r = initial_relevance(trace, target);
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    r = lrp_alphabeta_layer(net.layers[l], trace.act[l], r, alpha, beta);
  }
  return to_map(r, RelevanceMethod::LrpAlphaBeta, target);
}

RelevanceMap explain(const DenseNetwork& net, std::span<const double> input, RelevanceMethod method,
                     int target) {
  switch (method) {
    case RelevanceMethod::Gradient: return explain_gradient(net, input, target);
    case RelevanceMethod::LrpEpsilon: return explain_lrp_epsilon(net, input, target);
    case RelevanceMethod::LrpAlphaBeta: return explain_lrp_alphabeta(net, input, target);
  }
  fail(ErrorKind::InvalidInput, "unknown relevance method");
}

namespace {

template <typename Transform>
std::array<double, kNumChannels> aggregate(std::span<const RelevanceMap> maps, Transform f) {
  require(!maps.empty(), "aggregate_axis_relevance: no maps");
  const RelevanceMethod method = maps.front().method;
  std::array<double, kNumChannels> total{};
  for (const auto& map : maps) {
    require(map.method == method, "aggregate_axis_relevance: maps mix methods");
    require(map.values.size() == kFeatureDim, "aggregate_axis_relevance: map length must be 600");
    for (std::size_t axis = 0; axis < kNumChannels; ++axis) {
      double s = 0.0;
      for (std::size_t i = 0; i < kWindowLen; ++i) s += f(map.values[axis * kWindowLen + i]);
      total[axis] += s / static_cast<double>(kWindowLen);
    }
  }
  for (double& t : total) t /= static_cast<double>(maps.size());
  return total;
}

}  // namespace

std::array<double, kNumChannels> aggregate_axis_relevance(std::span<const RelevanceMap> maps) {
  return aggregate(maps, [](double v) { return v; });
}

std::array<double, kNumChannels> aggregate_axis_relevance_abs(std::span<const RelevanceMap> maps) {
  return aggregate(maps, [](double v) { return std::abs(v); });
}

const AxisRelevanceRow* AxisRelevanceTable::find(Group g, RelevanceMethod m) const {
  for (const auto& row : rows) {
    if (row.group == g && row.method == m) return &row;
  }
  return nullptr;
}

SubgroupResult subgroup_relevance(const DenseNetwork& net, std::span<const FeatureWindow> normalized,
                                  std::span<const RelevanceMethod> methods, std::span<const Group> groups,
                                  const SubgroupOptions& options) {
  require(!normalized.empty(), "subgroup_relevance: no windows");
  require(!methods.empty() && !groups.empty(), "subgroup_relevance: no methods or groups requested");

  const std::size_t n = normalized.size();
  const std::size_t n_methods = methods.size();
  // maps[i * n_methods + m]
  std::vector<RelevanceMap> maps(n * n_methods);
  parallel_for(n, options.threads, [&](std::size_t i) {
    const auto& w = normalized[i];
    const int target = static_cast<int>(predict(net, w, true).label);
    for (std::size_t m = 0; m < n_methods; ++m) {
      RelevanceMap map = explain(net, w.features, methods[m], target);
      map.subject_id = w.subject_id;
      map.window_index = w.window_index;
      maps[i * n_methods + m] = std::move(map);
    }
  });

  SubgroupResult result;
  for (Group g : groups) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      const auto label = normalized[i].label;
      if (g == Group::Overall || (g == Group::Male && label == Gender::Male) ||
          (g == Group::Female && label == Gender::Female)) {
        members.push_back(i);
      }
    }
    if (members.empty()) {
      result.warnings.push_back("group " + std::string(group_token(g)) + " has no windows; row omitted");
      continue;
    }
    for (std::size_t m = 0; m < n_methods; ++m) {
      std::vector<RelevanceMap> subset;
      subset.reserve(members.size());
      for (std::size_t i : members) subset.push_back(maps[i * n_methods + m]);
      AxisRelevanceRow row;
      row.group = g;
      row.method = methods[m];
      row.window_count = members.size();
      row.scores = aggregate_axis_relevance(subset);
      row.abs_scores = aggregate_axis_relevance_abs(subset);
      result.table.rows.push_back(row);
    }
  }
  if (options.keep_maps) result.maps = std::move(maps);
  return result;
}

}  // namespace gaitrel
