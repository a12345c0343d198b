#pragma once

// Input attributions for DenseNetwork decisions and their per-axis aggregation.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitrel/nn.hpp"
#include "gaitrel/signal.hpp"

namespace gaitrel {

enum class RelevanceMethod { Gradient, LrpEpsilon, LrpAlphaBeta };
enum class Group { Overall, Male, Female };

inline constexpr std::array<RelevanceMethod, 3> kAllMethods = {
    RelevanceMethod::Gradient, RelevanceMethod::LrpEpsilon, RelevanceMethod::LrpAlphaBeta};
inline constexpr std::array<Group, 3> kAllGroups = {Group::Overall, Group::Male, Group::Female};

// Command-line tokens: gradient, lrp-eps, lrp-a2b1 / overall, male, female.
std::string_view method_token(RelevanceMethod m);
std::optional<RelevanceMethod> parse_method_token(std::string_view token);
std::string_view group_token(Group g);
std::optional<Group> parse_group_token(std::string_view token);

// Row labels used in the axis table: "Gradient", "LRP", "LRP Alpha 2 Beta 1" / "Overall", ...
std::string_view method_label(RelevanceMethod m);
std::string_view group_label(Group g);

struct RelevanceMap {
  std::vector<double> values;  // one signed score per input feature
  RelevanceMethod method = RelevanceMethod::Gradient;
  int target = 0;
  std::string subject_id;
  int window_index = 0;
};

/// Raw gradient of the target logit (pre-softmax) with respect to the input.
RelevanceMap explain_gradient(const DenseNetwork& net, std::span<const double> input, int target);

/// epsilon-stabilized z-rule starting from R = onehot(target) * logit.
/// Bias terms absorb their share of relevance.
RelevanceMap explain_lrp_epsilon(const DenseNetwork& net, std::span<const double> input, int target,
                                 double eps = 1e-9);

/// alpha-beta rule with separate positive and negative contribution pools.
/// Requires alpha - beta == 1. An empty pool passes on no relevance.
RelevanceMap explain_lrp_alphabeta(const DenseNetwork& net, std::span<const double> input, int target,
                                   double alpha = 2.0, double beta = 1.0);

RelevanceMap explain(const DenseNetwork& net, std::span<const double> input, RelevanceMethod method,
                     int target);

/// Mean signed relevance per axis over all maps and the axis's 100 frames.
std::array<double, kNumChannels> aggregate_axis_relevance(std::span<const RelevanceMap> maps);
/// Same reduction over |relevance|.
std::array<double, kNumChannels> aggregate_axis_relevance_abs(std::span<const RelevanceMap> maps);

struct AxisRelevanceRow {
  Group group = Group::Overall;
  RelevanceMethod method = RelevanceMethod::Gradient;
  std::size_t window_count = 0;
  std::array<double, kNumChannels> scores{};
  std::array<double, kNumChannels> abs_scores{};
};

struct AxisRelevanceTable {
  std::vector<AxisRelevanceRow> rows;  // group-major, in request order

  const AxisRelevanceRow* find(Group g, RelevanceMethod m) const;
};

struct SubgroupResult {
  AxisRelevanceTable table;
  std::vector<std::string> warnings;  // one per omitted empty group
  std::vector<RelevanceMap> maps;     // window-major, then method order; filled when requested
};

struct SubgroupOptions {
  bool keep_maps = false;
  std::size_t threads = 0;  // 0 or 1: sequential
};

/// Explains every (normalized) window with its predicted class as target and
/// aggregates per group and method.
SubgroupResult subgroup_relevance(const DenseNetwork& net, std::span<const FeatureWindow> normalized,
                                  std::span<const RelevanceMethod> methods, std::span<const Group> groups,
                                  const SubgroupOptions& options = {});

}  // namespace gaitrel
