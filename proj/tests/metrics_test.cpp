#include "gaitrel/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

#include "gaitrel/error.hpp"

namespace gaitrel {
namespace {

constexpr Gender F = Gender::Female;
constexpr Gender M = Gender::Male;

TEST(ConfusionMatrix, Examples) {
  const std::vector<std::pair<Gender, Gender>> all_correct{{F, F}, {F, F}, {F, F}, {M, M}, {M, M}};
  const auto m = confusion_matrix(all_correct);
  EXPECT_EQ(m.counts[0][0], 3);
  EXPECT_EQ(m.counts[1][1], 2);
  EXPECT_EQ(m.counts[0][1] + m.counts[1][0], 0);

  const std::vector<std::pair<Gender, Gender>> one{{F, M}};
  const auto single = confusion_matrix(one);
  EXPECT_EQ(single.counts[0][1], 1);
  EXPECT_EQ(single.total(), 1);

  EXPECT_THROW(confusion_matrix(std::vector<std::pair<Gender, Gender>>{}), Error);
}

TEST(ConfusionMatrix, TotalMatchesBruteForceCount) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<Gender, Gender>> pairs;
    const int n = 1 + static_cast<int>(rng() % 200);
    std::array<std::array<std::int64_t, 2>, 2> expected{};
    for (int i = 0; i < n; ++i) {
      const auto t = static_cast<Gender>(rng() % 2), p = static_cast<Gender>(rng() % 2);
      pairs.emplace_back(t, p);
      ++expected[static_cast<int>(t)][static_cast<int>(p)];
    }
    const auto m = confusion_matrix(pairs);
    EXPECT_EQ(m.total(), n);
    EXPECT_EQ(m.counts, expected);
  }
}

TEST(PrecisionRecall, ValidationTableCounts) {
  const auto m = matrix_from_counts({191, 43, 56, 193});
  const auto pr = precision_recall(m, F);
  EXPECT_DOUBLE_EQ(pr.precision, 191.0 / 247.0);
  EXPECT_DOUBLE_EQ(pr.recall, 191.0 / 234.0);
  EXPECT_NEAR(pr.precision, 0.7733, 5e-5);
  EXPECT_NEAR(pr.recall, 0.8162, 5e-5);
  EXPECT_FALSE(pr.degenerate);
}

TEST(PrecisionRecall, PerfectAndDegenerate) {
  const auto perfect = precision_recall(matrix_from_counts({4, 0, 0, 6}), M);
  EXPECT_EQ(perfect.precision, 1.0);
  EXPECT_EQ(perfect.recall, 1.0);

  const auto never_predicted = precision_recall(matrix_from_counts({5, 0, 3, 0}), M);
  EXPECT_EQ(never_predicted.precision, 0.0);
  EXPECT_TRUE(never_predicted.degenerate);
}

TEST(MacroF1, PublishedConfusionMatrices) {
  EXPECT_NEAR(macro_f1(matrix_from_counts({191, 43, 56, 193})), 0.795, 0.0005);
  EXPECT_NEAR(macro_f1(matrix_from_counts({319, 102, 100, 330})), 0.7626, 0.0010);
}

TEST(MacroF1, PerfectDiagonal) {
  EXPECT_EQ(macro_f1(matrix_from_counts({1, 0, 0, 1})), 1.0);
  EXPECT_EQ(macro_f1(matrix_from_counts({997, 0, 0, 3})), 1.0);
}

TEST(MacroF1, Properties) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<std::int64_t, 4> c{};
    for (auto& v : c) v = rng() % 50;
    const auto m = matrix_from_counts(c);
    const double f = macro_f1(m);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);

    // relabeling the classes swaps both rows and columns
    EXPECT_DOUBLE_EQ(macro_f1(matrix_from_counts({c[3], c[2], c[1], c[0]})), f);

    const std::int64_t k = 1 + rng() % 7;
    const auto scaled = matrix_from_counts({k * c[0], k * c[1], k * c[2], k * c[3]});
    EXPECT_NEAR(macro_f1(scaled), f, 1e-12);
    for (Gender g : {F, M}) {
      EXPECT_NEAR(precision_recall(scaled, g).precision, precision_recall(m, g).precision, 1e-12);
      EXPECT_NEAR(precision_recall(scaled, g).recall, precision_recall(m, g).recall, 1e-12);
    }

    const bool both_present = c[0] + c[1] > 0 && c[2] + c[3] > 0;
    if (both_present) EXPECT_EQ(f == 1.0, c[1] == 0 && c[2] == 0) << c[0] << " " << c[1] << " " << c[2] << " " << c[3];
  }
}

TEST(Report, CollectsPerClassScores) {
  const auto r = make_report(matrix_from_counts({191, 43, 56, 193}));
  EXPECT_NEAR(r.per_class[0].f1, 2 * (191.0 / 247) * (191.0 / 234) / (191.0 / 247 + 191.0 / 234), 1e-12);
  EXPECT_DOUBLE_EQ(r.macro_f1, (r.per_class[0].f1 + r.per_class[1].f1) / 2);
  EXPECT_FALSE(r.degenerate);
  EXPECT_TRUE(make_report(matrix_from_counts({2, 0, 2, 0})).degenerate);
  EXPECT_THROW(matrix_from_counts({1, -1, 0, 0}), Error);
}

}  // namespace
}  // namespace gaitrel
