#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

#include "gaitrel/signal.hpp"

namespace gaitrel {

/// Rows are the true class, columns the predicted class, both in (Female, Male) order.
struct ConfusionMatrix2 {
  std::array<std::array<std::int64_t, 2>, 2> counts{};

  std::int64_t at(Gender truth, Gender predicted) const {
    return counts[static_cast<int>(truth)][static_cast<int>(predicted)];
  }
  std::int64_t total() const;
};

ConfusionMatrix2 confusion_matrix(std::span<const std::pair<Gender, Gender>> truth_predicted);

/// Builds a matrix from row-major counts {FF, FM, MF, MM}. Negative counts are rejected.
ConfusionMatrix2 matrix_from_counts(const std::array<std::int64_t, 4>& counts);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  bool degenerate = false;  // a zero denominator was replaced by 0.0
};

PrecisionRecall precision_recall(const ConfusionMatrix2& m, Gender cls);

double macro_f1(const ConfusionMatrix2& m);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;
};

struct EvalReport {
  ConfusionMatrix2 matrix;
  std::array<ClassScores, 2> per_class{};
  double macro_f1 = 0.0;
  bool degenerate = false;
};

EvalReport make_report(const ConfusionMatrix2& m);

}  // namespace gaitrel
