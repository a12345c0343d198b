#include "gaitrel/metrics.hpp"

#include "gaitrel/error.hpp"

namespace gaitrel {
namespace {

double ratio_or_zero(std::int64_t num, std::int64_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

double harmonic_mean(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

std::int64_t ConfusionMatrix2::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

ConfusionMatrix2 confusion_matrix(std::span<const std::pair<Gender, Gender>> truth_predicted) {
  require(!truth_predicted.empty(), "confusion_matrix: empty input");
  ConfusionMatrix2 m;
  for (const auto& [truth, predicted] : truth_predicted) {
    ++m.counts[static_cast<int>(truth)][static_cast<int>(predicted)];
  }
  return m;
}

ConfusionMatrix2 matrix_from_counts(const std::array<std::int64_t, 4>& counts) {
  ConfusionMatrix2 m;
  for (std::size_t i = 0; i < 4; ++i) {
    require(counts[i] >= 0, "confusion matrix counts must be non-negative");
    m.counts[i / 2][i % 2] = counts[i];
  }
  return m;
}

PrecisionRecall precision_recall(const ConfusionMatrix2& m, Gender cls) {
  const int c = static_cast<int>(cls);
  const std::int64_t hit = m.counts[c][c];
  const std::int64_t col = m.counts[0][c] + m.counts[1][c];
  const std::int64_t row = m.counts[c][0] + m.counts[c][1];
  PrecisionRecall out;
  out.precision = ratio_or_zero(hit, col, out.degenerate);
  out.recall = ratio_or_zero(hit, row, out.degenerate);
  return out;
}

double macro_f1(const ConfusionMatrix2& m) {
  double sum = 0.0;
  for (Gender g : {Gender::Female, Gender::Male}) {
    const auto pr = precision_recall(m, g);
    sum += harmonic_mean(pr.precision, pr.recall);
  }
  return sum / 2.0;
}

EvalReport make_report(const ConfusionMatrix2& m) {
  EvalReport report;
  report.matrix = m;
  for (Gender g : {Gender::Female, Gender::Male}) {
    const auto pr = precision_recall(m, g);
    auto& s = report.per_class[static_cast<int>(g)];
    s.precision = pr.precision;
    s.recall = pr.recall;
    s.f1 = harmonic_mean(pr.precision, pr.recall);
    s.degenerate = pr.degenerate;
    report.degenerate = report.degenerate || pr.degenerate;
  }
  report.macro_f1 = macro_f1(m);
  return report;
}

}  // namespace gaitrel
