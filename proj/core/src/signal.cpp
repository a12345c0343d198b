#include "gaitrel/signal.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gaitrel/error.hpp"

namespace gaitrel {

std::string_view gender_code(Gender g) { return g == Gender::Female ? "F" : "M"; }

std::string_view gender_name(Gender g) { return g == Gender::Female ? "Female" : "Male"; }

Gender parse_gender_code(std::string_view code) {
  if (code == "F") return Gender::Female;
  if (code == "M") return Gender::Male;
  fail(ErrorKind::InvalidInput, "gender must be \"F\" or \"M\", got \"" + std::string(code) + "\"");
}

void TimeSeriesRecording::validate() const {
  require(sample_rate_hz == kSampleRateHz,
          "recording " + subject_id + ": sample rate must be 100 Hz");
  for (const auto& ch : channels) {
    require(ch.size() == channels[0].size(),
            "recording " + subject_id + ": channels have unequal lengths");
  }
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
  require(!series.empty(), "moving_average: empty series");
  require(window >= 1, "moving_average: window must be >= 1");

  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t begin = i + 1 >= window ? i + 1 - window : 0;
    // Summed per position rather than with a running sum so that window=1 and
    // constant inputs are reproduced exactly.
    double sum = 0.0;
    for (std::size_t j = begin; j <= i; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(i - begin + 1);
  }
  return out;
}

std::vector<double> stack_features(std::span<const std::vector<double>> slices, std::size_t frames) {
  require(slices.size() == kNumChannels, "stack_features: expected 6 channel slices");
  std::vector<double> out;
  out.reserve(kNumChannels * frames);
  for (const auto& slice : slices) {
    require(slice.size() == frames, "stack_features: slice length mismatch");
    out.insert(out.end(), slice.begin(), slice.end());
  }
  return out;
}

std::vector<FeatureWindow> segment_windows(const TimeSeriesRecording& recording,
                                           std::size_t window_len, std::size_t stride) {
  require(window_len >= 1, "segment_windows: window_len must be >= 1");
  require(stride >= 1, "segment_windows: stride must be >= 1");
  recording.validate();

  std::vector<FeatureWindow> windows;
  const std::size_t n = recording.length();
  int index = 0;
  std::vector<std::vector<double>> slices(kNumChannels);
  for (std::size_t offset = 0; offset + window_len <= n; offset += stride) {
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      const auto& ch = recording.channels[c];
      slices[c].assign(ch.begin() + static_cast<std::ptrdiff_t>(offset),
                       ch.begin() + static_cast<std::ptrdiff_t>(offset + window_len));
    }
    windows.push_back(FeatureWindow{stack_features(slices, window_len), recording.gender,
                                    recording.subject_id, index++});
  }
  return windows;
}

std::vector<FeatureWindow> preprocess_recording(const TimeSeriesRecording& recording,
                                                std::size_t filter_window, std::size_t window_len,
                                                std::size_t stride) {
  recording.validate();
  if (recording.length() == 0) return {};
  TimeSeriesRecording filtered = recording;
  for (auto& ch : filtered.channels) ch = moving_average(ch, filter_window);
  return segment_windows(filtered, window_len, stride);
}

NormStats fit_normalizer(std::span<const FeatureWindow> train_windows) {
  require(train_windows.size() >= 2, "fit_normalizer: need at least 2 windows");
  const std::size_t dim = train_windows.front().features.size();
  for (const auto& w : train_windows) {
    require(w.features.size() == dim, "fit_normalizer: inconsistent feature lengths");
  }

  const double n = static_cast<double>(train_windows.size());
  NormStats stats{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  for (const auto& w : train_windows) {
    for (std::size_t i = 0; i < dim; ++i) stats.mean[i] += w.features[i];
  }
  for (double& m : stats.mean) m /= n;

  for (const auto& w : train_windows) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = w.features[i] - stats.mean[i];
      stats.std[i] += d * d;
    }
  }
  for (double& s : stats.std) {
    s = std::sqrt(s / n);
    if (s < 1e-12) s = 1.0;
  }
  return stats;
}

FeatureWindow apply_normalizer(const NormStats& stats, const FeatureWindow& window) {
  FeatureWindow out = window;
  apply_normalizer_inplace(stats, std::span<FeatureWindow>(&out, 1));
  return out;
}

void apply_normalizer_inplace(const NormStats& stats, std::span<FeatureWindow> windows) {
  require(stats.mean.size() == stats.std.size(), "apply_normalizer: malformed stats");
  for (auto& w : windows) {
    require(w.features.size() == stats.size(), "apply_normalizer: feature length mismatch");
    for (std::size_t i = 0; i < w.features.size(); ++i) {
      w.features[i] = (w.features[i] - stats.mean[i]) / stats.std[i];
    }
  }
}

DatasetSplit split_dataset(std::span<const FeatureWindow> windows, const SplitRatios& ratios,
                           std::uint64_t seed) {
  require(ratios.train > 0.0 && ratios.validation > 0.0 && ratios.test > 0.0,
          "split_dataset: ratios must be positive");
  require(std::abs(ratios.train + ratios.validation + ratios.test - 1.0) <= 1e-9,
          "split_dataset: ratios must sum to 1");

  std::vector<std::string> subjects;
  subjects.reserve(windows.size());
  for (const auto& w : windows) subjects.push_back(w.subject_id);
  std::sort(subjects.begin(), subjects.end());
  subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
  require(subjects.size() >= 3, "split_dataset: need at least 3 distinct subjects");

  std::mt19937_64 rng(seed);
  std::shuffle(subjects.begin(), subjects.end(), rng);

  const auto n = static_cast<long long>(subjects.size());
  long long cut1 = std::llround(static_cast<double>(n) * ratios.train);
  long long cut2 = std::llround(static_cast<double>(n) * (ratios.train + ratios.validation));
  cut1 = std::clamp(cut1, 1LL, n - 2);
  cut2 = std::clamp(cut2, cut1 + 1, n - 1);

  // Subject id -> part index, looked up by binary search over the sorted copy.
  std::vector<std::pair<std::string, int>> part_of;
  part_of.reserve(subjects.size());
  for (long long i = 0; i < n; ++i) {
    part_of.emplace_back(subjects[static_cast<std::size_t>(i)], i < cut1 ? 0 : (i < cut2 ? 1 : 2));
  }
  std::sort(part_of.begin(), part_of.end());

  DatasetSplit split;
  for (const auto& w : windows) {
    auto it = std::lower_bound(part_of.begin(), part_of.end(), w.subject_id,
                               [](const auto& entry, const std::string& id) { return entry.first < id; });
    switch (it->second) {
      case 0: split.train.push_back(w); break;
      case 1: split.validation.push_back(w); break;
      default: split.test.push_back(w); break;
    }
  }
  return split;
}

}  // namespace gaitrel
