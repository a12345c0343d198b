#pragma once

// Signal preprocessing for 6-axis IMU gait recordings: smoothing, 1 s window
// extraction, feature stacking, normalization and subject-disjoint splitting.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaitrel {

enum class Gender : int { Female = 0, Male = 1 };

inline constexpr std::size_t kNumChannels = 6;
inline constexpr double kSampleRateHz = 100.0;
inline constexpr std::size_t kWindowLen = 100;
inline constexpr std::size_t kFeatureDim = kNumChannels * kWindowLen;
inline constexpr std::size_t kDefaultFilterWindow = 10;

/// Canonical channel order. Feature index ranges follow it: GX 0-99, GY 100-199, ..., AZ 500-599.
enum class Axis : int { GX = 0, GY, GZ, AX, AY, AZ };

inline constexpr std::array<std::string_view, kNumChannels> kAxisNames = {"GX", "GY", "GZ",
                                                                          "AX", "AY", "AZ"};

std::string_view gender_code(Gender g);  // "F" / "M"
std::string_view gender_name(Gender g);  // "Female" / "Male"
Gender parse_gender_code(std::string_view code);

struct TimeSeriesRecording {
  std::string subject_id;
  Gender gender = Gender::Female;
  double sample_rate_hz = kSampleRateHz;
  // Gyroscope channels in rad/s, accelerometer channels in g.
  std::array<std::vector<double>, kNumChannels> channels;

  std::size_t length() const { return channels[0].size(); }

  // Throws InvalidInput on unequal channel lengths or a sample rate other than 100 Hz.
  void validate() const;
};

struct FeatureWindow {
  std::vector<double> features;
  Gender label = Gender::Female;
  std::string subject_id;
  int window_index = 0;
};

struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;

  std::size_t size() const { return mean.size(); }
};

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

struct DatasetSplit {
  std::vector<FeatureWindow> train;
  std::vector<FeatureWindow> validation;
  std::vector<FeatureWindow> test;
};

/// Trailing moving average with an expanding warm-up:
/// out[i] = mean(series[max(0, i - window + 1) ..= i]). Output length equals input length.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

/// Concatenates six equal-length slices in channel order. Every slice must have
/// `frames` samples.
std::vector<double> stack_features(std::span<const std::vector<double>> slices,
                                   std::size_t frames = kWindowLen);

/// Cuts full windows at offsets 0, stride, 2*stride, ...; a trailing partial
/// window is dropped. A recording shorter than `window_len` yields no windows.
std::vector<FeatureWindow> segment_windows(const TimeSeriesRecording& recording,
                                           std::size_t window_len = kWindowLen,
                                           std::size_t stride = kWindowLen);

/// Filters every channel of the full recording, then segments it.
std::vector<FeatureWindow> preprocess_recording(const TimeSeriesRecording& recording,
                                                std::size_t filter_window = kDefaultFilterWindow,
                                                std::size_t window_len = kWindowLen,
                                                std::size_t stride = kWindowLen);

/// Per-feature mean and population standard deviation. Standard deviations
/// below 1e-12 are stored as 1.0.
NormStats fit_normalizer(std::span<const FeatureWindow> train_windows);

FeatureWindow apply_normalizer(const NormStats& stats, const FeatureWindow& window);
void apply_normalizer_inplace(const NormStats& stats, std::span<FeatureWindow> windows);

/// Subject-disjoint split. Distinct subject ids are sorted, shuffled with a
/// seeded generator, and cut at cumulative ratio boundaries over the subject count.
DatasetSplit split_dataset(std::span<const FeatureWindow> windows, const SplitRatios& ratios,
                           std::uint64_t seed);

}  // namespace gaitrel
