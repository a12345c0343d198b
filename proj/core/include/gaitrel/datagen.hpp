#pragma once

// Synthetic 6-axis gait recordings with a controllable gender effect. Each
// channel is a 3-harmonic sinusoid at the subject's stride frequency plus
// Gaussian noise; Female recordings get their amplitude scaled by
// (1 + effect_size) on the effect channels and their stride frequency shifted
// by freq_effect.

#include <array>
#include <cstdint>
#include <vector>

#include "gaitrel/signal.hpp"

namespace gaitrel {

struct GaitGenConfig {
  int n_subjects = 200;
  double duration_s = 10.0;
  double stride_freq_hz = 1.0;
  // GX, GY, GZ in rad/s; AX, AY, AZ in g.
  std::array<double, kNumChannels> base_amplitudes{0.5, 0.3, 0.4, 0.2, 1.0, 0.3};
  std::vector<Axis> effect_channels{Axis::AX};
  double effect_size = 0.3;
  double freq_effect = -0.05;
  double noise_std = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr int kHarmonics = 3;
inline constexpr double kFreqJitterHz = 0.05;

/// Stride frequency of the subject generate_subject would produce.
double subject_frequency(const GaitGenConfig& cfg, Gender gender, std::uint64_t subject_seed);

TimeSeriesRecording generate_subject(const GaitGenConfig& cfg, Gender gender, std::uint64_t subject_seed);

/// Seed of the i-th subject, a counter-based mix of cfg.seed.
std::uint64_t subject_seed(std::uint64_t dataset_seed, int index);

/// n_subjects recordings with alternating genders starting at Female;
/// subject ids are "S0000", "S0001", ...
std::vector<TimeSeriesRecording> generate_dataset(const GaitGenConfig& cfg);

}  // namespace gaitrel
