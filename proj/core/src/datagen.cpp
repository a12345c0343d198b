#include "gaitrel/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "gaitrel/error.hpp"
#include "gaitrel/seed.hpp"

namespace gaitrel {

void GaitGenConfig::validate() const {
  require(duration_s >= 1.0, "gait generator: duration must be at least 1 s");
  require(noise_std >= 0.0, "gait generator: noise_std must be >= 0");
  require(effect_size >= 0.0, "gait generator: effect_size must be >= 0");
  require(stride_freq_hz > 0.0, "gait generator: stride frequency must be positive");
}

std::uint64_t subject_seed(std::uint64_t dataset_seed, int index) {
  return mix_seed(dataset_seed, static_cast<std::uint64_t>(index));
}

namespace {

// The first draw from a subject's generator is the frequency jitter.
double draw_frequency(const GaitGenConfig& cfg, Gender gender, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter_dist(-kFreqJitterHz, kFreqJitterHz);
  const double offset = gender == Gender::Female ? cfg.freq_effect : 0.0;
  return cfg.stride_freq_hz + offset + jitter_dist(rng);
}

}  // namespace

double subject_frequency(const GaitGenConfig& cfg, Gender gender, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return draw_frequency(cfg, gender, rng);
}

TimeSeriesRecording generate_subject(const GaitGenConfig& cfg, Gender gender, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  const bool female = gender == Gender::Female;
  const double freq = draw_frequency(cfg, gender, rng);

  std::array<std::array<double, kHarmonics>, kNumChannels> phase{};
  for (auto& ch : phase) {
    for (double& p : ch) p = phase_dist(rng);
  }

  std::array<double, kNumChannels> amplitude = cfg.base_amplitudes;
  if (female) {
    for (Axis axis : cfg.effect_channels) amplitude[static_cast<std::size_t>(axis)] *= 1.0 + cfg.effect_size;
  }

  const auto n = static_cast<std::size_t>(std::llround(cfg.duration_s * kSampleRateHz));
  TimeSeriesRecording rec;
  rec.gender = gender;
  rec.sample_rate_hz = kSampleRateHz;
  for (auto& ch : rec.channels) ch.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRateHz;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      double v = 0.0;
      for (int h = 1; h <= kHarmonics; ++h) {
        v += amplitude[c] / h * std::sin(2.0 * std::numbers::pi * h * freq * t + phase[c][h - 1]);
      }
      rec.channels[c][i] = v + cfg.noise_std * unit_normal(rng);
    }
  }
  return rec;
}

std::vector<TimeSeriesRecording> generate_dataset(const GaitGenConfig& cfg) {
  cfg.validate();
  require(cfg.n_subjects >= 2, "gait generator: need at least 2 subjects so both genders are present");
  std::vector<TimeSeriesRecording> out;
  out.reserve(static_cast<std::size_t>(cfg.n_subjects));
  for (int i = 0; i < cfg.n_subjects; ++i) {
    const Gender g = i % 2 == 0 ? Gender::Female : Gender::Male;
    TimeSeriesRecording rec = generate_subject(cfg, g, subject_seed(cfg.seed, i));
    char id[16];
    std::snprintf(id, sizeof id, "S%04d", i);
    rec.subject_id = id;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace gaitrel
