#include "gaitrel/signal.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gaitrel/error.hpp"
#include "test_util.hpp"

namespace gaitrel {
namespace {

TimeSeriesRecording ramp_recording(std::size_t n, const std::string& id = "S1", Gender g = Gender::Male) {
  TimeSeriesRecording rec;
  rec.subject_id = id;
  rec.gender = g;
  for (std::size_t c = 0; c < kNumChannels; ++c) {
    rec.channels[c].resize(n);
    for (std::size_t i = 0; i < n; ++i) rec.channels[c][i] = static_cast<double>(c * 10000 + i);
  }
  return rec;
}

std::vector<FeatureWindow> windows_for_subjects(int subjects, int per_subject) {
  std::vector<FeatureWindow> out;
  for (int s = 0; s < subjects; ++s) {
    for (int w = 0; w < per_subject; ++w) {
      out.push_back({std::vector<double>(4, s + 0.5 * w), s % 2 ? Gender::Male : Gender::Female,
                     "subj" + std::to_string(s), w});
    }
  }
  return out;
}

TEST(MovingAverage, ConstantSeriesIsFixedPoint) {
  const std::vector<double> s{5, 5, 5, 5};
  EXPECT_EQ(moving_average(s, 10), s);
}

TEST(MovingAverage, TrailingWindow) {
  const std::vector<double> s{1, 2, 3, 4};
  EXPECT_EQ(moving_average(s, 2), (std::vector<double>{1, 1.5, 2.5, 3.5}));
}

TEST(MovingAverage, WarmUpUsesAvailablePrefix) {
  const std::vector<double> s{0, 10};
  EXPECT_EQ(moving_average(s, 10), (std::vector<double>{0, 5}));
}

TEST(MovingAverage, Errors) {
  EXPECT_THROW(moving_average(std::vector<double>{}, 3), Error);
  EXPECT_THROW(moving_average(std::vector<double>{1.0}, 0), Error);
}

TEST(MovingAverage, WindowOneIsIdentityAndLengthPreserved) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = testing::random_vector(1 + seed * 7, seed);
    EXPECT_EQ(moving_average(s, 1), s);
    for (std::size_t w : {2u, 10u, 50u}) EXPECT_EQ(moving_average(s, w).size(), s.size());
  }
}

TEST(MovingAverage, MatchesDirectDefinition) {
  const auto s = testing::random_vector(37, 3);
  const auto out = moving_average(s, 10);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t begin = i >= 9 ? i - 9 : 0;
    double sum = 0;
    for (std::size_t j = begin; j <= i; ++j) sum += s[j];
    EXPECT_NEAR(out[i], sum / static_cast<double>(i - begin + 1), 1e-12);
  }
}

TEST(StackFeatures, LayoutFollowsChannelOrder) {
  for (std::size_t hot = 0; hot < kNumChannels; ++hot) {
    std::vector<std::vector<double>> slices(kNumChannels, std::vector<double>(kWindowLen, 0.0));
    slices[hot].assign(kWindowLen, 1.0);
    const auto v = stack_features(slices);
    ASSERT_EQ(v.size(), kFeatureDim);
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
      EXPECT_EQ(v[i], i / kWindowLen == hot ? 1.0 : 0.0) << "index " << i;
    }
  }
}

TEST(StackFeatures, RejectsWrongShapes) {
  std::vector<std::vector<double>> five(5, std::vector<double>(kWindowLen));
  EXPECT_THROW(stack_features(five), Error);
  std::vector<std::vector<double>> short_slice(kNumChannels, std::vector<double>(kWindowLen));
  short_slice[2].resize(99);
  EXPECT_THROW(stack_features(short_slice), Error);
}

TEST(SegmentWindows, CountsAndOffsets) {
  const auto w250 = segment_windows(ramp_recording(250));
  ASSERT_EQ(w250.size(), 2u);
  EXPECT_EQ(w250[0].features[0], 0.0);
  EXPECT_EQ(w250[1].features[0], 100.0);
  EXPECT_EQ(w250[1].window_index, 1);
  EXPECT_EQ(segment_windows(ramp_recording(100)).size(), 1u);
  EXPECT_TRUE(segment_windows(ramp_recording(99)).empty());
}

TEST(SegmentWindows, NonOverlappingWindowsReconstructCoveredSamples) {
  const auto rec = ramp_recording(537, "S9", Gender::Female);
  const auto windows = segment_windows(rec);
  ASSERT_EQ(windows.size(), 5u);
  for (const auto& w : windows) {
    EXPECT_EQ(w.label, Gender::Female);
    EXPECT_EQ(w.subject_id, "S9");
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      for (std::size_t i = 0; i < kWindowLen; ++i) {
        EXPECT_EQ(w.features[c * kWindowLen + i],
                  rec.channels[c][static_cast<std::size_t>(w.window_index) * kWindowLen + i]);
      }
    }
  }
}

TEST(SegmentWindows, OverlappingStride) {
  EXPECT_EQ(segment_windows(ramp_recording(250), kWindowLen, 50).size(), 4u);
}

TEST(SegmentWindows, RejectsUnequalChannels) {
  auto rec = ramp_recording(200);
  rec.channels[4].pop_back();
  EXPECT_THROW(segment_windows(rec), Error);
}

TEST(PreprocessRecording, FiltersBeforeSegmenting) {
  auto rec = ramp_recording(200);
  const auto windows = preprocess_recording(rec, 10);
  ASSERT_EQ(windows.size(), 2u);
  // Second window starts at sample 100 whose trailing mean spans 91..100.
  EXPECT_DOUBLE_EQ(windows[1].features[0], 95.5);
}

TEST(FitNormalizer, TwoPointPopulationStd) {
  std::vector<FeatureWindow> w{{{0.0, 7.0}, Gender::Female, "a", 0}, {{2.0, 7.0}, Gender::Male, "b", 0}};
  const auto stats = fit_normalizer(w);
  EXPECT_DOUBLE_EQ(stats.mean[0], 1.0);
  EXPECT_DOUBLE_EQ(stats.std[0], 1.0);
  EXPECT_DOUBLE_EQ(stats.mean[1], 7.0);
  EXPECT_DOUBLE_EQ(stats.std[1], 1.0);  // zero variance guard
}

TEST(FitNormalizer, NeedsTwoWindows) {
  std::vector<FeatureWindow> one{{{1.0}, Gender::Female, "a", 0}};
  EXPECT_THROW(fit_normalizer(one), Error);
}

TEST(FitNormalizer, NormalizedTrainingSetIsStandardized) {
  std::vector<FeatureWindow> windows;
  for (int i = 0; i < 50; ++i) {
    auto f = testing::random_vector(20, 100 + i, 3.0);
    f[5] = 4.2;  // guarded column
    windows.push_back({f, Gender::Female, "s" + std::to_string(i), 0});
  }
  const auto stats = fit_normalizer(windows);
  apply_normalizer_inplace(stats, windows);
  for (std::size_t i = 0; i < 20; ++i) {
    double mean = 0, sq = 0;
    for (const auto& w : windows) mean += w.features[i];
    mean /= 50.0;
    for (const auto& w : windows) sq += (w.features[i] - mean) * (w.features[i] - mean);
    EXPECT_NEAR(mean, 0.0, 1e-9);
    if (i == 5) {
      EXPECT_EQ(stats.std[i], 1.0);
    } else {
      EXPECT_NEAR(std::sqrt(sq / 50.0), 1.0, 1e-9);
    }
  }
}

TEST(ApplyNormalizer, Examples) {
  NormStats stats{{1.0, 2.0}, {2.0, 1.0}};
  const FeatureWindow w{{3.0, 2.0}, Gender::Male, "x", 4};
  const auto out = apply_normalizer(stats, w);
  EXPECT_DOUBLE_EQ(out.features[0], 1.0);
  EXPECT_DOUBLE_EQ(out.features[1], 0.0);
  EXPECT_EQ(out.label, Gender::Male);
  EXPECT_EQ(out.subject_id, "x");
  EXPECT_EQ(out.window_index, 4);

  NormStats identity{{0.0, 0.0}, {1.0, 1.0}};
  EXPECT_EQ(apply_normalizer(identity, w).features, w.features);
  EXPECT_THROW(apply_normalizer(NormStats{{0.0}, {1.0}}, w), Error);
}

TEST(SplitDataset, ExactSubjectCounts) {
  const auto windows = windows_for_subjects(10, 3);
  const auto split = split_dataset(windows, {0.6, 0.2, 0.2}, 42);
  EXPECT_EQ(split.train.size(), 18u);
  EXPECT_EQ(split.validation.size(), 6u);
  EXPECT_EQ(split.test.size(), 6u);
}

TEST(SplitDataset, DeterministicPerSeed) {
  const auto windows = windows_for_subjects(10, 2);
  const auto a = split_dataset(windows, {}, 9);
  const auto b = split_dataset(windows, {}, 9);
  ASSERT_EQ(a.test.size(), b.test.size());
  for (std::size_t i = 0; i < a.test.size(); ++i) EXPECT_EQ(a.test[i].subject_id, b.test[i].subject_id);
}

TEST(SplitDataset, SubjectDisjointAndComplete) {
  const auto windows = windows_for_subjects(23, 4);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto split = split_dataset(windows, {0.5, 0.3, 0.2}, seed);
    std::array<std::set<std::string>, 3> ids;
    std::multiset<std::pair<std::string, int>> seen;
    const std::array<const std::vector<FeatureWindow>*, 3> parts{&split.train, &split.validation, &split.test};
    for (std::size_t p = 0; p < 3; ++p) {
      EXPECT_FALSE(parts[p]->empty());
      for (const auto& w : *parts[p]) {
        ids[p].insert(w.subject_id);
        seen.emplace(w.subject_id, w.window_index);
      }
    }
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t q = p + 1; q < 3; ++q) {
        for (const auto& id : ids[p]) EXPECT_EQ(ids[q].count(id), 0u) << "seed " << seed;
      }
    }
    std::multiset<std::pair<std::string, int>> expected;
    for (const auto& w : windows) expected.emplace(w.subject_id, w.window_index);
    EXPECT_EQ(seen, expected);
  }
}

TEST(SplitDataset, MinimalSubjectsStillFillEveryPart) {
  const auto split = split_dataset(windows_for_subjects(3, 1), {0.8, 0.1, 0.1}, 1);
  EXPECT_EQ(split.train.size(), 1u);
  EXPECT_EQ(split.validation.size(), 1u);
  EXPECT_EQ(split.test.size(), 1u);
}

TEST(SplitDataset, Errors) {
  EXPECT_THROW(split_dataset(windows_for_subjects(2, 5), {}, 0), Error);
  EXPECT_THROW(split_dataset(windows_for_subjects(5, 1), {0.5, 0.5, 0.0}, 0), Error);
  EXPECT_THROW(split_dataset(windows_for_subjects(5, 1), {0.5, 0.3, 0.3}, 0), Error);
}

}  // namespace
}  // namespace gaitrel
