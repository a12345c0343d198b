#include "gaitrel/io.hpp"

#include <gtest/gtest.h>

#include <charconv>

#include <cstring>
#include <limits>

#include "gaitrel/datagen.hpp"
#include "gaitrel/error.hpp"
#include "test_util.hpp"

namespace gaitrel {
namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorKind::Usage;
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, -2.5e-300, 1.0 / 3.0, 6.02214076e23, 0.0, std::numeric_limits<double>::denorm_min()}) {
    const std::string text = format_double(v);
    double back = 1.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), back);
    EXPECT_EQ(ec, std::errc{}) << text;
    EXPECT_EQ(ptr, text.data() + text.size()) << text;
    EXPECT_EQ(back, v) << text;
  }
  EXPECT_EQ(format_double(0.01), "0.01");
}

TEST(Recording, CsvRoundTripIsExact) {
  testing::TempDir dir;
  GaitGenConfig cfg;
  cfg.duration_s = 1.5;
  auto rec = generate_subject(cfg, Gender::Male, 4);
  rec.subject_id = "S42";
  write_recording(dir.path(), rec);
  const auto back = read_recording(dir / "S42.csv", dir / "S42.json");
  EXPECT_EQ(back.subject_id, "S42");
  EXPECT_EQ(back.gender, Gender::Male);
  EXPECT_EQ(back.channels, rec.channels);

  const auto text = read_text_file(dir / "S42.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,gx,gy,gz,ax,ay,az");
}

TEST(Recording, MalformedCsvReportsFileAndLine) {
  testing::TempDir dir;
  write_text_file(dir / "A.json", R"({"subject_id":"A","gender":"F","sample_rate_hz":100})");
  write_text_file(dir / "A.csv", "t,gx,gy,gz,ax,ay,az\n0,1,2,3,4,5,6\n0.01,1,2,three,4,5,6\n");
  try {
    read_recording(dir / "A.csv", dir / "A.json");
    FAIL() << "expected parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find("A.csv:3"), std::string::npos) << e.what();
  }
  write_text_file(dir / "A.csv", "time,gx\n");
  EXPECT_EQ(kind_of([&] { read_recording(dir / "A.csv", dir / "A.json"); }), ErrorKind::Parse);
  write_text_file(dir / "A.csv", "t,gx,gy,gz,ax,ay,az\n0,1,2,3,4,5\n");
  EXPECT_EQ(kind_of([&] { read_recording(dir / "A.csv", dir / "A.json"); }), ErrorKind::Parse);
}

TEST(Recording, MetadataValidation) {
  testing::TempDir dir;
  write_text_file(dir / "A.csv", "t,gx,gy,gz,ax,ay,az\n0,1,2,3,4,5,6\n");
  write_text_file(dir / "A.json", R"({"subject_id":"A","gender":"X","sample_rate_hz":100})");
  EXPECT_EQ(kind_of([&] { read_recording(dir / "A.csv", dir / "A.json"); }), ErrorKind::Parse);
  write_text_file(dir / "A.json", R"({"subject_id":"A","gender":"F","sample_rate_hz":50})");
  EXPECT_EQ(kind_of([&] { read_recording(dir / "A.csv", dir / "A.json"); }), ErrorKind::InvalidInput);
  write_text_file(dir / "A.json", R"({"subject_id":"A","gender":"F","sample_rate_hz":100})");
  EXPECT_EQ(kind_of([&] { read_recording(dir / "missing.csv", dir / "A.json"); }), ErrorKind::Io);
  EXPECT_EQ(kind_of([&] { read_recording_dir(dir / "nope"); }), ErrorKind::Io);
}

TEST(Windows, JsonlRoundTrip) {
  testing::TempDir dir;
  std::vector<FeatureWindow> windows{{testing::random_vector(kFeatureDim, 1), Gender::Female, "S1", 0},
                                     {testing::random_vector(kFeatureDim, 2), Gender::Male, "S2", 3}};
  write_windows_jsonl(dir / "w.jsonl", windows);
  const auto back = read_windows_jsonl(dir / "w.jsonl");
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].features, windows[i].features);
    EXPECT_EQ(back[i].label, windows[i].label);
    EXPECT_EQ(back[i].subject_id, windows[i].subject_id);
    EXPECT_EQ(back[i].window_index, windows[i].window_index);
  }
  write_text_file(dir / "bad.jsonl", R"({"subject_id":"S","gender":"F","window_index":0,"features":[1,2]})" "\n");
  EXPECT_EQ(kind_of([&] { read_windows_jsonl(dir / "bad.jsonl"); }), ErrorKind::Parse);
}

ModelFile sample_model() {
  ModelFile model;
  model.net = testing::random_network({kFeatureDim, 500, 250, 50, 20, 4, 2}, 3, true);
  model.net.norm_stats = {testing::random_vector(kFeatureDim, 8), std::vector<double>(kFeatureDim, 1.5)};
  model.train_config.seed = 77;
  model.split_seed = 1234567890123ULL;
  model.history.epochs.push_back({1, 0.5, 0.6, 0.7});
  model.history.best_epoch = 1;
  return model;
}

TEST(Model, RoundTripReproducesLogitsBitExactly) {
  const ModelFile model = sample_model();
  const ModelFile back = model_from_json_text(model_to_json_text(model));
  const auto x = testing::random_vector(kFeatureDim, 99);
  const auto a = forward(model.net, x).logits();
  const auto b = forward(back.net, x).logits();
  ASSERT_EQ(a.size(), b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_EQ(std::memcmp(&a(i), &b(i), sizeof(double)), 0);
  EXPECT_EQ(back.net.norm_stats.mean, model.net.norm_stats.mean);
  EXPECT_EQ(back.split_seed, model.split_seed);
  EXPECT_EQ(back.train_config.seed, 77u);
  EXPECT_EQ(back.history.epochs.size(), 1u);
  EXPECT_NO_THROW(back.net.validate_default_architecture());
  EXPECT_EQ(model_to_json_text(back), model_to_json_text(model));
}

TEST(Model, VersionAndShapeErrorsAreFormatErrors) {
  const std::string text = model_to_json_text(sample_model());
  std::string bumped = text;
  bumped.replace(bumped.find("\"format_version\":1"), 18, "\"format_version\":2");
  EXPECT_EQ(kind_of([&] { model_from_json_text(bumped); }), ErrorKind::Format);

  std::string bad_dims = text;
  bad_dims.replace(bad_dims.find("\"layer_dims\":[600"), 17, "\"layer_dims\":[601");
  EXPECT_EQ(kind_of([&] { model_from_json_text(bad_dims); }), ErrorKind::Format);

  EXPECT_EQ(kind_of([&] { model_from_json_text("{not json"); }), ErrorKind::Parse);
}

TEST(EvalReport, SixDecimalScoresAndIntegerMatrix) {
  const auto text = eval_report_to_json_text(make_report(matrix_from_counts({191, 43, 56, 193})));
  EXPECT_NE(text.find("\"macro_f1\": 0.795"), std::string::npos) << text;
  EXPECT_NE(text.find("191"), std::string::npos);
  const auto pos = text.find("\"macro_f1\": ");
  const auto value = text.substr(pos + 12, text.find_first_of(",\n", pos) - pos - 12);
  EXPECT_LE(value.size() - value.find('.') - 1, 6u) << value;
}

TEST(AxisTable, CsvLayout) {
  AxisRelevanceTable table;
  table.rows.push_back({Group::Overall, RelevanceMethod::LrpAlphaBeta, 3, {1, -2, 3, 4, 5, 6}, {1, 2, 3, 4, 5, 6}});
  const auto csv = axis_table_to_csv(table);
  EXPECT_EQ(csv, "group,method,GX,GY,GZ,AX,AY,AZ\nOverall,LRP Alpha 2 Beta 1,1,-2,3,4,5,6\n");
  EXPECT_EQ(axis_table_to_csv(table, true), "group,method,GX,GY,GZ,AX,AY,AZ\nOverall,LRP Alpha 2 Beta 1,1,2,3,4,5,6\n");
}

TEST(TextFiles, UnwritablePathIsIoError) {
  EXPECT_EQ(kind_of([] { write_text_file("/nonexistent_dir_gaitrel/x.txt", "x"); }), ErrorKind::Io);
  EXPECT_EQ(kind_of([] { read_text_file("/nonexistent_dir_gaitrel/x.txt"); }), ErrorKind::Io);
}

}  // namespace
}  // namespace gaitrel
