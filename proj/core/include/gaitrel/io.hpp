#pragma once

// File formats: recording CSV + JSON sidecar, windowed JSONL, the versioned
// model file, the evaluation report and the axis relevance CSV.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gaitrel/metrics.hpp"
#include "gaitrel/nn.hpp"
#include "gaitrel/relevance.hpp"
#include "gaitrel/signal.hpp"

namespace gaitrel {

inline constexpr int kModelFormatVersion = 1;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Writes <dir>/<subject_id>.csv (header t,gx,gy,gz,ax,ay,az) and
/// <dir>/<subject_id>.json ({"subject_id", "gender", "sample_rate_hz"}).
void write_recording(const std::filesystem::path& dir, const TimeSeriesRecording& rec);
TimeSeriesRecording read_recording(const std::filesystem::path& csv_path,
                                   const std::filesystem::path& meta_path);
/// Every <id>.json sidecar in `dir` with its <id>.csv, sorted by file name.
std::vector<TimeSeriesRecording> read_recording_dir(const std::filesystem::path& dir);

/// One {"subject_id","gender","window_index","features"} object per line.
void write_windows_jsonl(const std::filesystem::path& path, std::span<const FeatureWindow> windows);
std::vector<FeatureWindow> read_windows_jsonl(const std::filesystem::path& path);

struct ModelFile {
  DenseNetwork net;
  TrainConfig train_config;
  SplitRatios split_ratios;
  std::uint64_t split_seed = 0;
  std::size_t filter_window = kDefaultFilterWindow;
  std::size_t stride = kWindowLen;
  TrainingHistory history;
};

std::string model_to_json_text(const ModelFile& model);
ModelFile model_from_json_text(const std::string& text);
void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

/// Integer matrix, scores rounded to 6 decimals.
std::string eval_report_to_json_text(const EvalReport& report);

/// Header group,method,GX,GY,GZ,AX,AY,AZ; one row per table row. With
/// `absolute` the |relevance| aggregates are written instead of signed ones.
std::string axis_table_to_csv(const AxisRelevanceTable& table, bool absolute = false);

std::string relevance_map_to_json_line(const RelevanceMap& map);

/// Throws Io when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace gaitrel
