#include "gaitrel/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gaitrel/error.hpp"

namespace gaitrel {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const fs::path& file, std::size_t line, const std::string& what) {
  std::string where = file.string();
  if (line > 0) where += ":" + std::to_string(line);
  fail(ErrorKind::Parse, where + ": " + what);
}

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view token, double& out) {
  while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
  while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(out);
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

json parse_json(const std::string& text, const fs::path& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(source, 0, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_recording(const fs::path& dir, const TimeSeriesRecording& rec) {
  rec.validate();
  std::string csv = "t,gx,gy,gz,ax,ay,az\n";
  csv.reserve(rec.length() * 80);
  for (std::size_t i = 0; i < rec.length(); ++i) {
    csv += format_double(static_cast<double>(i) / rec.sample_rate_hz);
    for (const auto& ch : rec.channels) {
      csv += ',';
      csv += format_double(ch[i]);
    }
    csv += '\n';
  }
  write_text_file(dir / (rec.subject_id + ".csv"), csv);

  json meta;
  meta["subject_id"] = rec.subject_id;
  meta["gender"] = std::string(gender_code(rec.gender));
  meta["sample_rate_hz"] = 100;
  write_text_file(dir / (rec.subject_id + ".json"), meta.dump() + "\n");
}

TimeSeriesRecording read_recording(const fs::path& csv_path, const fs::path& meta_path) {
  const json meta = parse_json(read_text_file(meta_path), meta_path);
  TimeSeriesRecording rec;
  try {
    rec.subject_id = meta.at("subject_id").get<std::string>();
    const auto gender = meta.at("gender").get<std::string>();
    if (gender != "F" && gender != "M") parse_fail(meta_path, 0, "gender must be \"F\" or \"M\"");
    rec.gender = parse_gender_code(gender);
    rec.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
  } catch (const json::exception& e) {
    parse_fail(meta_path, 0, std::string("bad metadata: ") + e.what());
  }
  require(rec.sample_rate_hz == kSampleRateHz, meta_path.string() + ": sample_rate_hz must be 100");

  const std::string text = read_text_file(csv_path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) parse_fail(csv_path, 1, "missing header");
  ++line_no;
  if (trim_cr(line) != "t,gx,gy,gz,ax,ay,az") parse_fail(csv_path, 1, "expected header t,gx,gy,gz,ax,ay,az");

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim_cr(line);
    if (row.empty()) continue;
    std::array<double, kNumChannels + 1> values{};
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      const std::string_view token = row.substr(start, comma == std::string_view::npos ? row.npos : comma - start);
      if (field >= values.size() || !parse_double(token, values[field])) {
        parse_fail(csv_path, line_no, "expected 7 numeric fields");
      }
      ++field;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (field != values.size()) parse_fail(csv_path, line_no, "expected 7 numeric fields");
    for (std::size_t c = 0; c < kNumChannels; ++c) rec.channels[c].push_back(values[c + 1]);
  }
  return rec;
}

std::vector<TimeSeriesRecording> read_recording_dir(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorKind::Io, "data directory not found: " + dir.string());
  std::vector<fs::path> sidecars;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") sidecars.push_back(entry.path());
  }
  std::sort(sidecars.begin(), sidecars.end());
  std::vector<TimeSeriesRecording> out;
  for (const auto& meta : sidecars) {
    fs::path csv = meta;
    csv.replace_extension(".csv");
    if (!fs::exists(csv)) continue;  // not a recording sidecar
    out.push_back(read_recording(csv, meta));
  }
  if (out.empty()) fail(ErrorKind::Io, "no recordings found in " + dir.string());
  return out;
}

void write_windows_jsonl(const fs::path& path, std::span<const FeatureWindow> windows) {
  std::string text;
  for (const auto& w : windows) {
    json j;
    j["subject_id"] = w.subject_id;
    j["gender"] = std::string(gender_code(w.label));
    j["window_index"] = w.window_index;
    j["features"] = w.features;
    text += j.dump();
    text += '\n';
  }
  write_text_file(path, text);
}

std::vector<FeatureWindow> read_windows_jsonl(const fs::path& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<FeatureWindow> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_cr(line).empty()) continue;
    try {
      const json j = json::parse(line);
      FeatureWindow w;
      w.subject_id = j.at("subject_id").get<std::string>();
      const auto g = j.at("gender").get<std::string>();
      if (g != "F" && g != "M") parse_fail(path, line_no, "gender must be \"F\" or \"M\"");
      w.label = parse_gender_code(g);
      w.window_index = j.at("window_index").get<int>();
      w.features = j.at("features").get<std::vector<double>>();
      if (w.features.size() != kFeatureDim) parse_fail(path, line_no, "features must hold 600 numbers");
      out.push_back(std::move(w));
    } catch (const json::exception& e) {
      parse_fail(path, line_no, e.what());
    }
  }
  return out;
}

std::string model_to_json_text(const ModelFile& model) {
  const DenseNetwork& net = model.net;
  net.validate();
  json j;
  j["format_version"] = kModelFormatVersion;
  j["layer_dims"] = net.dims();
  json layers = json::array();
  for (const auto& layer : net.layers) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(layer.weights.size()));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) w.push_back(layer.weights(r, c));
    }
    layers.push_back({{"activation", activation_name(layer.activation)},
                      {"weights", std::move(w)},
                      {"biases", std::vector<double>(layer.biases.data(), layer.biases.data() + layer.biases.size())}});
  }
  j["layers"] = std::move(layers);
  j["norm_stats"] = {{"mean", net.norm_stats.mean}, {"std", net.norm_stats.std}};
  j["channel_order"] = net.channel_order;
  j["seed"] = net.seed;
  const auto& tc = model.train_config;
  j["train_config"] = {{"batch_size", tc.batch_size},
                       {"max_epochs", tc.max_epochs},
                       {"patience", tc.patience},
                       {"lr", tc.lr},
                       {"seed", tc.seed}};
  j["split"] = {{"ratios", {model.split_ratios.train, model.split_ratios.validation, model.split_ratios.test}},
                {"seed", model.split_seed}};
  j["preprocess"] = {{"filter_window", model.filter_window}, {"window_len", kWindowLen}, {"stride", model.stride}};
  json epochs = json::array();
  for (const auto& e : model.history.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"val_loss", e.val_loss},
                      {"val_macro_f1", e.val_macro_f1}});
  }
  j["history"] = {{"best_epoch", model.history.best_epoch},
                  {"early_stopped", model.history.early_stopped},
                  {"epochs", std::move(epochs)}};
  return j.dump() + "\n";
}

ModelFile model_from_json_text(const std::string& text) {
  const json j = parse_json(text, "model file");
  ModelFile model;
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      fail(ErrorKind::Format, "unsupported model format_version " + std::to_string(version));
    }
    const auto dims = j.at("layer_dims").get<std::vector<std::size_t>>();
    const auto& layers = j.at("layers");
    if (dims.size() < 2 || layers.size() != dims.size() - 1) {
      fail(ErrorKind::Format, "layer_dims does not match the number of layers");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto in = static_cast<Eigen::Index>(dims[l]);
      const auto out = static_cast<Eigen::Index>(dims[l + 1]);
      const auto w = layers[l].at("weights").get<std::vector<double>>();
      const auto b = layers[l].at("biases").get<std::vector<double>>();
      if (w.size() != dims[l] * dims[l + 1] || b.size() != dims[l + 1]) {
        fail(ErrorKind::Format, "layer " + std::to_string(l) + " arrays do not match layer_dims");
      }
      LayerParams layer;
      layer.activation = parse_activation(layers[l].at("activation").get<std::string>());
      layer.weights.resize(out, in);
      for (Eigen::Index r = 0; r < out; ++r) {
        for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = w[static_cast<std::size_t>(r * in + c)];
      }
      layer.biases = Eigen::Map<const Eigen::VectorXd>(b.data(), out);
      model.net.layers.push_back(std::move(layer));
    }
    model.net.norm_stats.mean = j.at("norm_stats").at("mean").get<std::vector<double>>();
    model.net.norm_stats.std = j.at("norm_stats").at("std").get<std::vector<double>>();
    const auto order = j.at("channel_order").get<std::vector<std::string>>();
    if (order.size() != kNumChannels) fail(ErrorKind::Format, "channel_order must list 6 axes");
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      if (order[c] != kAxisNames[c]) fail(ErrorKind::Format, "channel_order must be GX,GY,GZ,AX,AY,AZ");
      model.net.channel_order[c] = order[c];
    }
    model.net.seed = j.at("seed").get<std::uint64_t>();

    const auto& tc = j.at("train_config");
    model.train_config.batch_size = tc.at("batch_size").get<std::size_t>();
    model.train_config.max_epochs = tc.at("max_epochs").get<int>();
    model.train_config.patience = tc.at("patience").get<int>();
    model.train_config.lr = tc.at("lr").get<double>();
    model.train_config.seed = tc.at("seed").get<std::uint64_t>();

    const auto ratios = j.at("split").at("ratios").get<std::vector<double>>();
    if (ratios.size() != 3) fail(ErrorKind::Format, "split.ratios must have 3 entries");
    model.split_ratios = {ratios[0], ratios[1], ratios[2]};
    model.split_seed = j.at("split").at("seed").get<std::uint64_t>();
    model.filter_window = j.at("preprocess").at("filter_window").get<std::size_t>();
    model.stride = j.at("preprocess").at("stride").get<std::size_t>();

    const auto& h = j.at("history");
    model.history.best_epoch = h.at("best_epoch").get<int>();
    model.history.early_stopped = h.at("early_stopped").get<bool>();
    for (const auto& e : h.at("epochs")) {
      model.history.epochs.push_back({e.at("epoch").get<int>(), e.at("train_loss").get<double>(),
                                      e.at("val_loss").get<double>(), e.at("val_macro_f1").get<double>()});
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("malformed model file: ") + e.what());
  }
  try {
    model.net.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Format, std::string("inconsistent model file: ") + e.what());
  }
  return model;
}

void save_model(const fs::path& path, const ModelFile& model) { write_text_file(path, model_to_json_text(model)); }

ModelFile load_model(const fs::path& path) { return model_from_json_text(read_text_file(path)); }

std::string eval_report_to_json_text(const EvalReport& report) {
  json j;
  const auto& c = report.matrix.counts;
  j["matrix"] = {{c[0][0], c[0][1]}, {c[1][0], c[1][1]}};
  j["labels"] = {"Female", "Male"};
  json per_class = json::object();
  for (Gender g : {Gender::Female, Gender::Male}) {
    const auto& s = report.per_class[static_cast<int>(g)];
    per_class[std::string(gender_name(g))] = {{"precision", round6(s.precision)},
                                              {"recall", round6(s.recall)},
                                              {"f1", round6(s.f1)},
                                              {"degenerate", s.degenerate}};
  }
  j["per_class"] = std::move(per_class);
  j["macro_f1"] = round6(report.macro_f1);
  j["degenerate"] = report.degenerate;
  j["total"] = report.matrix.total();
  return j.dump(2) + "\n";
}

std::string axis_table_to_csv(const AxisRelevanceTable& table, bool absolute) {
  std::string out = "group,method";
  for (auto name : kAxisNames) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (const auto& row : table.rows) {
    out += group_label(row.group);
    out += ',';
    out += method_label(row.method);
    for (double v : absolute ? row.abs_scores : row.scores) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string relevance_map_to_json_line(const RelevanceMap& map) {
  json j;
  j["subject_id"] = map.subject_id;
  j["window_index"] = map.window_index;
  j["method"] = std::string(method_token(map.method));
  j["target"] = map.target;
  j["values"] = map.values;
  return j.dump();
}

}  // namespace gaitrel
