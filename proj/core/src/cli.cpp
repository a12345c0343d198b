#include "gaitrel/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaitrel/datagen.hpp"
#include "gaitrel/error.hpp"
#include "gaitrel/io.hpp"
#include "gaitrel/metrics.hpp"
#include "gaitrel/nn.hpp"
#include "gaitrel/relevance.hpp"
#include "gaitrel/seed.hpp"

namespace gaitrel::cli {
namespace fs = std::filesystem;

namespace {

// Seed streams derived from the single --seed flag of `train`.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

double parse_number(const std::string& token, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used == token.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::Usage, flag + ": \"" + token + "\" is not a number");
}

struct GenDataArgs {
  int subjects = 0;
  std::uint64_t seed = 0;
  double effect_size = 0.3;
  double noise = 0.05;
  double freq_effect = -0.05;
  double duration = 10.0;
  std::string effect_channels = "AX";
  std::string out;
};

struct TrainArgs {
  std::string data;
  std::size_t batch = 16;
  double lr = 1e-3;
  int max_epochs = 200;
  int patience = 10;
  std::string split = "0.6,0.2,0.2";
  std::uint64_t seed = 0;
  std::size_t filter = kDefaultFilterWindow;
  std::size_t stride = kWindowLen;
  std::string out;
  bool quiet = false;
};

struct EvalArgs {
  std::string model;
  std::string data;
  std::string part = "test";
  std::string report;
  std::string from_matrix;
};

struct ExplainArgs {
  std::string model;
  std::string data;
  std::string part = "test";
  std::string methods = "gradient,lrp-eps,lrp-a2b1";
  std::string groups = "overall,male,female";
  std::string out;
  std::string dump_maps;
  std::string abs_out;
};

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorKind::Io, "cannot create output directory " + dir.string());
}

int cmd_gen_data(const GenDataArgs& a, std::ostream& out) {
  GaitGenConfig cfg;
  cfg.n_subjects = a.subjects;
  cfg.seed = a.seed;
  cfg.effect_size = a.effect_size;
  cfg.noise_std = a.noise;
  cfg.freq_effect = a.freq_effect;
  cfg.duration_s = a.duration;
  cfg.effect_channels.clear();
  for (const auto& token : split_list(a.effect_channels)) {
    auto it = std::find(kAxisNames.begin(), kAxisNames.end(), token);
    if (it == kAxisNames.end()) fail(ErrorKind::Usage, "--effect-channels: unknown axis \"" + token + "\"");
    cfg.effect_channels.push_back(static_cast<Axis>(it - kAxisNames.begin()));
  }
  const auto recordings = generate_dataset(cfg);

  const fs::path dir(a.out);
  ensure_directory(dir);
  int female = 0;
  for (const auto& rec : recordings) {
    write_recording(dir, rec);
    female += rec.gender == Gender::Female ? 1 : 0;
  }
  const int male = static_cast<int>(recordings.size()) - female;

  nlohmann::json manifest;
  manifest["subjects"] = recordings.size();
  manifest["female"] = female;
  manifest["male"] = male;
  manifest["seed"] = cfg.seed;
  manifest["effect_size"] = cfg.effect_size;
  manifest["freq_effect"] = cfg.freq_effect;
  manifest["noise_std"] = cfg.noise_std;
  manifest["duration_s"] = cfg.duration_s;
  manifest["effect_channels"] = split_list(a.effect_channels);
  manifest["samples_per_recording"] = recordings.front().length();
  // Named so that read_recording_dir skips it (no matching .csv).
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

  out << "wrote " << recordings.size() << " recordings (" << female << " F, " << male << " M, "
      << recordings.front().length() << " samples each) to " << dir.string() << "\n";
  return kOk;
}

SplitRatios parse_ratios(const std::string& text) {
  const auto parts = split_list(text);
  if (parts.size() != 3) fail(ErrorKind::Usage, "--split expects three comma-separated ratios");
  return {parse_number(parts[0], "--split"), parse_number(parts[1], "--split"), parse_number(parts[2], "--split")};
}

std::vector<FeatureWindow> select_part(const DatasetSplit& split, const std::string& part) {
  if (part == "train") return split.train;
  if (part == "validation") return split.validation;
  if (part == "test") return split.test;
  std::vector<FeatureWindow> all = split.train;
  all.insert(all.end(), split.validation.begin(), split.validation.end());
  all.insert(all.end(), split.test.begin(), split.test.end());
  return all;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  std::vector<FeatureWindow> windows = load_windows(a.data, a.filter, a.stride);
  const SplitRatios ratios = parse_ratios(a.split);
  const std::uint64_t split_seed = mix_seed(a.seed, kSplitStream);
  DatasetSplit split = split_dataset(windows, ratios, split_seed);
  windows.clear();

  const NormStats stats = fit_normalizer(split.train);
  apply_normalizer_inplace(stats, split.train);
  apply_normalizer_inplace(stats, split.validation);
  apply_normalizer_inplace(stats, split.test);

  DenseNetwork net = init_network(mix_seed(a.seed, kInitStream));
  net.norm_stats = stats;

  TrainConfig cfg;
  cfg.batch_size = a.batch;
  cfg.max_epochs = a.max_epochs;
  cfg.patience = a.patience;
  cfg.lr = a.lr;
  cfg.seed = mix_seed(a.seed, kShuffleStream);

  out << "train/validation/test windows: " << split.train.size() << "/" << split.validation.size() << "/"
      << split.test.size() << "\n";
  const bool quiet = a.quiet;
  TrainResult result = train(std::move(net), split, cfg, [&out, quiet](const EpochRecord& e) {
    if (quiet) return;
    out << "epoch " << e.epoch << " train_loss=" << format_double(e.train_loss)
        << " val_loss=" << format_double(e.val_loss) << " val_macro_f1=" << format_double(e.val_macro_f1) << "\n";
  });
  out << "best epoch " << result.history.best_epoch << " of " << result.history.epochs.size()
      << (result.history.early_stopped ? " (early stop)" : "") << "\n";

  ModelFile model;
  model.net = std::move(result.net);
  model.train_config = cfg;
  model.split_ratios = ratios;
  model.split_seed = split_seed;
  model.filter_window = a.filter;
  model.stride = a.stride;
  model.history = std::move(result.history);
  save_model(a.out, model);

  const auto& val = split.validation.empty() ? split.train : split.validation;
  out << "validation report:\n" << eval_report_to_json_text(evaluate(model.net, val, true));
  return kOk;
}

DatasetSplit resplit(const ModelFile& model, const std::string& data) {
  const auto windows = load_windows(data, model.filter_window, model.stride);
  return split_dataset(windows, model.split_ratios, model.split_seed);
}

void check_part(const std::string& part) {
  if (part != "train" && part != "validation" && part != "test" && part != "all") {
    fail(ErrorKind::Usage, "--part must be one of train, validation, test, all");
  }
}

int cmd_evaluate(const EvalArgs& a, std::ostream& out) {
  EvalReport report;
  if (!a.from_matrix.empty()) {
    const auto parts = split_list(a.from_matrix);
    if (parts.size() != 4) fail(ErrorKind::Usage, "--from-matrix expects FF,FM,MF,MM");
    std::array<std::int64_t, 4> counts{};
    for (std::size_t i = 0; i < 4; ++i) {
      const double v = parse_number(parts[i], "--from-matrix");
      if (v != static_cast<double>(static_cast<std::int64_t>(v))) {
        fail(ErrorKind::Usage, "--from-matrix counts must be integers");
      }
      counts[i] = static_cast<std::int64_t>(v);
    }
    report = make_report(matrix_from_counts(counts));
  } else {
    if (a.model.empty() || a.data.empty()) fail(ErrorKind::Usage, "evaluate needs --model and --data (or --from-matrix)");
    check_part(a.part);
    const ModelFile model = load_model(a.model);
    model.net.validate_default_architecture();
    const auto windows = select_part(resplit(model, a.data), a.part);
    require(!windows.empty(), "selected part has no windows");
    report = evaluate(model.net, windows, false);
  }
  const std::string text = eval_report_to_json_text(report);
  if (!a.report.empty()) write_text_file(a.report, text);
  out << text;
  return kOk;
}

int cmd_explain(const ExplainArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<RelevanceMethod> methods;
  for (const auto& token : split_list(a.methods)) {
    const auto m = parse_method_token(token);
    if (!m) fail(ErrorKind::Usage, "--methods: unknown method \"" + token + "\"");
    methods.push_back(*m);
  }
  std::vector<Group> groups;
  for (const auto& token : split_list(a.groups)) {
    const auto g = parse_group_token(token);
    if (!g) fail(ErrorKind::Usage, "--groups: unknown group \"" + token + "\"");
    groups.push_back(*g);
  }
  if (methods.empty() || groups.empty()) fail(ErrorKind::Usage, "--methods and --groups must not be empty");
  check_part(a.part);

  const ModelFile model = load_model(a.model);
  model.net.validate_default_architecture();
  auto windows = select_part(resplit(model, a.data), a.part);
  require(!windows.empty(), "selected part has no windows");
  apply_normalizer_inplace(model.net.norm_stats, windows);

  SubgroupOptions options;
  options.keep_maps = !a.dump_maps.empty();
  options.threads = thread_cap();
  const SubgroupResult result = subgroup_relevance(model.net, windows, methods, groups, options);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";

  write_text_file(a.out, axis_table_to_csv(result.table));
  if (!a.abs_out.empty()) write_text_file(a.abs_out, axis_table_to_csv(result.table, true));
  if (!a.dump_maps.empty()) {
    std::string lines;
    for (const auto& map : result.maps) {
      lines += relevance_map_to_json_line(map);
      lines += '\n';
    }
    write_text_file(a.dump_maps, lines);
  }
  out << axis_table_to_csv(result.table);
  return kOk;
}

int cmd_preprocess(const std::string& data, const std::string& out_path, std::size_t filter, std::size_t stride,
                   std::ostream& out) {
  const auto windows = load_windows(data, filter, stride);
  write_windows_jsonl(out_path, windows);
  out << "wrote " << windows.size() << " windows to " << out_path << "\n";
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return kUsage;
    case ErrorKind::Io: return kIo;
    case ErrorKind::InvalidInput: return kInvalidInput;
    case ErrorKind::Parse:
    case ErrorKind::Format: return kFormat;
  }
  return kInvalidInput;
}

}  // namespace

std::size_t thread_cap() {
  if (const char* env = std::getenv("GAITREL_THREADS")) {
    try {
      return static_cast<std::size_t>(std::stoul(env));
    } catch (const std::exception&) {
      return 0;
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<FeatureWindow> load_windows(const fs::path& data, std::size_t filter_window, std::size_t stride) {
  std::error_code ec;
  if (!fs::exists(data, ec)) fail(ErrorKind::Io, "data not found: " + data.string());
  if (fs::is_regular_file(data, ec)) return read_windows_jsonl(data);
  std::vector<FeatureWindow> windows;
  for (const auto& rec : read_recording_dir(data)) {
    auto w = preprocess_recording(rec, filter_window, kWindowLen, stride);
    windows.insert(windows.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  return windows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gaitrel: gender classification from IMU gait windows with relevance analysis", "gaitrel"};
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate synthetic gait recordings");
  gen_cmd->add_option("--subjects", gen.subjects, "Number of subjects")->required();
  gen_cmd->add_option("--seed", gen.seed, "Dataset seed");
  gen_cmd->add_option("--effect-size", gen.effect_size, "Female amplitude offset on effect channels");
  gen_cmd->add_option("--noise", gen.noise, "Gaussian noise std");
  gen_cmd->add_option("--freq-effect", gen.freq_effect, "Female stride-frequency offset in Hz");
  gen_cmd->add_option("--duration", gen.duration, "Recording duration in seconds");
  gen_cmd->add_option("--effect-channels", gen.effect_channels, "Comma-separated axes carrying the effect");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  std::string pre_data, pre_out;
  std::size_t pre_filter = kDefaultFilterWindow, pre_stride = kWindowLen;
  auto* pre_cmd = app.add_subcommand("preprocess", "Write filtered 600-feature windows as JSONL");
  pre_cmd->add_option("--data", pre_data, "Recording directory")->required();
  pre_cmd->add_option("--out", pre_out, "Output .jsonl")->required();
  pre_cmd->add_option("--filter", pre_filter, "Moving-average window");
  pre_cmd->add_option("--stride", pre_stride, "Window stride in samples");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Preprocess, split, normalize and train the classifier");
  train_cmd->add_option("--data", tr.data, "Recording directory or windows .jsonl")->required();
  train_cmd->add_option("--batch", tr.batch, "Minibatch size");
  train_cmd->add_option("--lr", tr.lr, "Adam learning rate");
  train_cmd->add_option("--max-epochs", tr.max_epochs, "Epoch budget");
  train_cmd->add_option("--patience", tr.patience, "Early-stopping patience in epochs");
  train_cmd->add_option("--split", tr.split, "train,validation,test subject ratios");
  train_cmd->add_option("--seed", tr.seed, "Seed for init, split and shuffling");
  train_cmd->add_option("--filter", tr.filter, "Moving-average window");
  train_cmd->add_option("--stride", tr.stride, "Window stride in samples");
  train_cmd->add_option("--out", tr.out, "Model file")->required();
  train_cmd->add_flag("--quiet", tr.quiet, "Suppress the per-epoch log");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Confusion matrix and macro-F1 of a trained model");
  eval_cmd->add_option("--model", ev.model, "Model file");
  eval_cmd->add_option("--data", ev.data, "Recording directory or windows .jsonl");
  eval_cmd->add_option("--part", ev.part, "train|validation|test|all");
  eval_cmd->add_option("--report", ev.report, "Write the report JSON here");
  eval_cmd->add_option("--from-matrix", ev.from_matrix, "Score a given matrix FF,FM,MF,MM instead");

  ExplainArgs ex;
  auto* explain_cmd = app.add_subcommand("explain", "Per-axis relevance table by group and method");
  explain_cmd->add_option("--model", ex.model, "Model file")->required();
  explain_cmd->add_option("--data", ex.data, "Recording directory or windows .jsonl")->required();
  explain_cmd->add_option("--part", ex.part, "train|validation|test|all");
  explain_cmd->add_option("--methods", ex.methods, "Comma list of gradient,lrp-eps,lrp-a2b1");
  explain_cmd->add_option("--groups", ex.groups, "Comma list of overall,male,female");
  explain_cmd->add_option("--out", ex.out, "Axis table CSV")->required();
  explain_cmd->add_option("--dump-maps", ex.dump_maps, "Per-window relevance maps as JSONL");
  explain_cmd->add_option("--abs-out", ex.abs_out, "Axis table of mean |relevance|");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_data(gen, out);
    if (*pre_cmd) return cmd_preprocess(pre_data, pre_out, pre_filter, pre_stride, out);
    if (*train_cmd) return cmd_train(tr, out);
    if (*eval_cmd) return cmd_evaluate(ev, out);
    if (*explain_cmd) return cmd_explain(ex, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}

}  // namespace gaitrel::cli
