#pragma once

// The gaitrel command-line pipeline: gen-data, preprocess, train, evaluate, explain.
// Exit codes: 0 success, 1 usage, 2 I/O, 3 invalid input, 4 format/parse.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gaitrel/signal.hpp"

namespace gaitrel::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kInvalidInput = 3, kFormat = 4 };

/// `args` excludes the program name, e.g. {"train", "--data", "d/", ...}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Windows from a recording directory (filtered and segmented) or from a
/// windowed .jsonl file (used as is).
std::vector<FeatureWindow> load_windows(const std::filesystem::path& data, std::size_t filter_window,
                                        std::size_t stride);

/// Worker cap from GAITREL_THREADS; hardware concurrency when unset.
std::size_t thread_cap();

}  // namespace gaitrel::cli
