#pragma once

// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stc/curriculum.hpp"
#include "stc/metrics.hpp"
#include "stc/synthesis.hpp"
#include "stc/trajectory.hpp"

namespace stc::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFindings = 1;  ///< validation / verification failures found
inline constexpr int kInputError = 2;  ///< input, schema, IO and usage errors
inline constexpr int kEndpointError = 3;

/// Run settings. Loaded from a JSON file whose relative paths resolve against
/// the file's directory; command-line flags override file values.
struct Config {
  std::optional<std::filesystem::path> corpus_dir;
  std::optional<std::filesystem::path> output_dir;
  int epochs = 5;
  Strategy strategy = Strategy::ours;
  std::optional<std::uint64_t> seed;
  Budgets budgets;
  std::optional<std::filesystem::path> error_pattern_file;
  std::optional<EndpointConfig> endpoint;
  int min_successful = kDefaultMinSuccessful;
};

Config load_config(const std::filesystem::path& path);

struct CorpusEntry {
  std::filesystem::path file;
  Trajectory trajectory;
  std::vector<Violation> warnings;
};

/// A single `.json` file or every `*.json` file of a directory in name order.
/// Empty task ids default to the file stem.
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stc::cli
