#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "tle/config.hpp"

namespace tle {

struct RunOptions {
  /// Worker threads; changes scheduling only, never the output.
  std::size_t threads = 1;
  /// Continue chain experiments from output_dir/checkpoint.bin.
  bool resume = false;
};

struct RunSummary {
  std::filesystem::path dir;
  std::vector<std::string> files;
};

/// Runs the configured experiment and writes results.csv and params.json
/// (config, seed, build id, summary numbers) into config.output_dir.
RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Prints the summary of a finished run with PASS/FAIL lines where the
/// experiment has a target. Returns false when any verdict failed. Throws
/// ConfigError listing the expected files when they are missing.
bool report_experiment(const std::filesystem::path& dir, std::ostream& out);

/// Short identifier of the source revision the binary was built from.
std::string build_id();

}  // namespace tle
