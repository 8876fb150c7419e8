#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tle/model.hpp"

namespace tle {

enum class ExperimentKind {
  Sample,
  UpperTail,
  LowerTail,
  Confinement,
  Covariance,
  Scaling,
  Couple,
  FsReference,
  FreeVsZero,
  PinnedExceedance,
};

std::string to_string(ExperimentKind kind);
/// Throws ConfigError for unknown names.
ExperimentKind parse_experiment_kind(const std::string& name);

/// Where the upper- and lower-tail experiments take their samples from.
enum class SampleSource { Chain, Fs };

/// Flat key = value file, one key per line, '#' starts a comment. Lists are
/// comma-separated. Every key is optional; see README for the schema.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::FsReference;

  // model
  std::size_t n = 1;
  double T = 10.0;
  double dt = 0.05;
  double a = 1.0;
  double lambda = 2.0;
  BoundaryKind boundary = BoundaryKind::Zero;
  SampleSource source = SampleSource::Chain;

  // chain; burn_in = 0 selects the adaptive rule
  std::size_t samples = 10'000;
  std::size_t thinning = 10;
  std::size_t burn_in = 0;
  std::size_t min_burn_in = 10'000;
  std::size_t blocks_per_sweep = 16;
  std::size_t max_block_depth = 2;
  std::size_t min_window = 4;
  double sigma_prop = 0.1;
  std::size_t checkpoint_every = 0;

  // experiment-specific
  std::vector<double> eps{0.1, 0.2, 0.4};
  std::vector<double> T_list{10.0, 40.0};
  double u = 1.0;
  std::size_t trials = 200;
  std::vector<double> lags{1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<double> windows{0.5, 1.0, 2.0};
  std::vector<double> v{1.0, 2.0};
  std::size_t equilibration_sweeps = 4'000;
  std::size_t coupled_sweeps = 2'000;

  std::string output_dir = "out";
  std::uint64_t seed = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError naming the line and key on malformed input, unknown or
/// repeated keys, and on values that fail validate().
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key, in schema order; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Throws ConfigError on inconsistent values.
void validate(const ExperimentConfig& config);

/// The keys the parser accepts, in schema order.
std::vector<std::string> config_keys();

}  // namespace tle
