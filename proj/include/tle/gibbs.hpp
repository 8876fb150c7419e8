#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tle/model.hpp"
#include "tle/rng.hpp"

namespace tle {

/// Block of the top `depth` lines on grid indices (j_a, j_b); the values at
/// j_a, j_b and the line below the block are conditioning data.
struct BlockSpec {
  std::size_t depth = 1;
  std::size_t j_a = 0;
  std::size_t j_b = 2;
};

struct SweepSchedule {
  /// Block proposals per sweep. Zero disables block moves.
  std::size_t blocks_per_sweep = 1;
  /// Deepest block drawn; depth is uniform on 1..max_block_depth (capped at n).
  std::size_t max_block_depth = 1;
  /// Window lengths are log-uniform on [min_window, max(min_window, m / 4)].
  std::size_t min_window = 4;
  /// Random-walk step of the free-boundary endpoint proposals.
  double sigma_prop = 0.1;
  /// Endpoint proposals per side per sweep (free boundary only).
  std::size_t endpoint_moves = 1;
};

struct MoveStats {
  std::uint64_t block_proposed = 0;
  std::uint64_t block_accepted = 0;
  std::uint64_t endpoint_proposed = 0;
  std::uint64_t endpoint_accepted = 0;

  double block_rate() const {
    return block_proposed ? static_cast<double>(block_accepted) / static_cast<double>(block_proposed) : 0.0;
  }
  double endpoint_rate() const {
    return endpoint_proposed ? static_cast<double>(endpoint_accepted) / static_cast<double>(endpoint_proposed)
                             : 0.0;
  }
};

struct ChainConfig {
  std::size_t lines = 1;
  GridInterval grid{0.0, 1.0, 1};
  TiltParams tilt{1.0, 2.0};
  BoundarySpec boundary;
  SweepSchedule schedule;

  /// Starting state; its floor, ceiling, pins and site constraints define the
  /// target. When absent a feasible state is built from the fields above.
  std::optional<EnsembleState> initial;

  /// Fixed burn-in; when absent, burn-in is 10 x the integrated
  /// autocorrelation time of the top line at mid-grid, at least min_burn_in.
  std::optional<std::size_t> burn_in;
  std::size_t min_burn_in = 10'000;
  std::size_t samples = 0;
  std::size_t thinning = 1;

  std::uint64_t seed = 1;
  std::uint64_t stream_id = 0;

  /// Writes a checkpoint every `checkpoint_every` sweeps when non-zero.
  std::size_t checkpoint_every = 0;
  std::filesystem::path checkpoint_path;
  /// Continue from checkpoint_path if it exists.
  bool resume = false;
};

struct Observable {
  std::string name;
  std::function<double(const EnsembleState&)> eval;
};

Observable observe_height(std::size_t line, double t, const GridInterval& grid);
Observable observe_height_at_index(std::size_t line, std::size_t j);
/// Maximum of a line over grid points with time in [t0, t1].
Observable observe_max(std::size_t line, double t0, double t1, const GridInterval& grid);

struct ChainMetadata {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::size_t burn_in = 0;
  std::size_t thinning = 1;
  std::size_t sweeps = 0;
  double burn_in_iat = 0.0;
  MoveStats moves;
};

struct SampleSet {
  std::vector<std::string> names;
  /// Row-major: one row per recorded sweep, one column per observable.
  std::vector<double> values;
  ChainMetadata meta;
  std::optional<EnsembleState> final_state;

  std::size_t rows() const { return names.empty() ? 0 : values.size() / names.size(); }
  std::vector<double> column(std::size_t k) const;
  std::vector<double> column(const std::string& name) const;
};

/// New value for height(line, j) drawn from its exact full conditional by
/// inverse CDF at level u. The state is not modified. Handles interior points
/// and free-boundary endpoint columns.
double heat_bath_value(const EnsembleState& state, std::size_t line, std::size_t j, double u);

/// Single-site heat-bath update with a fresh uniform from rng.
void heat_bath_point(EnsembleState& state, std::size_t line, std::size_t j, RngStream& rng);

/// One pass of heat-bath updates over every line and every non-fixed interior
/// point. The uniform for (line, j) is rng.uniform_at(sweep, line, j).
/// Free-boundary endpoints are included when `include_free_endpoints` is set.
void heat_bath_sweep(EnsembleState& state, const RngStream& rng, std::uint64_t sweep,
                     bool include_free_endpoints = false);

/// Metropolis move proposing independent Brownian bridges for the block and
/// accepting with the tilt ratio when the proposal respects every constraint.
/// Returns whether the proposal was accepted.
bool resample_block(EnsembleState& state, const BlockSpec& block, RngStream& rng);

enum class Side { Left, Right };

/// Metropolis random-walk update of a free boundary column.
bool free_endpoint_move(EnsembleState& state, Side side, double sigma_prop, RngStream& rng);

/// Heat-bath pass, scheduled block moves, then endpoint moves for free
/// boundaries. Deterministic in (rng identity, sweep).
void gibbs_sweep(EnsembleState& state, const SweepSchedule& schedule, const RngStream& rng,
                 std::uint64_t sweep, MoveStats& stats);

/// Runs burn-in and records `samples` rows every `thinning` sweeps.
SampleSet run_chain(const ChainConfig& config, const std::vector<Observable>& observables);

/// Runs independent chains on up to `threads` worker threads; output order
/// follows input order and does not depend on the thread count.
std::vector<SampleSet> run_chains(const std::vector<ChainConfig>& configs,
                                  const std::vector<Observable>& observables, std::size_t threads);

/// Equilibrates a state in place with `sweeps` Gibbs sweeps.
void equilibrate(EnsembleState& state, const SweepSchedule& schedule, const RngStream& rng, std::size_t sweeps,
                 MoveStats* stats = nullptr, std::uint64_t first_sweep = 0);

}  // namespace tle
