#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "tle/gibbs.hpp"
#include "tle/model.hpp"
#include "tle/rng.hpp"

namespace tle {

/// Two ensembles on the same grid and tilt driven by shared uniforms.
struct CoupledPair {
  EnsembleState low;
  EnsembleState high;
  RngStream rng;
  std::uint64_t sweep = 0;
  /// Result of the last order check: low <= high on every line and point.
  bool order_certificate = false;
  /// Number of sweeps after which the check failed.
  std::uint64_t falsified_sweeps = 0;
  /// Site updates where the two inverse CDFs came out in the wrong order by a
  /// rounding-level amount and low was snapped down to high's value.
  std::uint64_t rounding_snaps = 0;
  double max_snap = 0.0;

  CoupledPair(EnsembleState low, EnsembleState high, RngStream rng);
};

/// One heat-bath sweep of both states, site by site in the same order, using
/// rng.uniform_at(sweep, line, j) for both. Free-boundary endpoint columns are
/// updated too. Re-verifies the order afterwards.
void monotone_coupled_sweep(CoupledPair& pair);

/// Replaces (low, high) by (min, max) line-wise and point-wise on the columns
/// both states are allowed to move. Each result is feasible for its own
/// constraints when the fixed columns are already ordered.
void order_pair(CoupledPair& pair);

struct StoppingDomain {
  std::size_t tau_ell = 0;
  std::size_t tau_r = 0;
  double u = 0.0;
  bool found = false;
};

/// First and last interior grid index where the bottom line is >= u.
StoppingDomain detect_stopping_domain(const EnsembleState& zero_state, double u);

struct ReverseCouplingParams {
  std::size_t lines = 2;
  double T = 10.0;
  double dt = 0.1;
  double u = 1.0;
  TiltParams tilt{1.0, 2.0};
  SweepSchedule schedule;
  /// Sweeps used to equilibrate each independent sample.
  std::size_t equilibration_sweeps = 4000;
  /// Coupled sweeps inside the stopping domain.
  std::size_t coupled_sweeps = 2000;
};

struct ReverseCouplingTrial {
  std::size_t trial_id = 0;
  StoppingDomain domain;
  bool event_a = false;
  bool event_b = false;
  /// B occurred and X <= Y on [-T/2, T/2] after the coupled resampling.
  bool success = false;
  EnsembleState free_sample;
  EnsembleState zero_sample;
};

/// One trial of the reverse coupling. The trial's randomness is
/// rng.substream(trial_id).
ReverseCouplingTrial reverse_coupling_experiment(const ReverseCouplingParams& params, const RngStream& rng,
                                                 std::size_t trial_id);

/// CSV row trial_id,T,n,u,found,success.
void write_coupling_csv_header(std::ostream& out);
void write_coupling_csv_row(std::ostream& out, const ReverseCouplingParams& params,
                            const ReverseCouplingTrial& trial);

struct PinnedParams {
  std::size_t lines = 2;
  double T = 4.0;
  double dt = 0.05;
  double pin_spacing = 2.0;
  TiltParams tilt{1.0, 2.0};
  SweepSchedule schedule;
  std::size_t equilibration_sweeps = 3000;
  std::size_t threads = 1;
};

/// Zero-boundary ensemble on [-T, T] pinned to zero at -T + k * pin_spacing.
/// Blocks between pins are independent and sampled separately; the returned
/// state has the pin columns marked.
EnsembleState pinned_ensemble_sample(const PinnedParams& params, const RngStream& rng);

/// The empty pinned state (all pins at zero) on the grid of `params`.
EnsembleState pinned_template(const PinnedParams& params);

struct ExceedanceParams {
  /// Number of lines k of the zero-boundary ensemble on [-1, 1].
  std::size_t lines = 1;
  double v = 1.0;
  double dt = 0.02;
  TiltParams tilt{1.0, 2.0};
  SweepSchedule schedule;
  /// Recorded samples per ladder stage.
  std::size_t samples = 10'000;
  std::size_t thinning = 5;
  std::size_t min_burn_in = 2'000;
  /// Conditional probability aimed for at each intermediate stage.
  double stage_fraction = 0.3;
  std::size_t max_stages = 40;
  std::uint64_t seed = 1;
  /// Stage j uses chain stream stream_base * 1000 + j.
  std::uint64_t stream_base = 0;
};

struct ExceedanceEstimate {
  double p = 0.0;
  double log_p = 0.0;
  double log_se = 0.0;
  /// 95% interval from the log-scale standard error.
  double lo = 0.0;
  double hi = 0.0;
  /// Levels l_0 = 0 < l_1 < ... < l_m = v of the score
  /// min_i lambda^{(i-1)/3} X^i(0), and the estimated conditional fraction
  /// P(score >= l_{j+1} | score >= l_j) for each stage.
  std::vector<double> levels;
  std::vector<double> fractions;
  std::vector<double> fraction_se;
};

/// P(X^i(0) >= v lambda^{-(i-1)/3} for i = 1..k) under the k-line zero-boundary
/// ensemble on [-1, 1]. Small probabilities are reached by a ladder of chains,
/// each conditioned on the previous level through site constraints at t = 0.
/// The next level is the stage_fraction upper quantile of the score over the
/// first fifth of a stage's samples; the fraction is estimated from the rest.
ExceedanceEstimate estimate_pinned_exceedance(const ExceedanceParams& params);

}  // namespace tle
