#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tle/gibbs.hpp"
#include "tle/model.hpp"
#include "tle/stats.hpp"

namespace tle {

// ---------------------------------------------------------------- upper tail

enum class TailWeighting {
  /// Every grid point in the window counts equally.
  Uniform,
  /// Weights n p / (1 - p), the inverse binomial variance of -log p.
  InverseVariance,
};

struct TailFitOptions {
  double t_min = 1.5;
  double t_max = 2.5;
  std::size_t points = 11;
  /// Multiplies the window, e.g. lambda^{-k/3} for line k+1.
  double scale = 1.0;
  TailWeighting weighting = TailWeighting::Uniform;
  std::size_t min_exceedances = 50;
  std::size_t min_samples = 100'000;
  /// Effective number of independent samples used for the standard error;
  /// zero means the sample count (independent draws).
  double effective_samples = 0.0;
};

struct TailFit {
  /// Fit of -log P(X > t) = c t^{3/2} through the origin.
  double c_hat = 0.0;
  /// Sampling standard error from the binomial covariance of the empirical
  /// CCDF across the window points.
  double se = 0.0;
  /// Standard error from the regression residuals.
  double residual_se = 0.0;
  double r_squared = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::vector<double> t;
  std::vector<double> neg_log_ccdf;
  std::vector<std::size_t> exceedances;
  std::size_t samples = 0;
};

/// Throws InsufficientDataError below min_samples or when fewer than three
/// window points have min_exceedances exceedances.
TailFit fit_upper_tail(std::span<const double> samples, const TailFitOptions& options = {});

/// Index value meaning k = infinity.
inline constexpr std::size_t kInfiniteLine = std::numeric_limits<std::size_t>::max();

/// c_k = (2 sqrt 2 / 3) sum_{i=0}^k lambda^{-i/2}; closed form for kInfiniteLine.
double tail_coefficient_ck(std::size_t k, double lambda);

// ---------------------------------------------------------------- lower tail

struct LowerTailRow {
  double eps = 0.0;
  std::size_t count = 0;
  std::size_t samples = 0;
  double p = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  /// Exact Ferrari-Spohn value P(Y <= eps) and the bare eps^3 curve.
  double fs_p = 0.0;
  double eps_cubed = 0.0;
};

/// Empirical P(X <= eps) with Clopper-Pearson intervals. When
/// effective_samples is positive the interval uses it in place of the count.
std::vector<LowerTailRow> lower_tail_curve(std::span<const double> samples, std::span<const double> eps,
                                           double confidence = 0.95, double effective_samples = 0.0);

/// Local slope d log P(X <= x) / d log x at eps, from samples of X drawn
/// conditionally on X <= eps e^{h}: the fraction f of them below eps e^{-h}
/// gives slope = -log f / (2h).
struct LocalSlope {
  double eps = 0.0;
  double h = 0.0;
  double fraction = 0.0;
  double fraction_se = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
  double ess = 0.0;
  std::size_t samples = 0;
};

LocalSlope local_log_slope(std::span<const double> conditioned_samples, double eps, double h);

/// The same slope for the Ferrari-Spohn law from its CDF.
double fs_local_log_slope(double eps, double h);

struct ConditionedSlopeParams {
  std::size_t lines = 4;
  double T = 2.0;
  double dt = 0.001;
  TiltParams tilt{1.0, 2.0};
  SweepSchedule schedule;
  double eps = 0.1;
  double h = 0.1;
  std::size_t samples = 10'000;
  std::size_t thinning = 10;
  std::size_t min_burn_in = 2'000;
  std::uint64_t seed = 1;
  std::uint64_t stream_id = 0;
};

/// Runs a zero-boundary chain with the top line at t = 0 constrained below
/// eps e^{h} and returns the local slope at eps.
LocalSlope conditioned_top_line_slope(const ConditionedSlopeParams& params);

// ---------------------------------------------------------------- covariance

struct CovarianceRow {
  double lag = 0.0;
  double cov = 0.0;
  double se = 0.0;
  std::size_t samples = 0;
};

/// cov(X(0), X(t_k)) over configurations: at_zero[r] and at_lag[k][r] come
/// from the same configuration r. Throws PreconditionError when a lag is not
/// below `window`. Standard errors are batch means over configurations, so
/// the rows may be consecutive chain samples.
std::vector<CovarianceRow> covariance_lag(std::span<const double> at_zero,
                                          const std::vector<std::vector<double>>& at_lag,
                                          std::span<const double> lags, double window);

// ---------------------------------------------------------------- confinement

struct ConfinementRow {
  std::size_t k = 0;
  double mean = 0.0;
  double se = 0.0;
  /// lambda^{k/3} * mean.
  double rescaled = 0.0;
  double rescaled_se = 0.0;
  std::vector<double> max_mean;
  std::vector<double> max_se;
};

/// heights[k] are samples of X^{k+1}(0); maxima[k][s] samples of the maximum
/// of X^{k+1} over [-S_s, S_s]. `maxima` may be empty.
std::vector<ConfinementRow> confinement_profile(const std::vector<std::vector<double>>& heights,
                                                const std::vector<std::vector<std::vector<double>>>& maxima,
                                                double lambda);

/// max / min of the rescaled means.
double confinement_spread(const std::vector<ConfinementRow>& rows);

// ---------------------------------------------------------------- scaling

struct ScalingParams {
  std::size_t lines = 3;
  double T = 10.0;
  double dt = 0.1;
  double a = 1.0;
  double lambda = 2.0;
  SweepSchedule schedule;
  std::size_t samples = 10'000;
  std::size_t thinning = 100;
  std::size_t min_burn_in = 5'000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct ScalingReport {
  stats::KsResult ks;
  /// Same comparison with lambda^{-1/2} in place of lambda^{-1/3}.
  stats::KsResult control;
  double mean_direct = 0.0;
  double mean_mapped = 0.0;
  std::size_t samples = 0;
};

/// Compares X^1(0) under tilt (a lambda, lambda) on [-T, T] with lambda^{-1/3}
/// X^1(0) under tilt (a, lambda) on [-lambda^{2/3} T, lambda^{2/3} T]. The
/// second grid uses dt lambda^{2/3}, so the identity is exact on the lattice.
ScalingReport scaling_check(const ScalingParams& params);

// ---------------------------------------------------------------- pinning

struct PinningRow {
  std::size_t k = 0;
  std::size_t count = 0;
  std::size_t samples = 0;
  double p = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct PinningResult {
  bool found = false;
  /// Smallest 1-based line index with P(max X^k <= eps) >= 1 - eps.
  std::size_t k = 0;
  double best_p = 0.0;
  std::vector<PinningRow> rows;
};

/// maxima[k] are samples of the maximum of line k+1 over the window.
PinningResult pinning_check(const std::vector<std::vector<double>>& maxima, double eps);

// ---------------------------------------------------------------- free vs zero

struct FreeZeroParams {
  std::size_t lines = 2;
  std::vector<double> T{10.0, 40.0};
  double dt = 0.1;
  TiltParams tilt{1.0, 2.0};
  std::size_t samples = 20'000;
  std::size_t thinning = 5;
  std::size_t burn_in = 5'000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct FreeZeroRow {
  double T = 0.0;
  /// Mean of X_free^i(0) - X_zero^i(0) over a heat-bath grand coupling of the
  /// two chains, for the top two lines (line 2 is zero when n = 1).
  double gap1 = 0.0;
  double se1 = 0.0;
  double gap2 = 0.0;
  double se2 = 0.0;
  /// Two-sample KS statistic between the two marginals of X^1(0).
  double ks1 = 0.0;
  double mean_free = 0.0;
  double mean_zero = 0.0;
  /// Smallest coupled difference seen; the coupling keeps it >= 0.
  double min_diff = 0.0;
  std::uint64_t rounding_snaps = 0;
  bool certificate = true;
};

std::vector<FreeZeroRow> free_vs_zero_convergence(const FreeZeroParams& params);

/// One-sided comparison a < b with combined standard error at the given
/// confidence: (b - a) > z * sqrt(se_a^2 + se_b^2).
bool significantly_less(double a, double se_a, double b, double se_b, double confidence = 0.95);

}  // namespace tle
