#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tle::stats {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);

/// Integrated autocorrelation time with Sokal's automatic window (c = 5).
/// Returns 1 for series too short to estimate.
double integrated_autocorr_time(std::span<const double> x);

/// Standard error of the mean from non-overlapping batch means.
double batch_means_se(std::span<const double> x, std::size_t batches = 50);

/// Effective sample size n / tau with tau from batch means.
double effective_sample_size(std::span<const double> x, std::size_t batches = 50);

/// Geweke diagnostic: z-score comparing the first 10% and last 50% means,
/// each with a batch-means standard error.
double geweke_z(std::span<const double> x);

struct KsResult {
  double statistic;
  double p_value;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = P(K > lambda).
double kolmogorov_survival(double lambda);

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

struct Interval {
  double lo;
  double hi;
};

/// Exact two-sided Clopper-Pearson interval for k successes in n trials.
/// `n` may be fractional (effective sample size), in which case k is too.
Interval clopper_pearson(double k, double n, double confidence = 0.95);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit linear_regression(std::span<const double> x, std::span<const double> y);

/// Least squares through the origin, y = slope * x, with optional weights.
/// r_squared is computed against the centred total sum of squares.
LinearFit regression_through_origin(std::span<const double> x, std::span<const double> y,
                                    std::span<const double> weights = {});

/// Standard normal quantile helper for confidence levels, e.g. 0.975 -> 1.96.
double z_quantile(double p);

}  // namespace tle::stats
