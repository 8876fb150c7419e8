#pragma once

namespace tle {

double norm_pdf(double z);
double norm_cdf(double z);
/// Upper tail 1 - Phi(z), accurate for large z.
double norm_ccdf(double z);
/// log Phi(z), accurate for z -> -infinity.
double log_norm_cdf(double z);

/// Inverse of Phi on (0, 1) (Wichura's AS241, ~1e-16 relative accuracy).
double norm_quantile(double p);
/// Inverse of log Phi; handles arguments far below log(DBL_MIN).
double norm_quantile_from_log(double log_p);

/// Quantile at level u of the standard normal restricted to (alpha, beta).
/// Monotone non-decreasing in u, alpha and beta. Result lies strictly inside
/// the interval.
double truncated_std_normal_quantile(double alpha, double beta, double u);

/// Quantile at level u of N(mean, sd^2) restricted to the open interval
/// (lower, upper); either bound may be infinite. Throws InvariantViolation if
/// the interval is empty.
double truncated_normal_quantile(double mean, double sd, double lower, double upper, double u);

}  // namespace tle
