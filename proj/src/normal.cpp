#include "tle/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tle/errors.hpp"

namespace tle {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double poly(const double* c, int n, double x) {
  double r = c[n - 1];
  for (int k = n - 2; k >= 0; --k) r = r * x + c[k];
  return r;
}

}  // namespace

double norm_pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double norm_ccdf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

double log_norm_cdf(double z) {
  if (z > -5.0) {
    return z > 0.0 ? std::log1p(-norm_ccdf(z)) : std::log(norm_cdf(z));
  }
  if (z > -37.0) return std::log(norm_cdf(z));
  if (z == -std::numeric_limits<double>::infinity()) return z;
  // Asymptotic expansion of the Mills ratio.
  const double w = 1.0 / (z * z);
  const double series = 1.0 - w * (1.0 - w * (3.0 - w * (15.0 - w * 105.0)));
  return -0.5 * z * z - std::log(-z) - kLogSqrt2Pi + std::log(series);
}

double norm_quantile(double p) {
  static constexpr double a[8] = {3.387132872796366608,   133.14166789178437745, 1971.5909503065514427,
                                  13731.693765509461125,  45921.953931549871457, 67265.770927008700853,
                                  33430.575583588128105,  2509.0809287301226727};
  static constexpr double b[8] = {1.0,                   42.313330701600911252, 687.1870074920579083,
                                  5394.1960214247511077, 21213.794301586595867, 39307.89580009271061,
                                  28729.085735721942674, 5226.495278852545925};
  static constexpr double c[8] = {1.42343711074968357734,  4.6303378461565452959,   5.7694972214606914055,
                                  3.64784832476320460504,  1.27045825245236838258,  0.24178072517745061177,
                                  0.0227238449892691845833, 7.7454501427834140764e-4};
  static constexpr double d[8] = {1.0,
                                  2.05319162663775882187,
                                  1.6763848301838038494,
                                  0.68976733498510000455,
                                  0.14810397642748007459,
                                  0.0151986665636164571966,
                                  5.475938084995344946e-4,
                                  1.05075007164441684324e-9};
  static constexpr double e[8] = {6.6579046435011037772,    5.4637849111641143699,   1.7848265399172913358,
                                  0.29656057182850489123,   0.026532189526576123093, 0.0012426609473880784386,
                                  2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[8] = {1.0,
                                  0.59983220655588793769,
                                  0.13692988092273580531,
                                  0.0148753612908506148525,
                                  7.868691311456132591e-4,
                                  1.8463183175100546818e-5,
                                  1.4215117583164458887e-7,
                                  2.04426310338993978564e-15};

  if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
  if (!(p < 1.0)) return std::numeric_limits<double>::infinity();

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * poly(a, 8, r) / poly(b, 8, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = poly(c, 8, r) / poly(d, 8, r);
  } else {
    r -= 5.0;
    val = poly(e, 8, r) / poly(f, 8, r);
  }
  return q < 0.0 ? -val : val;
}

double norm_quantile_from_log(double log_p) {
  if (log_p >= 0.0) return std::numeric_limits<double>::infinity();
  if (log_p > -700.0) return norm_quantile(std::exp(log_p));
  // Newton iteration on log Phi; d/dz log Phi(z) ~ -z for very negative z.
  double z = -std::sqrt(-2.0 * log_p - std::log(-4.0 * std::numbers::pi * log_p));
  for (int it = 0; it < 8; ++it) {
    const double g = log_norm_cdf(z);
    const double slope = std::exp(-0.5 * z * z - kLogSqrt2Pi - g);
    const double step = (g - log_p) / slope;
    z -= step;
    if (std::abs(step) < 1e-15 * std::abs(z)) break;
  }
  return z;
}

double truncated_std_normal_quantile(double alpha, double beta, double u) {
  if (alpha > 0.0) return -truncated_std_normal_quantile(-beta, -alpha, 1.0 - u);

  double z;
  if (alpha < -8.3 && beta > 8.3) {
    z = norm_quantile(u);
  } else if (beta >= 0.0) {
    const double pa = norm_cdf(alpha);
    const double mass = norm_cdf(beta) - pa;
    const double p = pa + u * mass;
    if (p <= 0.5) {
      z = norm_quantile(p);
    } else {
      z = -norm_quantile(norm_ccdf(beta) + (1.0 - u) * mass);
    }
  } else {
    // Entire interval in the lower tail: work with log probabilities.
    const double la = log_norm_cdf(alpha);
    const double lb = log_norm_cdf(beta);
    const double ratio = std::exp(la - lb);
    z = norm_quantile_from_log(lb + std::log(ratio + u * (1.0 - ratio)));
  }
  if (!(z > alpha)) z = std::nextafter(alpha, beta);
  if (!(z < beta)) z = std::nextafter(beta, alpha);
  return z;
}

double truncated_normal_quantile(double mean, double sd, double lower, double upper, double u) {
  if (!(lower < upper)) {
    std::ostringstream msg;
    msg << "empty truncation interval (" << lower << ", " << upper << ")";
    throw InvariantViolation(msg.str());
  }
  const double z = truncated_std_normal_quantile((lower - mean) / sd, (upper - mean) / sd, u);
  double x = mean + sd * z;
  if (!(x > lower)) x = std::nextafter(lower, upper);
  if (!(x < upper)) x = std::nextafter(upper, lower);
  if (!(x > lower)) x = 0.5 * (lower + upper);
  return x;
}

}  // namespace tle
