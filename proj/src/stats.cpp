#include "tle/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "tle/errors.hpp"
#include "tle/normal.hpp"

namespace tle::stats {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double integrated_autocorr_time(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 16) return 1.0;
  const double m = mean(x);
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = x[k] - m;
  double c0 = 0.0;
  for (double v : d) c0 += v * v;
  if (c0 <= 0.0) return 1.0;
  double tau = 1.0;
  const std::size_t max_lag = n / 2;
  for (std::size_t t = 1; t < max_lag; ++t) {
    double c = 0.0;
    for (std::size_t k = 0; k + t < n; ++k) c += d[k] * d[k + t];
    tau += 2.0 * c / c0;
    if (static_cast<double>(t) >= 5.0 * tau) break;
  }
  return std::max(tau, 1.0);
}

double batch_means_se(std::span<const double> x, std::size_t batches) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  batches = std::min(batches, n);
  if (batches < 2) return std::sqrt(variance(x) / static_cast<double>(n));
  const std::size_t len = n / batches;
  std::vector<double> bm(batches);
  for (std::size_t b = 0; b < batches; ++b) bm[b] = mean(x.subspan(b * len, len));
  return std::sqrt(variance(bm) / static_cast<double>(batches));
}

double effective_sample_size(std::span<const double> x, std::size_t batches) {
  const double v = variance(x);
  const double se = batch_means_se(x, batches);
  if (v <= 0.0 || se <= 0.0) return static_cast<double>(x.size());
  return std::min(static_cast<double>(x.size()), v / (se * se));
}

double geweke_z(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 100) throw InsufficientDataError("Geweke diagnostic needs at least 100 values");
  const auto head = x.subspan(0, n / 10);
  const auto tail = x.subspan(n / 2);
  const double sa = batch_means_se(head, 20);
  const double sb = batch_means_se(tail, 20);
  const double denom = std::sqrt(sa * sa + sb * sb);
  if (denom == 0.0) return 0.0;
  return (mean(head) - mean(tail)) / denom;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.0) {
    // Jacobi theta form converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      s += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

namespace {

double ks_pvalue(double d, double effective_n) {
  const double en = std::sqrt(effective_n);
  return kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InsufficientDataError("KS test needs non-empty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_pvalue(d, na * nb / (na + nb))};
}

KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw InsufficientDataError("KS test needs a non-empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double f = cdf(x[k]);
    d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return {d, ks_pvalue(d, n)};
}

Interval clopper_pearson(double k, double n, double confidence) {
  if (!(n > 0.0) || k < 0.0 || k > n) throw DomainError("invalid binomial counts");
  const double alpha = 1.0 - confidence;
  const double lo = k > 0.0 ? boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0) : 0.0;
  const double hi = k < n ? boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0) : 1.0;
  return {lo, hi};
}

LinearFit linear_regression(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw InsufficientDataError("regression needs >= 3 points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - fit.intercept - fit.slope * x[k];
    ssr += r * r;
  }
  fit.slope_se = std::sqrt(ssr / static_cast<double>(x.size() - 2) / sxx);
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return fit;
}

LinearFit regression_through_origin(std::span<const double> x, std::span<const double> y,
                                    std::span<const double> weights) {
  if (x.size() != y.size() || x.size() < 2) throw InsufficientDataError("regression needs >= 2 points");
  if (!weights.empty() && weights.size() != x.size()) throw DimensionError("weights do not match data");
  auto w = [&](std::size_t k) { return weights.empty() ? 1.0 : weights[k]; };
  double sxx = 0.0, sxy = 0.0, sw = 0.0, swy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += w(k) * x[k] * x[k];
    sxy += w(k) * x[k] * y[k];
    sw += w(k);
    swy += w(k) * y[k];
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  const double ybar = swy / sw;
  double ssr = 0.0, sst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - fit.slope * x[k];
    ssr += w(k) * r * r;
    sst += w(k) * (y[k] - ybar) * (y[k] - ybar);
  }
  fit.slope_se = std::sqrt(ssr / static_cast<double>(x.size() - 1) / sxx);
  fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
  return fit;
}

double z_quantile(double p) { return norm_quantile(p); }

}  // namespace tle::stats
