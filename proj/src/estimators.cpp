#include "tle/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tle/coupling.hpp"
#include "tle/errors.hpp"
#include "tle/fs.hpp"
#include "tle/parallel.hpp"

namespace tle {

namespace {

const double kTwoRootTwoThirds = 2.0 * std::sqrt(2.0) / 3.0;

std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return s;
}

std::size_t count_above(const std::vector<double>& sorted, double t) {
  return static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t));
}

std::size_t count_at_most(const std::vector<double>& sorted, double t) {
  return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
}

}  // namespace

TailFit fit_upper_tail(std::span<const double> samples, const TailFitOptions& o) {
  if (!(o.t_min < o.t_max) || o.points < 2 || !(o.scale > 0.0)) {
    throw PreconditionError("tail window needs t_min < t_max, two or more points and a positive scale");
  }
  const std::size_t n = samples.size();
  if (n < o.min_samples) throw InsufficientDataError("upper-tail fit needs more samples");
  const double n_eff = o.effective_samples > 0.0 ? o.effective_samples : static_cast<double>(n);
  const auto sorted = sorted_copy(samples);

  TailFit fit;
  fit.samples = n;
  fit.t_min = o.scale * o.t_min;
  fit.t_max = o.scale * o.t_max;
  std::vector<double> x, p;
  for (std::size_t k = 0; k < o.points; ++k) {
    const double t = fit.t_min + (fit.t_max - fit.t_min) * static_cast<double>(k) / static_cast<double>(o.points - 1);
    const std::size_t c = count_above(sorted, t);
    if (c < o.min_exceedances) continue;
    const double pk = static_cast<double>(c) / static_cast<double>(n);
    fit.t.push_back(t);
    fit.exceedances.push_back(c);
    fit.neg_log_ccdf.push_back(-std::log(pk));
    x.push_back(t * std::sqrt(t));
    p.push_back(pk);
  }
  if (x.size() < 3) throw InsufficientDataError("fewer than three window points have enough exceedances");

  std::vector<double> w(x.size(), 1.0);
  if (o.weighting == TailWeighting::InverseVariance) {
    for (std::size_t k = 0; k < x.size(); ++k) w[k] = n_eff * p[k] / (1.0 - p[k]);
  }
  const auto lf = stats::regression_through_origin(x, fit.neg_log_ccdf, w);
  fit.c_hat = lf.slope;
  fit.residual_se = lf.slope_se;
  fit.r_squared = lf.r_squared;

  // c_hat is linear in y; -log p at t_k and t_l (t_k <= t_l) have covariance
  // (1 - p_k) / (n p_k) for independent draws.
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) sxx += w[k] * x[k] * x[k];
  double var = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (std::size_t l = 0; l < x.size(); ++l) {
      const double pk = p[std::min(k, l)];
      var += (w[k] * x[k]) * (w[l] * x[l]) * (1.0 - pk) / (n_eff * pk);
    }
  }
  fit.se = std::sqrt(var) / sxx;
  return fit;
}

double tail_coefficient_ck(std::size_t k, double lambda) {
  if (!(lambda > 1.0)) throw DomainError("lambda must exceed 1");
  const double r = std::sqrt(lambda);
  if (k == kInfiniteLine) return kTwoRootTwoThirds * r / (r - 1.0);
  double sum = 0.0, term = 1.0;
  for (std::size_t i = 0; i <= k; ++i) {
    sum += term;
    term /= r;
  }
  return kTwoRootTwoThirds * sum;
}

std::vector<LowerTailRow> lower_tail_curve(std::span<const double> samples, std::span<const double> eps,
                                           double confidence, double effective_samples) {
  const auto sorted = sorted_copy(samples);
  const double n = static_cast<double>(sorted.size());
  const double n_ci = effective_samples > 0.0 ? effective_samples : n;
  std::vector<LowerTailRow> rows;
  for (double e : eps) {
    if (!(e > 0.0)) throw DomainError("lower-tail levels must be positive");
    LowerTailRow r;
    r.eps = e;
    r.count = count_at_most(sorted, e);
    r.samples = sorted.size();
    r.p = n > 0 ? static_cast<double>(r.count) / n : 0.0;
    if (n > 0) {
      const auto ci = stats::clopper_pearson(r.p * n_ci, n_ci, confidence);
      r.lo = ci.lo;
      r.hi = ci.hi;
    }
    r.fs_p = fs_lower_tail(e);
    r.eps_cubed = e * e * e;
    rows.push_back(r);
  }
  return rows;
}

LocalSlope local_log_slope(std::span<const double> conditioned_samples, double eps, double h) {
  if (!(eps > 0.0) || !(h > 0.0)) throw DomainError("eps and h must be positive");
  LocalSlope s;
  s.eps = eps;
  s.h = h;
  s.samples = conditioned_samples.size();
  if (s.samples < 2) throw InsufficientDataError("local slope needs samples");
  const double cut = eps * std::exp(-h);
  std::vector<double> ind(s.samples);
  for (std::size_t k = 0; k < s.samples; ++k) ind[k] = conditioned_samples[k] <= cut ? 1.0 : 0.0;
  s.fraction = stats::mean(ind);
  s.fraction_se = stats::batch_means_se(ind);
  s.ess = stats::effective_sample_size(ind);
  if (s.fraction <= 0.0) {
    s.slope = std::numeric_limits<double>::infinity();
    s.slope_se = std::numeric_limits<double>::infinity();
  } else {
    s.slope = -std::log(s.fraction) / (2.0 * h);
    s.slope_se = s.fraction_se / (s.fraction * 2.0 * h);
  }
  return s;
}

double fs_local_log_slope(double eps, double h) {
  return (std::log(fs_cdf(eps * std::exp(h))) - std::log(fs_cdf(eps * std::exp(-h)))) / (2.0 * h);
}

LocalSlope conditioned_top_line_slope(const ConditionedSlopeParams& p) {
  const GridInterval grid = GridInterval::with_spacing(-p.T, p.T, p.dt);
  EnsembleState state(grid, p.lines, p.tilt, BoundarySpec::zero());
  const std::size_t mid = grid.nearest_index(0.0);
  state.constrain_site(0, mid, -std::numeric_limits<double>::infinity(), p.eps * std::exp(p.h));
  fill_feasible_heights(state);

  ChainConfig cfg;
  cfg.lines = p.lines;
  cfg.grid = grid;
  cfg.tilt = p.tilt;
  cfg.boundary = BoundarySpec::zero();
  cfg.schedule = p.schedule;
  cfg.initial = state;
  cfg.min_burn_in = p.min_burn_in;
  cfg.samples = p.samples;
  cfg.thinning = p.thinning;
  cfg.seed = p.seed;
  cfg.stream_id = p.stream_id;
  const auto set = run_chain(cfg, {observe_height_at_index(0, mid)});
  return local_log_slope(set.column(0), p.eps, p.h);
}

std::vector<CovarianceRow> covariance_lag(std::span<const double> at_zero,
                                          const std::vector<std::vector<double>>& at_lag,
                                          std::span<const double> lags, double window) {
  if (at_lag.size() != lags.size()) throw DimensionError("one sample column per lag");
  const std::size_t n = at_zero.size();
  if (n < 2) throw InsufficientDataError("covariance needs at least two configurations");
  const double m0 = stats::mean(at_zero);
  std::vector<CovarianceRow> rows;
  for (std::size_t k = 0; k < lags.size(); ++k) {
    if (!(std::abs(lags[k]) < window)) throw PreconditionError("lag must be smaller than the window");
    if (at_lag[k].size() != n) throw DimensionError("lag column has the wrong length");
    const double mt = stats::mean(at_lag[k]);
    std::vector<double> z(n);
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      z[r] = (at_zero[r] - m0) * (at_lag[k][r] - mt);
      sum += z[r];
    }
    const double scale = static_cast<double>(n) / static_cast<double>(n - 1);
    rows.push_back({lags[k], sum / static_cast<double>(n - 1), stats::batch_means_se(z) * scale, n});
  }
  return rows;
}

std::vector<ConfinementRow> confinement_profile(const std::vector<std::vector<double>>& heights,
                                                const std::vector<std::vector<std::vector<double>>>& maxima,
                                                double lambda) {
  if (!(lambda > 1.0)) throw DomainError("lambda must exceed 1");
  if (!maxima.empty() && maxima.size() != heights.size()) throw DimensionError("one maxima list per line");
  std::vector<ConfinementRow> rows;
  for (std::size_t k = 0; k < heights.size(); ++k) {
    if (heights[k].empty()) throw InsufficientDataError("empty sample for a line");
    ConfinementRow r;
    r.k = k;
    r.mean = stats::mean(heights[k]);
    r.se = stats::batch_means_se(heights[k]);
    const double f = std::pow(lambda, static_cast<double>(k) / 3.0);
    r.rescaled = f * r.mean;
    r.rescaled_se = f * r.se;
    if (!maxima.empty()) {
      for (const auto& m : maxima[k]) {
        r.max_mean.push_back(stats::mean(m));
        r.max_se.push_back(stats::batch_means_se(m));
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

double confinement_spread(const std::vector<ConfinementRow>& rows) {
  if (rows.empty()) throw InsufficientDataError("no rows");
  double lo = rows[0].rescaled, hi = rows[0].rescaled;
  for (const auto& r : rows) {
    lo = std::min(lo, r.rescaled);
    hi = std::max(hi, r.rescaled);
  }
  return hi / lo;
}

ScalingReport scaling_check(const ScalingParams& p) {
  if (!(p.lambda > 1.0)) throw DomainError("lambda must exceed 1");
  const GridInterval direct = GridInterval::with_spacing(-p.T, p.T, p.dt);
  const double stretch = std::pow(p.lambda, 2.0 / 3.0);
  const GridInterval wide(-stretch * p.T, stretch * p.T, direct.steps());

  auto config = [&](const GridInterval& g, const TiltParams& tilt, std::uint64_t stream) {
    ChainConfig c;
    c.lines = p.lines;
    c.grid = g;
    c.tilt = tilt;
    c.boundary = BoundarySpec::zero();
    c.schedule = p.schedule;
    c.min_burn_in = p.min_burn_in;
    c.samples = p.samples;
    c.thinning = p.thinning;
    c.seed = p.seed;
    c.stream_id = stream;
    return c;
  };
  const std::size_t mid = direct.nearest_index(0.0);
  const auto sets = run_chains({config(direct, TiltParams(p.a * p.lambda, p.lambda), 0),
                                config(wide, TiltParams(p.a, p.lambda), 1)},
                               {observe_height_at_index(0, mid)}, p.threads);
  const auto x = sets[0].column(0);
  const auto y = sets[1].column(0);
  std::vector<double> mapped(y.size()), wrong(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    mapped[k] = y[k] * std::pow(p.lambda, -1.0 / 3.0);
    wrong[k] = y[k] * std::pow(p.lambda, -0.5);
  }
  ScalingReport r;
  r.ks = stats::ks_two_sample(x, mapped);
  r.control = stats::ks_two_sample(x, wrong);
  r.mean_direct = stats::mean(x);
  r.mean_mapped = stats::mean(mapped);
  r.samples = x.size();
  return r;
}

PinningResult pinning_check(const std::vector<std::vector<double>>& maxima, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  PinningResult res;
  for (std::size_t k = 0; k < maxima.size(); ++k) {
    const auto& m = maxima[k];
    if (m.empty()) throw InsufficientDataError("empty sample for a line");
    PinningRow row;
    row.k = k + 1;
    row.samples = m.size();
    row.count = static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [&](double v) { return v <= eps; }));
    row.p = static_cast<double>(row.count) / static_cast<double>(row.samples);
    const auto ci = stats::clopper_pearson(static_cast<double>(row.count), static_cast<double>(row.samples));
    row.lo = ci.lo;
    row.hi = ci.hi;
    res.best_p = std::max(res.best_p, row.p);
    if (!res.found && row.p >= 1.0 - eps) {
      res.found = true;
      res.k = row.k;
    }
    res.rows.push_back(row);
  }
  return res;
}

std::vector<FreeZeroRow> free_vs_zero_convergence(const FreeZeroParams& p) {
  if (p.T.empty()) throw PreconditionError("empty T list");
  std::vector<FreeZeroRow> rows(p.T.size());
  parallel_for(p.T.size(), p.threads, [&](std::size_t k) {
    const GridInterval grid = GridInterval::with_spacing(-p.T[k], p.T[k], p.dt);
    CoupledPair pair(make_initial_state(grid, p.lines, p.tilt, BoundarySpec::zero()),
                     make_initial_state(grid, p.lines, p.tilt, BoundarySpec::free()),
                     RngStream(p.seed, 1000 + k));
    order_pair(pair);
    for (std::size_t s = 0; s < p.burn_in; ++s) monotone_coupled_sweep(pair);
    const std::uint64_t falsified_at_start = pair.falsified_sweeps;
    const std::size_t mid = grid.nearest_index(0.0);
    std::vector<double> d1, d2, xf, xz;
    double min_diff = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < p.samples; ++s) {
      for (std::size_t t = 0; t < p.thinning; ++t) monotone_coupled_sweep(pair);
      const double f1 = pair.high.height(0, mid), z1 = pair.low.height(0, mid);
      d1.push_back(f1 - z1);
      xf.push_back(f1);
      xz.push_back(z1);
      min_diff = std::min(min_diff, f1 - z1);
      if (p.lines > 1) d2.push_back(pair.high.height(1, mid) - pair.low.height(1, mid));
    }
    FreeZeroRow& r = rows[k];
    r.T = p.T[k];
    r.gap1 = stats::mean(d1);
    r.se1 = stats::batch_means_se(d1);
    if (!d2.empty()) {
      r.gap2 = stats::mean(d2);
      r.se2 = stats::batch_means_se(d2);
    }
    r.ks1 = stats::ks_two_sample(xf, xz).statistic;
    r.mean_free = stats::mean(xf);
    r.mean_zero = stats::mean(xz);
    r.min_diff = min_diff;
    r.rounding_snaps = pair.rounding_snaps;
    r.certificate = pair.falsified_sweeps == falsified_at_start && pair.order_certificate;
  });
  return rows;
}

bool significantly_less(double a, double se_a, double b, double se_b, double confidence) {
  return (b - a) > stats::z_quantile(confidence) * std::sqrt(se_a * se_a + se_b * se_b);
}

}  // namespace tle
