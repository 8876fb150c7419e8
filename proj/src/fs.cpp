#include "tle/fs.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

#include "tle/airy.hpp"
#include "tle/errors.hpp"
#include "tle/io.hpp"
#include "tle/stats.hpp"

namespace tle {

namespace {

const double kCbrt2 = std::cbrt(2.0);
constexpr double kCell = 1.0 / 64.0;

double phi_squared(double x, double omega1) {
  const double a = airy_ai(kCbrt2 * x - omega1);
  return a * a;
}

double integrate_phi2(double a, double b, double omega1) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  return Rule::integrate([&](double x) { return phi_squared(x, omega1); }, a, b);
}

// Cumulative masses at cell edges k * kCell on [0, support max].
struct CdfTable {
  FsConstants constants;
  std::vector<double> below;  // below[k] = P(Y <= k h)
  std::vector<double> above;  // above[k] = P(Y > k h), summed from the right
  double mean = 0.0;

  CdfTable() {
    const double omega1 = airy_first_zero();
    const double aip = airy_ai_prime(-omega1);
    constants.omega1 = omega1;
    constants.z_closed = aip * aip / kCbrt2;
    const std::size_t cells = static_cast<std::size_t>(std::lround(fs_support_max() / kCell));
    std::vector<double> mass(cells);
    double first_moment = 0.0;
    using Rule = boost::math::quadrature::gauss<double, 10>;
    for (std::size_t k = 0; k < cells; ++k) {
      const double a = k * kCell, b = a + kCell;
      mass[k] = integrate_phi2(a, b, omega1);
      first_moment += Rule::integrate([&](double x) { return x * phi_squared(x, omega1); }, a, b);
    }
    double total = 0.0;
    for (double m : mass) total += m;
    constants.z_numeric = total;
    below.assign(cells + 1, 0.0);
    above.assign(cells + 1, 0.0);
    for (std::size_t k = 0; k < cells; ++k) below[k + 1] = below[k] + mass[k] / constants.z_closed;
    for (std::size_t k = cells; k-- > 0;) above[k] = above[k + 1] + mass[k] / constants.z_closed;
    mean = first_moment / constants.z_closed;
  }
};

const CdfTable& table() {
  static const CdfTable t;
  return t;
}

std::size_t cell_of(double x) {
  const std::size_t last = table().below.size() - 2;
  return std::min(static_cast<std::size_t>(x / kCell), last);
}

}  // namespace

const FsConstants& fs_constants() { return table().constants; }

double fs_phi(double x) { return airy_ai(kCbrt2 * x - fs_constants().omega1); }

double fs_density(double x) {
  if (x <= 0.0) return 0.0;
  const double p = fs_phi(x);
  return p * p / fs_constants().z_closed;
}

double fs_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= fs_support_max()) return 1.0;
  const auto& t = table();
  const std::size_t k = cell_of(x);
  return t.below[k] + integrate_phi2(k * kCell, x, t.constants.omega1) / t.constants.z_closed;
}

double fs_ccdf(double x) {
  if (x <= 0.0) return 1.0;
  if (x >= fs_support_max()) return 0.0;
  const auto& t = table();
  const std::size_t k = cell_of(x);
  return t.above[k + 1] + integrate_phi2(x, (k + 1) * kCell, t.constants.omega1) / t.constants.z_closed;
}

double fs_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("fs_quantile needs u in (0, 1)");
  const auto& t = table();
  const bool lower = u <= 0.5;
  const double target = lower ? u : 1.0 - u;
  std::size_t k;
  if (lower) {
    k = static_cast<std::size_t>(std::upper_bound(t.below.begin(), t.below.end(), target) - t.below.begin()) - 1;
  } else {
    // above[] is decreasing; find the last edge with above >= target.
    auto it = std::lower_bound(t.above.begin(), t.above.end(), target, [](double a, double v) { return a >= v; });
    k = static_cast<std::size_t>(it - t.above.begin()) - 1;
  }
  k = std::min(k, t.below.size() - 2);
  double lo = k * kCell, hi = lo + kCell;
  auto residual = [&](double x) { return lower ? fs_cdf(x) - target : target - fs_ccdf(x); };
  // Linear interpolation inside the cell is a good first guess.
  const double f0 = lower ? t.below[k] : 1.0 - t.above[k], f1 = lower ? t.below[k + 1] : 1.0 - t.above[k + 1];
  const double target_cdf = lower ? target : 1.0 - target;
  double x = f1 > f0 ? lo + std::clamp((target_cdf - f0) / (f1 - f0), 0.01, 0.99) * kCell : 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double r = residual(x);
    if (r > 0) hi = x; else lo = x;
    const double d = fs_density(x);
    double next = d > 0 ? x - r / d : 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-13 * (1.0 + x)) return next;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-14) return next;
    x = next;
  }
  return x;
}

double fs_mean() { return table().mean; }

double fs_drift(double x) {
  if (!(x > 0.0)) throw DomainError("fs_drift needs x > 0");
  double a, ap;
  AiryTable::instance().evaluate(kCbrt2 * x - fs_constants().omega1, a, ap);
  return kCbrt2 * ap / a;
}

double fs_sample(RngStream& rng) { return fs_quantile(rng.uniform()); }

std::vector<double> fs_sample_many(std::size_t count, const RngStream& rng) {
  RngStream r = rng;
  std::vector<double> out(count);
  for (auto& v : out) v = fs_sample(r);
  return out;
}

namespace {

double euler_step(double x, double dt, double sqdt, double eps_wall, RngStream& rng, std::size_t& wall) {
  const double b = fs_drift(x);
  double next = x + b * dt / (1.0 + dt * std::abs(b)) + sqdt * rng.normal();
  if (next < eps_wall) {
    ++wall;
    next = std::max(-next, eps_wall);
  }
  return next;
}

void check_options(double T, const FsPathOptions& o) {
  if (!(T >= 0.0) || !(o.dt > 0.0) || !(o.eps_wall > 0.0)) throw PreconditionError("need T >= 0, dt > 0, eps_wall > 0");
  if (!o.stationary_start && !(o.x0 > 0.0)) throw PreconditionError("x0 must be positive");
}

}  // namespace

FsPath fs_simulate_path(double T, const FsPathOptions& opts, RngStream& rng) {
  check_options(T, opts);
  const std::size_t steps = static_cast<std::size_t>(std::llround(T / opts.dt));
  const double sqdt = std::sqrt(opts.dt);
  FsPath p;
  p.x.resize(steps + 1);
  p.x[0] = opts.stationary_start ? fs_sample(rng) : opts.x0;
  for (std::size_t k = 0; k < steps; ++k) p.x[k + 1] = euler_step(p.x[k], opts.dt, sqdt, opts.eps_wall, rng, p.wall_events);
  return p;
}

double fs_simulate_endpoint(double T, const FsPathOptions& opts, RngStream& rng, std::size_t* wall_events) {
  check_options(T, opts);
  const std::size_t steps = static_cast<std::size_t>(std::llround(T / opts.dt));
  const double sqdt = std::sqrt(opts.dt);
  std::size_t wall = 0;
  double x = opts.stationary_start ? fs_sample(rng) : opts.x0;
  for (std::size_t k = 0; k < steps; ++k) x = euler_step(x, opts.dt, sqdt, opts.eps_wall, rng, wall);
  if (wall_events) *wall_events += wall;
  return x;
}

std::vector<TailPoint> fs_max_tail(double S, const std::vector<double>& ts, std::size_t paths,
                                   const FsPathOptions& opts, const RngStream& rng) {
  if (paths == 0) throw PreconditionError("need at least one path");
  std::vector<std::size_t> counts(ts.size(), 0);
  for (std::size_t k = 0; k < paths; ++k) {
    RngStream r = rng.substream(k, 0);
    const FsPath p = fs_simulate_path(S, opts, r);
    const double m = *std::max_element(p.x.begin(), p.x.end());
    for (std::size_t q = 0; q < ts.size(); ++q)
      if (m > ts[q]) ++counts[q];
  }
  std::vector<TailPoint> out;
  for (std::size_t q = 0; q < ts.size(); ++q) {
    const auto ci = stats::clopper_pearson(static_cast<double>(counts[q]), static_cast<double>(paths));
    out.push_back({ts[q], static_cast<double>(counts[q]) / paths, ci.lo, ci.hi, counts[q], paths});
  }
  return out;
}

double fs_lower_tail(double eps) { return fs_cdf(eps); }

TailPoint fs_lower_tail_mc(double eps, std::size_t trials, const RngStream& rng) {
  if (trials == 0) throw PreconditionError("need at least one trial");
  RngStream r = rng;
  std::size_t count = 0;
  for (std::size_t k = 0; k < trials; ++k)
    if (fs_sample(r) <= eps) ++count;
  const auto ci = stats::clopper_pearson(static_cast<double>(count), static_cast<double>(trials));
  return {eps, static_cast<double>(count) / trials, ci.lo, ci.hi, count, trials};
}

void write_fs_csv(const std::string& path, double x_max, std::size_t points) {
  if (points < 2 || !(x_max > 0.0)) throw PreconditionError("need at least two points on a positive range");
  std::ostringstream out;
  out << "x,pdf,cdf\n";
  for (std::size_t k = 0; k < points; ++k) {
    const double x = x_max * k / (points - 1);
    out << format_double(x) << ',' << format_double(fs_density(x)) << ',' << format_double(fs_cdf(x)) << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace tle
