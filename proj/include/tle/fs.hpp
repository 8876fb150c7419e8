#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tle/rng.hpp"

namespace tle {

/// The Ferrari-Spohn diffusion: stationary density Ai(2^{1/3} x - omega_1)^2 / Z
/// on x > 0, drift (log phi)' and unit diffusion.
struct FsConstants {
  double omega1;
  /// Closed form 2^{-1/3} Ai'(-omega_1)^2.
  double z_closed;
  /// Gauss-Legendre integral of phi^2 over [0, fs_support_max()].
  double z_numeric;
};

const FsConstants& fs_constants();

/// Mass beyond this point is below 1e-25.
inline double fs_support_max() { return 12.0; }

/// phi(x) = Ai(2^{1/3} x - omega_1).
double fs_phi(double x);
double fs_density(double x);
double fs_cdf(double x);
double fs_ccdf(double x);
double fs_quantile(double u);
double fs_mean();
/// 2^{1/3} Ai'/Ai at 2^{1/3} x - omega_1. Requires x > 0.
double fs_drift(double x);

/// Exact stationary draw by inverse CDF.
double fs_sample(RngStream& rng);
std::vector<double> fs_sample_many(std::size_t count, const RngStream& rng);

struct FsPathOptions {
  double dt = 1e-3;
  double eps_wall = 1e-8;
  /// Start from an exact stationary draw; otherwise from x0.
  bool stationary_start = true;
  double x0 = 1.0;
};

struct FsPath {
  std::vector<double> x;  // x[k] at time k * dt
  /// Steps whose Euler proposal fell below eps_wall and were reflected.
  std::size_t wall_events = 0;
};

/// Euler-Maruyama on [0, T]. The drift increment is tamed as
/// b dt / (1 + dt |b|), which caps it at 1 next to the wall where b ~ 1/x and
/// differs from plain Euler by O(dt^2) per step where b is bounded.
FsPath fs_simulate_path(double T, const FsPathOptions& opts, RngStream& rng);

/// Euler-Maruyama value at time T only (no path storage).
double fs_simulate_endpoint(double T, const FsPathOptions& opts, RngStream& rng, std::size_t* wall_events = nullptr);

struct TailPoint {
  double t;
  double p;
  double lo;
  double hi;
  std::size_t count;
  std::size_t trials;
};

/// P(max_{[0,S]} Y > t) for each t from independent stationary Euler paths,
/// with 95% Clopper-Pearson intervals. The maximum is over grid times.
std::vector<TailPoint> fs_max_tail(double S, const std::vector<double>& ts, std::size_t paths,
                                   const FsPathOptions& opts, const RngStream& rng);

/// P(Y(0) <= eps), exact from the CDF table.
double fs_lower_tail(double eps);

/// Monte Carlo version of fs_lower_tail from exact stationary draws.
TailPoint fs_lower_tail_mc(double eps, std::size_t trials, const RngStream& rng);

/// Columns x,pdf,cdf on an even grid over [0, x_max].
void write_fs_csv(const std::string& path, double x_max, std::size_t points);

}  // namespace tle
