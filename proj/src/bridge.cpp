#include "tle/bridge.hpp"

#include <cmath>
#include <numbers>

#include "tle/errors.hpp"

namespace tle {

namespace {

double log_gauss(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) - d * d / (2.0 * variance);
}

}  // namespace

GaussianMoments bridge_point_conditional(double left_t, double left_h, double right_t, double right_h,
                                         double t) {
  if (!(left_t < t && t < right_t)) {
    throw DomainError("conditioning time must lie strictly between the endpoints");
  }
  const double span = right_t - left_t;
  const double w = (t - left_t) / span;
  return {left_h + w * (right_h - left_h), (t - left_t) * (right_t - t) / span};
}

void sample_bridge_into(std::span<double> out, const GridInterval& grid, double x, double y, RngStream& rng) {
  if (out.size() != grid.points()) throw DimensionError("bridge buffer does not match the grid");
  const std::size_t m = grid.steps();
  const double r = grid.r();
  out[0] = x;
  double prev_t = grid.ell();
  double prev_h = x;
  for (std::size_t j = 1; j < m; ++j) {
    const double t = grid.time(j);
    const double span = r - prev_t;
    const double step = t - prev_t;
    const double mean = prev_h + step * (y - prev_h) / span;
    const double var = step * (r - t) / span;
    prev_h = mean + std::sqrt(var) * rng.normal();
    prev_t = t;
    out[j] = prev_h;
  }
  out[m] = y;
}

std::vector<double> sample_bridge(const GridInterval& grid, double x, double y, RngStream& rng) {
  std::vector<double> path(grid.points());
  sample_bridge_into(path, grid, x, y, rng);
  return path;
}

double bridge_log_density(std::span<const double> path, const GridInterval& grid, double x, double y) {
  if (path.size() != grid.points()) throw DimensionError("path length does not match the grid");
  const std::size_t m = grid.steps();
  double total = 0.0;
  double prev = x;
  for (std::size_t j = 1; j <= m; ++j) {
    const double cur = j == m ? y : path[j];
    total += log_gauss(cur, prev, grid.time(j) - grid.time(j - 1));
    prev = cur;
  }
  return total - log_gauss(y, x, grid.length());
}

}  // namespace tle
