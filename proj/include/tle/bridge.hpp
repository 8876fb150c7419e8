#pragma once

#include <span>
#include <vector>

#include "tle/model.hpp"
#include "tle/rng.hpp"

namespace tle {

struct GaussianMoments {
  double mean;
  double variance;
};

/// Law of a Brownian bridge at time t given its values at left_t < t < right_t.
GaussianMoments bridge_point_conditional(double left_t, double left_h, double right_t, double right_h,
                                         double t);

/// Exact discrete Brownian bridge from x to y on `grid`, sampled left to right
/// by sequential conditioning. path[0] == x and path[steps] == y exactly.
std::vector<double> sample_bridge(const GridInterval& grid, double x, double y, RngStream& rng);

/// In-place variant writing into out (size grid.points()).
void sample_bridge_into(std::span<double> out, const GridInterval& grid, double x, double y, RngStream& rng);

/// Log-density of the interior values of `path` under the discrete bridge from
/// x to y, with respect to Lebesgue measure on the interior. The endpoint
/// values used are x and y; path[0] and path[steps] are ignored.
double bridge_log_density(std::span<const double> path, const GridInterval& grid, double x, double y);

}  // namespace tle
