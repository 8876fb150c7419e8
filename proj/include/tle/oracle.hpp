#pragma once

#include <cstddef>
#include <vector>

#include "tle/model.hpp"

namespace tle {

struct OracleOptions {
  /// Composite Gauss-Legendre rule: `panels` equal panels of 10 nodes each.
  std::size_t panels = 20;
  /// When false the positivity constraint is dropped and the range is
  /// symmetric about the Gaussian mean.
  bool positivity = true;
  /// Range half-width in marginal standard deviations. 8.5 puts the cut where
  /// the density is below 1e-12 of its peak.
  double cutoff_sigmas = 8.5;
};

/// Normalized one-point marginals of a single tilted bridge on a tiny grid.
/// All interior points share the same integration range [lo, hi] and node set.
struct MarginalTable {
  std::vector<std::size_t> indices;  // grid index of each interior point
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> edges;    // panels + 1 panel boundaries
  std::vector<double> nodes;    // quadrature nodes, panel by panel
  std::vector<double> weights;  // matching weights
  /// density[k][q]: marginal density of interior point k at nodes[q].
  std::vector<std::vector<double>> density;
  /// bin_mass[k][p]: probability that interior point k falls in panel p.
  std::vector<std::vector<double>> bin_mass;
  /// Normalizing constant of the unnormalized discrete density.
  double partition = 0.0;

  std::size_t nodes_per_panel() const { return nodes.size() / (edges.size() - 1); }
};

/// Brute-force tensor-product quadrature of
///   bridge density x exp(-a * area) x 1{interior heights > 0}
/// for n = 1 with at most three interior grid points and Zero or Fixed
/// boundary. Anything else throws UnsupportedError.
MarginalTable exact_small_grid_marginal(std::size_t lines, const GridInterval& grid, const TiltParams& tilt,
                                        const BoundarySpec& boundary, const OracleOptions& options = {});

/// Gaussian moments of the interior heights with the positivity constraint
/// removed: the tilt only shifts the mean of the bridge.
struct GaussianInterior {
  std::vector<double> mean;
  std::vector<double> variance;  // marginal variances
};
GaussianInterior unconstrained_interior_moments(const GridInterval& grid, const TiltParams& tilt, double x,
                                                double y);

/// Total variation distance between a histogram of `sample` over the panels of
/// `table` and the exact bin masses of interior point k. Sample values outside
/// [lo, hi] count toward the distance.
double total_variation(const MarginalTable& table, std::size_t k, const std::vector<double>& sample);

}  // namespace tle
