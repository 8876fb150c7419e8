#include "tle/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "tle/bridge.hpp"
#include "tle/errors.hpp"

namespace tle {

namespace {

constexpr unsigned kNodesPerPanel = 10;

// Composite rule nodes and weights on [lo, hi].
void build_rule(MarginalTable& t, std::size_t panels) {
  using rule = boost::math::quadrature::gauss<double, kNodesPerPanel>;
  std::vector<double> ref_x, ref_w;
  for (std::size_t i = 0; i < rule::abscissa().size(); ++i) {
    const double a = rule::abscissa()[i];
    const double w = rule::weights()[i];
    ref_x.push_back(-a);
    ref_w.push_back(w);
    if (a != 0.0) {
      ref_x.push_back(a);
      ref_w.push_back(w);
    }
  }
  t.edges.resize(panels + 1);
  for (std::size_t p = 0; p <= panels; ++p) {
    t.edges[p] = t.lo + (t.hi - t.lo) * static_cast<double>(p) / static_cast<double>(panels);
  }
  for (std::size_t p = 0; p < panels; ++p) {
    const double half = 0.5 * (t.edges[p + 1] - t.edges[p]);
    const double mid = 0.5 * (t.edges[p + 1] + t.edges[p]);
    for (std::size_t q = 0; q < ref_x.size(); ++q) {
      t.nodes.push_back(mid + half * ref_x[q]);
      t.weights.push_back(half * ref_w[q]);
    }
  }
}

}  // namespace

GaussianInterior unconstrained_interior_moments(const GridInterval& grid, const TiltParams& tilt, double x,
                                                double y) {
  const std::size_t d = grid.steps() - 1;
  const double dt = grid.dt();
  // Precision matrix of the interior is tridiagonal (2, -1)/dt; the linear
  // term collects the boundary values and the tilt gradient a * dt.
  std::vector<double> Q(d * d, 0.0), b(d, -tilt.line_weight(0) * dt);
  for (std::size_t i = 0; i < d; ++i) {
    Q[i * d + i] = 2.0 / dt;
    if (i + 1 < d) Q[i * d + i + 1] = Q[(i + 1) * d + i] = -1.0 / dt;
  }
  b[0] += x / dt;
  b[d - 1] += y / dt;
  // Gauss-Jordan inverse; d <= 3.
  std::vector<double> inv(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) inv[i * d + i] = 1.0;
  for (std::size_t c = 0; c < d; ++c) {
    const double piv = Q[c * d + c];
    for (std::size_t k = 0; k < d; ++k) {
      Q[c * d + k] /= piv;
      inv[c * d + k] /= piv;
    }
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c) continue;
      const double f = Q[r * d + c];
      for (std::size_t k = 0; k < d; ++k) {
        Q[r * d + k] -= f * Q[c * d + k];
        inv[r * d + k] -= f * inv[c * d + k];
      }
    }
  }
  GaussianInterior g;
  g.mean.assign(d, 0.0);
  g.variance.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) g.mean[i] += inv[i * d + k] * b[k];
    g.variance[i] = inv[i * d + i];
  }
  return g;
}

MarginalTable exact_small_grid_marginal(std::size_t lines, const GridInterval& grid, const TiltParams& tilt,
                                        const BoundarySpec& boundary, const OracleOptions& options) {
  if (lines != 1) throw UnsupportedError("the quadrature oracle handles a single line only");
  if (grid.steps() < 2 || grid.steps() > 4) {
    throw UnsupportedError("the quadrature oracle needs 1 to 3 interior points");
  }
  if (boundary.kind == BoundaryKind::Free) throw UnsupportedError("the quadrature oracle needs fixed endpoints");
  if (options.panels == 0) throw PreconditionError("need at least one panel");
  const double x = boundary.kind == BoundaryKind::Fixed ? boundary.left.at(0) : 0.0;
  const double y = boundary.kind == BoundaryKind::Fixed ? boundary.right.at(0) : 0.0;
  const std::size_t d = grid.steps() - 1;

  const GaussianInterior g = unconstrained_interior_moments(grid, tilt, x, y);
  MarginalTable t;
  for (std::size_t k = 0; k < d; ++k) t.indices.push_back(k + 1);
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < d; ++k) {
    const double sd = std::sqrt(g.variance[k]);
    const double centre = options.positivity ? std::max(g.mean[k], 0.0) : g.mean[k];
    hi = std::max(hi, centre + options.cutoff_sigmas * sd);
    lo = std::min(lo, g.mean[k] - options.cutoff_sigmas * sd);
  }
  t.lo = options.positivity ? 0.0 : lo;
  t.hi = hi;
  build_rule(t, options.panels);

  const std::size_t q = t.nodes.size();
  const double w = tilt.line_weight(0);
  t.density.assign(d, std::vector<double>(q, 0.0));
  std::vector<double> path(grid.points());
  path.front() = x;
  path.back() = y;
  std::size_t total = 1;
  for (std::size_t k = 0; k < d; ++k) total *= q;
  double mass = 0.0;
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    double weight = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      idx[k] = rest % q;
      rest /= q;
      path[k + 1] = t.nodes[idx[k]];
      weight *= t.weights[idx[k]];
    }
    const double log_f = bridge_log_density(path, grid, x, y) - w * area_functional(path, grid);
    const double f = std::exp(log_f) * weight;
    mass += f;
    for (std::size_t k = 0; k < d; ++k) t.density[k][idx[k]] += f;
  }
  t.partition = mass;
  t.bin_mass.assign(d, std::vector<double>(options.panels, 0.0));
  const std::size_t per = t.nodes_per_panel();
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < q; ++i) {
      t.bin_mass[k][i / per] += t.density[k][i] / mass;
      t.density[k][i] /= mass * t.weights[i];
    }
  }
  return t;
}

double total_variation(const MarginalTable& table, std::size_t k, const std::vector<double>& sample) {
  if (k >= table.bin_mass.size()) throw DimensionError("no such interior point");
  if (sample.empty()) throw InsufficientDataError("empty sample");
  const std::size_t bins = table.edges.size() - 1;
  std::vector<double> counts(bins, 0.0);
  double outside = 0.0;
  const double width = (table.hi - table.lo) / static_cast<double>(bins);
  for (double v : sample) {
    if (!(v >= table.lo) || !(v < table.hi)) {
      outside += 1.0;
      continue;
    }
    const auto b = std::min(bins - 1, static_cast<std::size_t>((v - table.lo) / width));
    counts[b] += 1.0;
  }
  const double n = static_cast<double>(sample.size());
  double tv = outside / n;
  for (std::size_t b = 0; b < bins; ++b) tv += std::abs(counts[b] / n - table.bin_mass[k][b]);
  return 0.5 * tv;
}

}  // namespace tle
