#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tle {

/// Uniform discretization of [ell, r] into `steps` intervals.
///
/// Grid points are computed as ell + (r - ell) * j / steps so that no rounding
/// accumulates along the grid; the last point is exactly r.
class GridInterval {
 public:
  GridInterval(double ell, double r, std::size_t steps);

  double ell() const { return ell_; }
  double r() const { return r_; }
  std::size_t steps() const { return steps_; }
  std::size_t points() const { return steps_ + 1; }
  double dt() const { return dt_; }
  double length() const { return r_ - ell_; }

  double time(std::size_t j) const;

  /// Index of the grid point closest to t (clamped to the grid).
  std::size_t nearest_index(double t) const;

  /// Grid with the same spacing covering [ell, r]; r - ell must be a multiple
  /// of dt up to rounding.
  static GridInterval with_spacing(double ell, double r, double dt);

  /// Sub-grid spanning indices [j_a, j_b] of this grid.
  GridInterval sub_grid(std::size_t j_a, std::size_t j_b) const;

  bool operator==(const GridInterval&) const = default;

 private:
  double ell_;
  double r_;
  std::size_t steps_;
  double dt_;
};

/// Area-tilt parameters: line i (0-based) carries weight exp(-a lambda^i area).
class TiltParams {
 public:
  /// Requires a > 0 and lambda > 1 unless `diagnostic` is set, in which case
  /// a >= 0 and lambda >= 1 are accepted.
  TiltParams(double a, double lambda, bool diagnostic = false);

  double a() const { return a_; }
  double lambda() const { return lambda_; }
  bool diagnostic() const { return diagnostic_; }

  /// a * lambda^line for a 0-based line index.
  double line_weight(std::size_t line) const;

  bool operator==(const TiltParams&) const = default;

 private:
  double a_;
  double lambda_;
  bool diagnostic_;
};

enum class BoundaryKind { Zero, Free, Fixed };

std::string to_string(BoundaryKind kind);

struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::Zero;
  std::vector<double> left;
  std::vector<double> right;

  static BoundarySpec zero() { return {}; }
  static BoundarySpec free() { return {BoundaryKind::Free, {}, {}}; }
  /// Both vectors must be strictly decreasing and strictly positive, or all
  /// zeros.
  static BoundarySpec fixed(std::vector<double> left, std::vector<double> right);

  bool operator==(const BoundarySpec&) const = default;
};

/// n ordered discrete paths on a grid together with the data that defines
/// their target law (boundary, tilt, floor below the last line, ceiling above
/// the first).
///
/// Two extensions beyond the bare model are used by the experiments:
///   - pinned columns: grid indices whose heights are frozen and where ties
///     are allowed, as at a zero boundary;
///   - site constraints: per (line, index) bounds that condition the law on an
///     event such as "X^1(0) <= eps".
class EnsembleState {
 public:
  EnsembleState(GridInterval grid, std::size_t lines, TiltParams tilt, BoundarySpec boundary);

  const GridInterval& grid() const { return grid_; }
  const TiltParams& tilt() const { return tilt_; }
  const BoundarySpec& boundary() const { return boundary_; }
  std::size_t lines() const { return lines_; }
  std::size_t points() const { return grid_.points(); }

  double height(std::size_t line, std::size_t j) const { return heights_[line * stride_ + j]; }
  double& height(std::size_t line, std::size_t j) { return heights_[line * stride_ + j]; }

  std::span<const double> path(std::size_t line) const {
    return {heights_.data() + line * stride_, stride_};
  }
  std::span<double> path(std::size_t line) { return {heights_.data() + line * stride_, stride_}; }

  std::span<const double> heights() const { return heights_; }
  std::span<double> heights() { return heights_; }

  std::span<const double> floor() const { return floor_; }
  std::span<const double> ceiling() const { return ceiling_; }
  void set_floor(std::vector<double> floor);
  void set_ceiling(std::vector<double> ceiling);

  bool is_pinned(std::size_t j) const { return !pinned_.empty() && pinned_[j] != 0; }
  /// Freezes column j at its current heights.
  void pin_column(std::size_t j);
  bool has_pins() const { return !pinned_.empty(); }

  /// Conditions line `line` at grid index j to lie in (lower, upper).
  void constrain_site(std::size_t line, std::size_t j, double lower, double upper);
  bool has_site_constraints() const { return !site_lower_.empty(); }
  double site_lower(std::size_t line, std::size_t j) const {
    return site_lower_.empty() ? -std::numeric_limits<double>::infinity()
                               : site_lower_[line * stride_ + j];
  }
  double site_upper(std::size_t line, std::size_t j) const {
    return site_upper_.empty() ? std::numeric_limits<double>::infinity()
                               : site_upper_[line * stride_ + j];
  }

  /// True when column j is held fixed by the boundary condition or a pin.
  bool column_fixed(std::size_t j) const;

  /// Effective open interval (lower, upper) for height(line, j) given the
  /// neighbouring lines, floor, ceiling and site constraints.
  double lower_limit(std::size_t line, std::size_t j) const;
  double upper_limit(std::size_t line, std::size_t j) const;

  bool same_shape(const EnsembleState& other) const;

  bool operator==(const EnsembleState&) const = default;

 private:
  GridInterval grid_;
  std::size_t lines_;
  std::size_t stride_;
  TiltParams tilt_;
  BoundarySpec boundary_;
  std::vector<double> heights_;
  std::vector<double> floor_;
  std::vector<double> ceiling_;
  std::vector<std::uint8_t> pinned_;
  std::vector<double> site_lower_;
  std::vector<double> site_upper_;
};

/// Builds a state satisfying every constraint of `state` (boundary columns,
/// pins, floor, ceiling, site constraints), overwriting its heights. Throws
/// InvariantViolation when no ordered configuration fits.
void fill_feasible_heights(EnsembleState& state);

/// Convenience: a fresh state with feasible heights.
EnsembleState make_initial_state(const GridInterval& grid, std::size_t lines, const TiltParams& tilt,
                                 const BoundarySpec& boundary);

/// Trapezoidal approximation of the integral of a grid path.
double area_functional(std::span<const double> path, const GridInterval& grid);

/// -a * sum_i lambda^i * area(path_i).
double tilt_log_weight(const EnsembleState& state);

/// Total mass of n independent Brownian bridges from x to y over `duration`.
double gaussian_bridge_mass(std::span<const double> x, std::span<const double> y, double duration);

struct OrderingReport {
  enum class Kind { None, LineOrder, Floor, Ceiling, SiteBound, Boundary, NonFinite };

  bool ok = true;
  Kind kind = Kind::None;
  std::size_t line = 0;
  std::size_t index = 0;
  double upper_value = 0.0;
  double lower_value = 0.0;

  explicit operator bool() const { return ok; }
  std::string describe() const;
};

/// Verifies ordering, floor, ceiling and site constraints. Interior columns
/// are checked strictly; boundary and pinned columns admit ties.
OrderingReport check_ordering(const EnsembleState& state);

/// Pointwise partial order on ensembles: every line of `low` lies at or below
/// the same line of `high` at every grid point.
bool dominated_by(const EnsembleState& low, const EnsembleState& high);

}  // namespace tle
