#include "tle/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tle/errors.hpp"

namespace tle {

GridInterval::GridInterval(double ell, double r, std::size_t steps)
    : ell_(ell), r_(r), steps_(steps), dt_(0.0) {
  if (!std::isfinite(ell) || !std::isfinite(r) || !(ell < r)) {
    throw DomainError("grid interval requires finite ell < r");
  }
  if (steps == 0) throw DomainError("grid interval requires at least one step");
  dt_ = (r - ell) / static_cast<double>(steps);
}

double GridInterval::time(std::size_t j) const {
  if (j >= steps_) return r_;
  return ell_ + (r_ - ell_) * static_cast<double>(j) / static_cast<double>(steps_);
}

std::size_t GridInterval::nearest_index(double t) const {
  const double x = std::round((t - ell_) / dt_);
  if (!(x > 0.0)) return 0;
  if (x >= static_cast<double>(steps_)) return steps_;
  return static_cast<std::size_t>(x);
}

GridInterval GridInterval::with_spacing(double ell, double r, double dt) {
  if (!(dt > 0.0)) throw DomainError("grid spacing must be positive");
  const double raw = (r - ell) / dt;
  const double steps = std::round(raw);
  if (steps < 1.0 || std::abs(raw - steps) > 1e-6 * std::max(1.0, raw)) {
    std::ostringstream msg;
    msg << "interval length " << (r - ell) << " is not a multiple of dt " << dt;
    throw DomainError(msg.str());
  }
  return GridInterval(ell, r, static_cast<std::size_t>(steps));
}

GridInterval GridInterval::sub_grid(std::size_t j_a, std::size_t j_b) const {
  if (!(j_a < j_b) || j_b > steps_) throw DomainError("invalid sub-grid index range");
  return GridInterval(time(j_a), time(j_b), j_b - j_a);
}

TiltParams::TiltParams(double a, double lambda, bool diagnostic)
    : a_(a), lambda_(lambda), diagnostic_(diagnostic) {
  if (!std::isfinite(a) || !std::isfinite(lambda)) throw DomainError("tilt parameters must be finite");
  if (diagnostic) {
    if (a < 0.0) throw DomainError("a must be non-negative");
    if (lambda < 1.0) throw DomainError("lambda must be at least 1");
  } else {
    if (!(a > 0.0)) throw DomainError("a must be positive");
    if (!(lambda > 1.0)) throw DomainError("lambda must exceed 1");
  }
}

double TiltParams::line_weight(std::size_t line) const {
  return a_ * std::pow(lambda_, static_cast<double>(line));
}

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Zero:
      return "zero";
    case BoundaryKind::Free:
      return "free";
    case BoundaryKind::Fixed:
      return "fixed";
  }
  return "unknown";
}

namespace {

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

bool in_open_simplex(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || !(v[i] > 0.0)) return false;
    if (i + 1 < v.size() && !(v[i] > v[i + 1])) return false;
  }
  return true;
}

}  // namespace

BoundarySpec BoundarySpec::fixed(std::vector<double> left, std::vector<double> right) {
  if (left.size() != right.size() || left.empty()) {
    throw DimensionError("fixed boundary vectors must be non-empty and of equal length");
  }
  for (const auto* v : {&left, &right}) {
    if (!all_zero(*v) && !in_open_simplex(*v)) {
      throw DomainError("fixed boundary vectors must be strictly decreasing and positive, or all zero");
    }
  }
  return {BoundaryKind::Fixed, std::move(left), std::move(right)};
}

EnsembleState::EnsembleState(GridInterval grid, std::size_t lines, TiltParams tilt,
                             BoundarySpec boundary)
    : grid_(grid),
      lines_(lines),
      stride_(grid.points()),
      tilt_(tilt),
      boundary_(std::move(boundary)),
      heights_(lines * grid.points(), 0.0),
      floor_(grid.points(), 0.0),
      ceiling_(grid.points(), std::numeric_limits<double>::infinity()) {
  if (lines == 0) throw DomainError("an ensemble needs at least one line");
  if (boundary_.kind == BoundaryKind::Fixed) {
    if (boundary_.left.size() != lines || boundary_.right.size() != lines) {
      throw DimensionError("fixed boundary vectors must have one entry per line");
    }
    for (std::size_t i = 0; i < lines; ++i) {
      height(i, 0) = boundary_.left[i];
      height(i, grid_.steps()) = boundary_.right[i];
    }
  }
}

void EnsembleState::set_floor(std::vector<double> floor) {
  if (floor.size() != stride_) throw DimensionError("floor must have one value per grid point");
  floor_ = std::move(floor);
}

void EnsembleState::set_ceiling(std::vector<double> ceiling) {
  if (ceiling.size() != stride_) throw DimensionError("ceiling must have one value per grid point");
  ceiling_ = std::move(ceiling);
}

void EnsembleState::pin_column(std::size_t j) {
  if (j >= stride_) throw DimensionError("pin index outside the grid");
  if (pinned_.empty()) pinned_.assign(stride_, 0);
  pinned_[j] = 1;
}

void EnsembleState::constrain_site(std::size_t line, std::size_t j, double lower, double upper) {
  if (line >= lines_ || j >= stride_) throw DimensionError("site constraint outside the ensemble");
  if (!(lower < upper)) throw DomainError("site constraint needs lower < upper");
  if (site_lower_.empty()) {
    site_lower_.assign(heights_.size(), -std::numeric_limits<double>::infinity());
    site_upper_.assign(heights_.size(), std::numeric_limits<double>::infinity());
  }
  auto& lo = site_lower_[line * stride_ + j];
  auto& hi = site_upper_[line * stride_ + j];
  lo = std::max(lo, lower);
  hi = std::min(hi, upper);
}

bool EnsembleState::column_fixed(std::size_t j) const {
  if ((j == 0 || j + 1 == stride_) && boundary_.kind != BoundaryKind::Free) return true;
  return is_pinned(j);
}

double EnsembleState::lower_limit(std::size_t line, std::size_t j) const {
  const double below = line + 1 < lines_ ? height(line + 1, j) : floor_[j];
  return std::max(below, site_lower(line, j));
}

double EnsembleState::upper_limit(std::size_t line, std::size_t j) const {
  const double above = line > 0 ? height(line - 1, j) : ceiling_[j];
  return std::min(above, site_upper(line, j));
}

bool EnsembleState::same_shape(const EnsembleState& other) const {
  return grid_ == other.grid_ && lines_ == other.lines_;
}

namespace {

// Target heights before constraints are imposed: linear interpolation of the
// boundary data plus a stacked offset so lines start well separated.
double base_height(const EnsembleState& s, std::size_t line, std::size_t j) {
  const double offset = 0.5 * static_cast<double>(s.lines() - line);
  if (s.boundary().kind != BoundaryKind::Fixed) return offset;
  const double w = static_cast<double>(j) / static_cast<double>(s.grid().steps());
  return (1.0 - w) * s.boundary().left[line] + w * s.boundary().right[line] + offset;
}

bool fill_column(EnsembleState& s, std::size_t j, double gap, double scale) {
  const std::size_t n = s.lines();
  const double floor = s.floor()[j];
  for (std::size_t k = n; k-- > 0;) {
    const double below = k + 1 < n ? s.height(k + 1, j) : floor;
    const double target = scale * base_height(s, k, j) + (k + 1 == n ? floor : 0.0);
    s.height(k, j) = std::max({target, below + gap, s.site_lower(k, j) + gap});
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double above = k > 0 ? s.height(k - 1, j) : s.ceiling()[j];
    s.height(k, j) = std::min({s.height(k, j), above - gap, s.site_upper(k, j) - gap});
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!(s.height(k, j) > s.lower_limit(k, j)) || !(s.height(k, j) < s.upper_limit(k, j))) {
      return false;
    }
  }
  return true;
}

}  // namespace

void fill_feasible_heights(EnsembleState& state) {
  for (std::size_t j = 0; j < state.points(); ++j) {
    if (state.column_fixed(j)) continue;
    double gap = 1e-2;
    double scale = 1.0;
    bool ok = false;
    for (int attempt = 0; attempt < 40 && !ok; ++attempt) {
      ok = fill_column(state, j, gap, scale);
      gap *= 0.3;
      scale *= 0.5;
    }
    if (!ok) {
      std::ostringstream msg;
      msg << "no ordered configuration satisfies the constraints at grid index " << j;
      throw InvariantViolation(msg.str());
    }
  }
}

EnsembleState make_initial_state(const GridInterval& grid, std::size_t lines, const TiltParams& tilt,
                                 const BoundarySpec& boundary) {
  EnsembleState state(grid, lines, tilt, boundary);
  fill_feasible_heights(state);
  return state;
}

double area_functional(std::span<const double> path, const GridInterval& grid) {
  if (path.size() != grid.points()) {
    throw DimensionError("path length does not match the grid");
  }
  const std::size_t last = path.size() - 1;
  if (path.size() <= 1'000'000) {
    double sum = 0.5 * (path[0] + path[last]);
    for (std::size_t j = 1; j < last; ++j) sum += path[j];
    return sum * grid.dt();
  }
  // Neumaier summation for very long grids.
  double sum = 0.5 * (path[0] + path[last]);
  double comp = 0.0;
  for (std::size_t j = 1; j < last; ++j) {
    const double t = sum + path[j];
    if (std::abs(sum) >= std::abs(path[j])) {
      comp += (sum - t) + path[j];
    } else {
      comp += (path[j] - t) + sum;
    }
    sum = t;
  }
  return (sum + comp) * grid.dt();
}

double tilt_log_weight(const EnsembleState& state) {
  double total = 0.0;
  for (std::size_t i = 0; i < state.lines(); ++i) {
    total += state.tilt().line_weight(i) * area_functional(state.path(i), state.grid());
  }
  return -total;
}

double gaussian_bridge_mass(std::span<const double> x, std::span<const double> y, double duration) {
  if (!(duration > 0.0)) throw DomainError("bridge duration must be positive");
  if (x.size() != y.size()) throw DimensionError("bridge endpoints must have equal dimension");
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sq += (y[i] - x[i]) * (y[i] - x[i]);
  const double n = static_cast<double>(x.size());
  return std::pow(2.0 * std::numbers::pi * duration, -0.5 * n) * std::exp(-sq / (2.0 * duration));
}

std::string OrderingReport::describe() const {
  if (ok) return "ok";
  std::ostringstream out;
  switch (kind) {
    case Kind::LineOrder:
      out << "line " << line << " meets line " << line + 1;
      break;
    case Kind::Floor:
      out << "line " << line << " touches the floor";
      break;
    case Kind::Ceiling:
      out << "line " << line << " touches the ceiling";
      break;
    case Kind::SiteBound:
      out << "line " << line << " violates a site constraint";
      break;
    case Kind::Boundary:
      out << "line " << line << " does not match the boundary condition";
      break;
    case Kind::NonFinite:
      out << "line " << line << " has a non-finite height";
      break;
    case Kind::None:
      break;
  }
  out << " at grid index " << index << " (" << upper_value << " vs " << lower_value << ")";
  return out.str();
}

OrderingReport check_ordering(const EnsembleState& state) {
  using Kind = OrderingReport::Kind;
  const std::size_t n = state.lines();
  const std::size_t last = state.grid().steps();
  auto fail = [](Kind kind, std::size_t line, std::size_t j, double up, double low) {
    OrderingReport r;
    r.ok = false;
    r.kind = kind;
    r.line = line;
    r.index = j;
    r.upper_value = up;
    r.lower_value = low;
    return r;
  };

  for (std::size_t j = 0; j <= last; ++j) {
    const bool fixed = state.column_fixed(j);
    const bool boundary_col = (j == 0 || j == last);
    for (std::size_t i = 0; i < n; ++i) {
      const double h = state.height(i, j);
      if (!std::isfinite(h)) return fail(Kind::NonFinite, i, j, h, h);
      if (boundary_col && !state.is_pinned(j)) {
        if (state.boundary().kind == BoundaryKind::Zero && h != 0.0) {
          return fail(Kind::Boundary, i, j, h, 0.0);
        }
        if (state.boundary().kind == BoundaryKind::Fixed) {
          const double want = j == 0 ? state.boundary().left[i] : state.boundary().right[i];
          if (h != want) return fail(Kind::Boundary, i, j, h, want);
        }
      }
      const double below = i + 1 < n ? state.height(i + 1, j) : state.floor()[j];
      const Kind below_kind = i + 1 < n ? Kind::LineOrder : Kind::Floor;
      if (fixed ? !(h >= below) : !(h > below)) return fail(below_kind, i, j, h, below);
      if (i == 0) {
        const double ceil = state.ceiling()[j];
        if (fixed ? !(h <= ceil) : !(h < ceil)) return fail(Kind::Ceiling, i, j, ceil, h);
      }
      if (!fixed && state.has_site_constraints()) {
        const double lo = state.site_lower(i, j);
        const double hi = state.site_upper(i, j);
        if (!(h > lo) || !(h < hi)) return fail(Kind::SiteBound, i, j, h, h > lo ? hi : lo);
      }
    }
  }
  return {};
}

bool dominated_by(const EnsembleState& low, const EnsembleState& high) {
  if (!low.same_shape(high)) throw PreconditionError("ensembles have different shapes");
  const auto a = low.heights();
  const auto b = high.heights();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(a[k] <= b[k])) return false;
  }
  return true;
}

}  // namespace tle
