#include "tle/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tle/errors.hpp"
#include "tle/io.hpp"
#include "tle/parallel.hpp"
#include "tle/stats.hpp"

namespace tle {

namespace {

// Inverse-CDF outputs that disagree with the exact-arithmetic order by less
// than this (relative) are treated as rounding.
constexpr double kSnapTolerance = 1e-9;

bool movable(const EnsembleState& s, std::size_t j) {
  if (s.column_fixed(j)) return false;
  const std::size_t m = s.grid().steps();
  if (j == 0 || j == m) return s.boundary().kind == BoundaryKind::Free;
  return true;
}

}  // namespace

CoupledPair::CoupledPair(EnsembleState low_state, EnsembleState high_state, RngStream stream)
    : low(std::move(low_state)), high(std::move(high_state)), rng(stream) {
  if (!(low.grid() == high.grid()) || low.lines() != high.lines()) {
    throw PreconditionError("coupled states need the same grid and number of lines");
  }
  if (!(low.tilt() == high.tilt())) throw PreconditionError("coupled states need the same tilt");
  order_certificate = dominated_by(low, high);
}

void monotone_coupled_sweep(CoupledPair& pair) {
  EnsembleState& lo = pair.low;
  EnsembleState& hi = pair.high;
  const std::size_t n = lo.lines();
  const std::size_t points = lo.points();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < points; ++j) {
      const bool ml = movable(lo, j);
      const bool mh = movable(hi, j);
      if (!ml && !mh) continue;
      const double u =
          pair.rng.uniform_at(pair.sweep, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      if (ml) lo.height(i, j) = heat_bath_value(lo, i, j, u);
      if (mh) hi.height(i, j) = heat_bath_value(hi, i, j, u);
      if (ml && mh) {
        const double excess = lo.height(i, j) - hi.height(i, j);
        if (excess > 0.0 && excess <= kSnapTolerance * (1.0 + std::abs(hi.height(i, j)))) {
          lo.height(i, j) = hi.height(i, j);
          ++pair.rounding_snaps;
          pair.max_snap = std::max(pair.max_snap, excess);
        }
      }
    }
  }
  ++pair.sweep;
  pair.order_certificate = dominated_by(lo, hi);
  if (!pair.order_certificate) ++pair.falsified_sweeps;
}

void order_pair(CoupledPair& pair) {
  EnsembleState& lo = pair.low;
  EnsembleState& hi = pair.high;
  for (std::size_t j = 0; j < lo.points(); ++j) {
    if (!movable(lo, j) || !movable(hi, j)) continue;
    for (std::size_t i = 0; i < lo.lines(); ++i) {
      if (lo.height(i, j) > hi.height(i, j)) std::swap(lo.height(i, j), hi.height(i, j));
    }
  }
  pair.order_certificate = dominated_by(lo, hi);
}

StoppingDomain detect_stopping_domain(const EnsembleState& zero_state, double u) {
  StoppingDomain d;
  d.u = u;
  const auto bottom = zero_state.path(zero_state.lines() - 1);
  const std::size_t m = zero_state.grid().steps();
  bool left = false, right = false;
  for (std::size_t j = 1; j < m; ++j) {
    if (bottom[j] >= u) {
      d.tau_ell = j;
      left = true;
      break;
    }
  }
  for (std::size_t j = m - 1; j >= 1; --j) {
    if (bottom[j] >= u) {
      d.tau_r = j;
      right = true;
      break;
    }
  }
  d.found = left && right && d.tau_ell < d.tau_r;
  return d;
}

ReverseCouplingTrial reverse_coupling_experiment(const ReverseCouplingParams& p, const RngStream& rng,
                                                 std::size_t trial_id) {
  if (!(p.u > 0.0) || !(p.T > 0.0) || !(p.dt > 0.0)) throw PreconditionError("T, dt and u must be positive");
  const GridInterval grid = GridInterval::with_spacing(-p.T, p.T, p.dt);
  const RngStream trial = rng.substream(trial_id, 0);

  ReverseCouplingTrial out{trial_id,
                           {},
                           false,
                           false,
                           false,
                           make_initial_state(grid, p.lines, p.tilt, BoundarySpec::free()),
                           make_initial_state(grid, p.lines, p.tilt, BoundarySpec::zero())};
  equilibrate(out.free_sample, p.schedule, trial.substream(1), p.equilibration_sweeps);
  equilibrate(out.zero_sample, p.schedule, trial.substream(2), p.equilibration_sweeps);

  out.domain = detect_stopping_domain(out.zero_sample, p.u);
  if (!out.domain.found) return out;
  const std::size_t a = out.domain.tau_ell, b = out.domain.tau_r;
  out.event_a = out.free_sample.height(0, a) <= p.u && out.free_sample.height(0, b) <= p.u;
  out.event_b = out.event_a && grid.time(a) < -p.T / 2 && grid.time(b) > p.T / 2;
  if (!out.event_b) return out;

  // Strong Gibbs on [tau_l, tau_r]: both ensembles are resampled given their
  // values at the stopping times, which are ordered X <= u <= Y.
  const GridInterval sub = grid.sub_grid(a, b);
  auto restrict = [&](const EnsembleState& s) {
    std::vector<double> left(p.lines), right(p.lines);
    for (std::size_t i = 0; i < p.lines; ++i) {
      left[i] = s.height(i, a);
      right[i] = s.height(i, b);
    }
    EnsembleState r(sub, p.lines, p.tilt, BoundarySpec::fixed(left, right));
    for (std::size_t i = 0; i < p.lines; ++i)
      for (std::size_t j = 0; j <= sub.steps(); ++j) r.height(i, j) = s.height(i, a + j);
    return r;
  };
  CoupledPair pair(restrict(out.free_sample), restrict(out.zero_sample), trial.substream(3));
  order_pair(pair);
  for (std::size_t k = 0; k < p.coupled_sweeps; ++k) monotone_coupled_sweep(pair);
  for (std::size_t i = 0; i < p.lines; ++i) {
    for (std::size_t j = 0; j <= sub.steps(); ++j) {
      out.free_sample.height(i, a + j) = pair.low.height(i, j);
      out.zero_sample.height(i, a + j) = pair.high.height(i, j);
    }
  }
  const std::size_t lo = grid.nearest_index(-p.T / 2), hi = grid.nearest_index(p.T / 2);
  bool ordered = true;
  for (std::size_t i = 0; i < p.lines && ordered; ++i)
    for (std::size_t j = lo; j <= hi && ordered; ++j)
      ordered = out.free_sample.height(i, j) <= out.zero_sample.height(i, j);
  out.success = ordered;
  return out;
}

void write_coupling_csv_header(std::ostream& out) { out << "trial_id,T,n,u,found,success\n"; }

void write_coupling_csv_row(std::ostream& out, const ReverseCouplingParams& p, const ReverseCouplingTrial& t) {
  out << t.trial_id << ',' << format_double(p.T) << ',' << p.lines << ',' << format_double(p.u) << ','
      << (t.domain.found ? 1 : 0) << ',' << (t.success ? 1 : 0) << '\n';
}

namespace {

std::vector<std::size_t> pin_indices(const GridInterval& grid, double T, double spacing) {
  std::vector<std::size_t> pins{0};
  for (int k = 1;; ++k) {
    const double t = -T + k * spacing;
    if (t >= T - 0.5 * grid.dt()) break;
    pins.push_back(grid.nearest_index(t));
  }
  pins.push_back(grid.steps());
  return pins;
}

}  // namespace

EnsembleState pinned_template(const PinnedParams& p) {
  if (!(p.T >= p.pin_spacing) || !(p.pin_spacing > 0.0)) {
    throw PreconditionError("pinned ensemble needs T >= pin spacing > 0");
  }
  const GridInterval grid = GridInterval::with_spacing(-p.T, p.T, p.dt);
  EnsembleState s(grid, p.lines, p.tilt, BoundarySpec::zero());
  const auto pins = pin_indices(grid, p.T, p.pin_spacing);
  for (std::size_t k = 1; k + 1 < pins.size(); ++k) {
    for (std::size_t i = 0; i < p.lines; ++i) s.height(i, pins[k]) = 0.0;
    s.pin_column(pins[k]);
  }
  fill_feasible_heights(s);
  return s;
}

EnsembleState pinned_ensemble_sample(const PinnedParams& p, const RngStream& rng) {
  EnsembleState s = pinned_template(p);
  const GridInterval& grid = s.grid();
  const auto pins = pin_indices(grid, p.T, p.pin_spacing);
  const std::size_t blocks = pins.size() - 1;
  std::vector<EnsembleState> parts;
  parts.reserve(blocks);
  for (std::size_t k = 0; k < blocks; ++k) {
    parts.push_back(
        make_initial_state(grid.sub_grid(pins[k], pins[k + 1]), p.lines, p.tilt, BoundarySpec::zero()));
  }
  parallel_for(blocks, p.threads, [&](std::size_t k) {
    equilibrate(parts[k], p.schedule, rng.substream(k, 7), p.equilibration_sweeps);
  });
  for (std::size_t k = 0; k < blocks; ++k) {
    for (std::size_t i = 0; i < p.lines; ++i)
      for (std::size_t j = 1; j < parts[k].grid().steps(); ++j) s.height(i, pins[k] + j) = parts[k].height(i, j);
  }
  return s;
}

ExceedanceEstimate estimate_pinned_exceedance(const ExceedanceParams& p) {
  if (p.lines == 0 || !(p.v > 0.0) || !(p.stage_fraction > 0.0 && p.stage_fraction < 1.0)) {
    throw PreconditionError("exceedance needs k >= 1, v > 0 and a stage fraction in (0, 1)");
  }
  if (p.samples < 50) throw PreconditionError("too few samples per stage");
  const GridInterval grid = GridInterval::with_spacing(-1.0, 1.0, p.dt);
  const std::size_t mid = grid.nearest_index(0.0);
  std::vector<double> unit(p.lines);
  for (std::size_t i = 0; i < p.lines; ++i) unit[i] = std::pow(p.tilt.lambda(), -static_cast<double>(i) / 3.0);

  Observable score{"score", [&](const EnsembleState& s) {
                     double m = std::numeric_limits<double>::infinity();
                     for (std::size_t i = 0; i < s.lines(); ++i) m = std::min(m, s.height(i, mid) / unit[i]);
                     return m;
                   }};

  ExceedanceEstimate est;
  est.levels.push_back(0.0);
  double level = 0.0;
  for (std::size_t stage = 0; stage < p.max_stages; ++stage) {
    EnsembleState start(grid, p.lines, p.tilt, BoundarySpec::zero());
    if (level > 0.0) {
      for (std::size_t i = 0; i < p.lines; ++i)
        start.constrain_site(i, mid, level * unit[i], std::numeric_limits<double>::infinity());
    }
    fill_feasible_heights(start);
    ChainConfig cfg;
    cfg.lines = p.lines;
    cfg.grid = grid;
    cfg.tilt = p.tilt;
    cfg.boundary = BoundarySpec::zero();
    cfg.schedule = p.schedule;
    cfg.initial = std::move(start);
    cfg.min_burn_in = p.min_burn_in;
    cfg.samples = p.samples;
    cfg.thinning = p.thinning;
    cfg.seed = p.seed;
    cfg.stream_id = p.stream_base * 1000 + stage;
    const auto x = run_chain(cfg, {score}).column(0);

    const std::size_t pilot = x.size() / 5;
    std::vector<double> head(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(pilot));
    std::sort(head.begin(), head.end());
    const double q = head[static_cast<std::size_t>((1.0 - p.stage_fraction) * static_cast<double>(pilot - 1))];
    const bool last = q >= p.v;
    const double next = last ? p.v : std::max(q, level + 1e-9);

    std::vector<double> ind;
    ind.reserve(x.size() - pilot);
    for (std::size_t k = pilot; k < x.size(); ++k) ind.push_back(x[k] >= next ? 1.0 : 0.0);
    const double f = stats::mean(ind);
    const double se = stats::batch_means_se(ind);
    est.fractions.push_back(f);
    est.fraction_se.push_back(se);
    est.levels.push_back(next);
    if (f <= 0.0) {
      est.log_p = -std::numeric_limits<double>::infinity();
      est.log_se = std::numeric_limits<double>::infinity();
      est.p = est.lo = 0.0;
      est.hi = 1.0;
      return est;
    }
    est.log_p += std::log(f);
    est.log_se += (se / f) * (se / f);
    level = next;
    if (last) break;
  }
  if (level < p.v) throw InvariantViolation("exceedance ladder did not reach v within max_stages");
  est.log_se = std::sqrt(est.log_se);
  est.p = std::exp(est.log_p);
  est.lo = std::exp(est.log_p - 1.96 * est.log_se);
  est.hi = std::min(1.0, std::exp(est.log_p + 1.96 * est.log_se));
  return est;
}

}  // namespace tle
