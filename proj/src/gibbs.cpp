#include "tle/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tle/bridge.hpp"
#include "tle/errors.hpp"
#include "tle/io.hpp"
#include "tle/normal.hpp"
#include "tle/parallel.hpp"
#include "tle/stats.hpp"

namespace tle {

namespace {

constexpr std::uint64_t kBlockTag = 1;
constexpr std::uint64_t kEndpointTag = 2;
constexpr char kCheckpointMagic[] = "TLECHKPT";
constexpr std::uint64_t kCheckpointVersion = 1;

#ifdef NDEBUG
constexpr std::size_t kOrderCheckInterval = 256;
#else
constexpr std::size_t kOrderCheckInterval = 1;
#endif

double log_gauss_kernel(double x, double mean, double variance) {
  const double d = x - mean;
  return -d * d / (2.0 * variance);
}

}  // namespace

Observable observe_height(std::size_t line, double t, const GridInterval& grid) {
  const std::size_t j = grid.nearest_index(t);
  std::ostringstream name;
  name << "X" << line + 1 << "(" << format_double(grid.time(j)) << ")";
  return {name.str(), [line, j](const EnsembleState& s) { return s.height(line, j); }};
}

Observable observe_height_at_index(std::size_t line, std::size_t j) {
  std::ostringstream name;
  name << "X" << line + 1 << "[" << j << "]";
  return {name.str(), [line, j](const EnsembleState& s) { return s.height(line, j); }};
}

Observable observe_max(std::size_t line, double t0, double t1, const GridInterval& grid) {
  std::size_t lo = grid.nearest_index(t0);
  std::size_t hi = grid.nearest_index(t1);
  if (grid.time(lo) < t0 && lo < grid.steps()) ++lo;
  if (grid.time(hi) > t1 && hi > 0) --hi;
  std::ostringstream name;
  name << "maxX" << line + 1 << "[" << format_double(t0) << "," << format_double(t1) << "]";
  return {name.str(), [line, lo, hi](const EnsembleState& s) {
            const auto p = s.path(line);
            return *std::max_element(p.begin() + static_cast<std::ptrdiff_t>(lo),
                                     p.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
          }};
}

std::vector<double> SampleSet::column(std::size_t k) const {
  const std::size_t n = names.size();
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = values[r * n + k];
  return out;
}

std::vector<double> SampleSet::column(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error("no observable named " + name);
  return column(static_cast<std::size_t>(it - names.begin()));
}

double heat_bath_value(const EnsembleState& state, std::size_t line, std::size_t j, double u) {
  const std::size_t m = state.grid().steps();
  const double dt = state.grid().dt();
  const double w = state.tilt().line_weight(line);
  double mean, var;
  if (j > 0 && j < m) {
    var = 0.5 * dt;
    mean = 0.5 * (state.height(line, j - 1) + state.height(line, j + 1)) - w * dt * var;
  } else {
    // Free endpoint: one Gaussian increment and half a trapezoid cell of tilt.
    var = dt;
    const double neighbour = state.height(line, j == 0 ? 1 : m - 1);
    mean = neighbour - w * 0.5 * dt * var;
  }
  return truncated_normal_quantile(mean, std::sqrt(var), state.lower_limit(line, j), state.upper_limit(line, j),
                                   u);
}

void heat_bath_point(EnsembleState& state, std::size_t line, std::size_t j, RngStream& rng) {
  if (line >= state.lines() || j >= state.points()) throw DimensionError("site outside the ensemble");
  if (state.column_fixed(j)) throw PreconditionError("cannot update a fixed column");
  state.height(line, j) = heat_bath_value(state, line, j, rng.uniform());
}

void heat_bath_sweep(EnsembleState& state, const RngStream& rng, std::uint64_t sweep,
                     bool include_free_endpoints) {
  const std::size_t n = state.lines();
  const std::size_t m = state.grid().steps();
  const double dt = state.grid().dt();
  const double var = 0.5 * dt;
  const double sd = std::sqrt(var);
  const bool free_ends = include_free_endpoints && state.boundary().kind == BoundaryKind::Free;
  const bool pins = state.has_pins();
  const bool sites = state.has_site_constraints();
  const auto floor = state.floor();
  const auto ceiling = state.ceiling();

  for (std::size_t i = 0; i < n; ++i) {
    const double shift = state.tilt().line_weight(i) * dt * var;
    double* row = state.path(i).data();
    const double* above = i > 0 ? state.path(i - 1).data() : ceiling.data();
    const double* below = i + 1 < n ? state.path(i + 1).data() : floor.data();
    const auto u32line = static_cast<std::uint32_t>(i);
    if (free_ends && !state.is_pinned(0)) {
      state.height(i, 0) = heat_bath_value(state, i, 0, rng.uniform_at(sweep, u32line, 0));
    }
    for (std::size_t j = 1; j < m; ++j) {
      if (pins && state.is_pinned(j)) continue;
      double lower = below[j];
      double upper = above[j];
      if (sites) {
        lower = std::max(lower, state.site_lower(i, j));
        upper = std::min(upper, state.site_upper(i, j));
      }
      const double mean = 0.5 * (row[j - 1] + row[j + 1]) - shift;
      row[j] = truncated_normal_quantile(mean, sd, lower, upper,
                                         rng.uniform_at(sweep, u32line, static_cast<std::uint32_t>(j)));
    }
    if (free_ends && !state.is_pinned(m)) {
      state.height(i, m) =
          heat_bath_value(state, i, m, rng.uniform_at(sweep, u32line, static_cast<std::uint32_t>(m)));
    }
  }
}

bool resample_block(EnsembleState& state, const BlockSpec& block, RngStream& rng) {
  const std::size_t n = state.lines();
  const std::size_t m = state.grid().steps();
  if (block.depth == 0 || block.depth > n) throw PreconditionError("block depth must be in 1..n");
  if (block.j_b > m || block.j_a + 2 > block.j_b) throw PreconditionError("block window needs j_b - j_a >= 2");
  for (std::size_t j = block.j_a + 1; j < block.j_b; ++j) {
    if (state.is_pinned(j)) throw PreconditionError("block window contains a pinned column");
  }
  for (std::size_t c : {block.j_a, block.j_b}) {
    if (state.height(0, c) > state.ceiling()[c]) {
      throw PreconditionError("block endpoint column conflicts with the ceiling");
    }
  }

  const std::size_t len = block.j_b - block.j_a;
  const GridInterval sub = state.grid().sub_grid(block.j_a, block.j_b);
  const double dt = state.grid().dt();
  thread_local std::vector<double> buffer;
  buffer.resize(block.depth * (len + 1));

  double log_ratio = 0.0;
  for (std::size_t l = block.depth; l-- > 0;) {
    std::span<double> prop(buffer.data() + l * (len + 1), len + 1);
    sample_bridge_into(prop, sub, state.height(l, block.j_a), state.height(l, block.j_b), rng);
    const double* lower_row =
        l + 1 < block.depth ? buffer.data() + (l + 1) * (len + 1) : nullptr;
    double delta_area = 0.0;
    for (std::size_t k = 1; k < len; ++k) {
      const std::size_t j = block.j_a + k;
      const double v = prop[k];
      const double lower = lower_row ? lower_row[k] : (l + 1 < n ? state.height(l + 1, j) : state.floor()[j]);
      if (!(v > lower) || !(v > state.site_lower(l, j)) || !(v < state.site_upper(l, j))) return false;
      if (l == 0 && !(v < state.ceiling()[j])) return false;
      delta_area += v - state.height(l, j);
    }
    log_ratio -= state.tilt().line_weight(l) * dt * delta_area;
  }
  if (!(std::log(rng.uniform()) < log_ratio)) return false;
  for (std::size_t l = 0; l < block.depth; ++l) {
    const double* prop = buffer.data() + l * (len + 1);
    for (std::size_t k = 1; k < len; ++k) state.height(l, block.j_a + k) = prop[k];
  }
  return true;
}

bool free_endpoint_move(EnsembleState& state, Side side, double sigma_prop, RngStream& rng) {
  if (state.boundary().kind != BoundaryKind::Free) {
    throw PreconditionError("endpoint moves require a free boundary");
  }
  if (sigma_prop < 0.0) throw PreconditionError("proposal scale must be non-negative");
  const std::size_t n = state.lines();
  const std::size_t m = state.grid().steps();
  const std::size_t col = side == Side::Left ? 0 : m;
  const std::size_t nb = side == Side::Left ? 1 : m - 1;
  if (state.is_pinned(col)) return false;
  const double dt = state.grid().dt();

  thread_local std::vector<double> proposal;
  proposal.resize(n);
  double log_ratio = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double old = state.height(i, col);
    const double v = old + sigma_prop * rng.normal();
    proposal[i] = v;
    const double next = state.height(i, nb);
    log_ratio += log_gauss_kernel(next, v, dt) - log_gauss_kernel(next, old, dt);
    log_ratio -= state.tilt().line_weight(i) * 0.5 * dt * (v - old);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double below = i + 1 < n ? proposal[i + 1] : state.floor()[col];
    if (!(proposal[i] > below)) return false;
    if (i == 0 && !(proposal[i] < state.ceiling()[col])) return false;
    if (!(proposal[i] > state.site_lower(i, col)) || !(proposal[i] < state.site_upper(i, col))) return false;
  }
  if (!(std::log(rng.uniform()) < log_ratio)) return false;
  for (std::size_t i = 0; i < n; ++i) state.height(i, col) = proposal[i];
  return true;
}

void gibbs_sweep(EnsembleState& state, const SweepSchedule& schedule, const RngStream& rng,
                 std::uint64_t sweep, MoveStats& stats) {
  heat_bath_sweep(state, rng, sweep);
  const std::size_t m = state.grid().steps();
  if (schedule.blocks_per_sweep > 0 && m >= 4) {
    RngStream moves = rng.substream(sweep, kBlockTag);
    const std::size_t max_depth = std::clamp<std::size_t>(schedule.max_block_depth, 1, state.lines());
    const double min_w = static_cast<double>(std::max<std::size_t>(schedule.min_window, 2));
    const double max_w = std::max(min_w, static_cast<double>(m) / 4.0);
    for (std::size_t b = 0; b < schedule.blocks_per_sweep; ++b) {
      BlockSpec block;
      block.depth = 1 + static_cast<std::size_t>(moves.uniform() * static_cast<double>(max_depth));
      const double len_real = std::exp(std::log(min_w) + moves.uniform() * (std::log(max_w) - std::log(min_w)));
      const std::size_t len = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(len_real)), 2, m);
      block.j_a = static_cast<std::size_t>(moves.uniform() * static_cast<double>(m - len + 1));
      block.j_b = block.j_a + len;
      if (state.has_pins()) {
        bool crosses = false;
        for (std::size_t j = block.j_a + 1; j < block.j_b && !crosses; ++j) crosses = state.is_pinned(j);
        if (crosses) continue;
      }
      ++stats.block_proposed;
      if (resample_block(state, block, moves)) ++stats.block_accepted;
    }
  }
  if (state.boundary().kind == BoundaryKind::Free) {
    RngStream ends = rng.substream(sweep, kEndpointTag);
    for (std::size_t k = 0; k < schedule.endpoint_moves; ++k) {
      for (Side side : {Side::Left, Side::Right}) {
        ++stats.endpoint_proposed;
        if (free_endpoint_move(state, side, schedule.sigma_prop, ends)) ++stats.endpoint_accepted;
      }
    }
  }
}

void equilibrate(EnsembleState& state, const SweepSchedule& schedule, const RngStream& rng, std::size_t sweeps,
                 MoveStats* stats, std::uint64_t first_sweep) {
  MoveStats local;
  for (std::size_t s = 0; s < sweeps; ++s) gibbs_sweep(state, schedule, rng, first_sweep + s, local);
  if (stats) {
    stats->block_proposed += local.block_proposed;
    stats->block_accepted += local.block_accepted;
    stats->endpoint_proposed += local.endpoint_proposed;
    stats->endpoint_accepted += local.endpoint_accepted;
  }
}

namespace {

std::uint64_t fingerprint(const ChainConfig& c, const std::vector<Observable>& observables) {
  std::ostringstream text;
  text << c.lines << '|' << format_double(c.grid.ell()) << '|' << format_double(c.grid.r()) << '|'
       << c.grid.steps() << '|' << format_double(c.tilt.a()) << '|' << format_double(c.tilt.lambda()) << '|'
       << to_string(c.boundary.kind) << '|';
  for (double v : c.boundary.left) text << format_double(v) << ',';
  for (double v : c.boundary.right) text << format_double(v) << ',';
  const auto& s = c.schedule;
  text << '|' << s.blocks_per_sweep << '|' << s.max_block_depth << '|' << s.min_window << '|'
       << format_double(s.sigma_prop) << '|' << s.endpoint_moves << '|' << (c.burn_in ? *c.burn_in : 0) << '|'
       << c.min_burn_in << '|' << c.samples << '|' << c.thinning << '|' << c.seed << '|' << c.stream_id << '|'
       << (c.initial ? 1 : 0);
  for (const auto& o : observables) text << '|' << o.name;
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char ch : text.str()) h = splitmix64(h ^ static_cast<unsigned char>(ch));
  return h;
}

struct ChainProgress {
  std::size_t sweeps_done = 0;
  std::size_t burn_target = 0;
  bool burn_known = false;
  double iat = 0.0;
  std::vector<double> trace;
  std::vector<double> values;
  MoveStats moves;
};

void write_checkpoint(const std::filesystem::path& path, std::uint64_t print, const ChainProgress& p,
                      const EnsembleState& state) {
  std::ostringstream buf;
  BinaryWriter w(buf);
  w.str(kCheckpointMagic);
  w.u64(kCheckpointVersion);
  w.u64(print);
  w.u64(p.sweeps_done);
  w.u64(p.burn_target);
  w.u64(p.burn_known ? 1 : 0);
  w.f64(p.iat);
  w.f64s(p.trace);
  w.f64s(p.values);
  w.u64(p.moves.block_proposed);
  w.u64(p.moves.block_accepted);
  w.u64(p.moves.endpoint_proposed);
  w.u64(p.moves.endpoint_accepted);
  write_state(w, state);
  write_file_atomic(path, buf.str());
}

EnsembleState read_checkpoint(const std::filesystem::path& path, std::uint64_t print, ChainProgress& p) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  BinaryReader r(in);
  if (r.str() != kCheckpointMagic) throw Error("not a chain checkpoint: " + path.string());
  if (r.u64() != kCheckpointVersion) throw Error("unsupported checkpoint version");
  if (r.u64() != print) throw Error("checkpoint was written by a different configuration");
  p.sweeps_done = r.u64();
  p.burn_target = r.u64();
  p.burn_known = r.u64() != 0;
  p.iat = r.f64();
  p.trace = r.f64s();
  p.values = r.f64s();
  p.moves.block_proposed = r.u64();
  p.moves.block_accepted = r.u64();
  p.moves.endpoint_proposed = r.u64();
  p.moves.endpoint_accepted = r.u64();
  return read_state(r);
}

[[noreturn]] void invariant_abort(const ChainConfig& config, const EnsembleState& state, const OrderingReport& rep,
                                  std::size_t sweep) {
  std::filesystem::path dump =
      config.checkpoint_path.empty() ? std::filesystem::temp_directory_path() / "tle_invariant_dump.bin"
                                     : std::filesystem::path(config.checkpoint_path).replace_extension(".dump");
  try {
    save_state(dump, state);
  } catch (const std::exception&) {
    dump.clear();
  }
  std::ostringstream msg;
  msg << "ordering invariant violated after sweep " << sweep << ": " << rep.describe();
  if (!dump.empty()) msg << "; state dumped to " << dump.string();
  throw InvariantViolation(msg.str());
}

}  // namespace

SampleSet run_chain(const ChainConfig& config, const std::vector<Observable>& observables) {
  if (config.thinning == 0) throw PreconditionError("thinning must be positive");
  if (config.schedule.sigma_prop < 0.0) throw PreconditionError("sigma_prop must be non-negative");
  EnsembleState state = config.initial ? *config.initial
                                       : make_initial_state(config.grid, config.lines, config.tilt, config.boundary);
  if (const auto rep = check_ordering(state); !rep) {
    throw InvariantViolation("initial state violates the ordering constraints: " + rep.describe());
  }

  const RngStream rng(config.seed, config.stream_id);
  const std::uint64_t print = fingerprint(config, observables);
  const std::size_t mid = state.grid().steps() / 2;
  const std::size_t width = observables.size();

  ChainProgress p;
  if (config.burn_in) {
    p.burn_target = *config.burn_in;
    p.burn_known = true;
  } else {
    p.burn_target = config.min_burn_in;
  }
  if (config.resume && !config.checkpoint_path.empty() && std::filesystem::exists(config.checkpoint_path)) {
    state = read_checkpoint(config.checkpoint_path, print, p);
  }
  p.values.reserve(config.samples * width);

  auto recorded = [&] { return width == 0 ? 0 : p.values.size() / width; };
  auto total = [&] { return p.burn_target + config.samples * config.thinning; };

  while (!(p.burn_known && p.sweeps_done >= total())) {
    gibbs_sweep(state, config.schedule, rng, p.sweeps_done, p.moves);
    ++p.sweeps_done;

    if (p.sweeps_done % kOrderCheckInterval == 0) {
      if (const auto rep = check_ordering(state); !rep) invariant_abort(config, state, rep, p.sweeps_done);
    }
    if (!p.burn_known) {
      p.trace.push_back(state.height(0, mid));
      if (p.sweeps_done >= config.min_burn_in) {
        p.iat = stats::integrated_autocorr_time(p.trace);
        p.burn_target = std::max(config.min_burn_in, static_cast<std::size_t>(std::ceil(10.0 * p.iat)));
        p.burn_known = true;
        p.trace.clear();
        p.trace.shrink_to_fit();
      }
    }
    if (p.burn_known && p.sweeps_done > p.burn_target &&
        (p.sweeps_done - p.burn_target) % config.thinning == 0 && recorded() < config.samples) {
      for (const auto& o : observables) p.values.push_back(o.eval(state));
    }
    if (config.checkpoint_every > 0 && !config.checkpoint_path.empty() &&
        p.sweeps_done % config.checkpoint_every == 0) {
      write_checkpoint(config.checkpoint_path, print, p, state);
    }
  }
  if (const auto rep = check_ordering(state); !rep) invariant_abort(config, state, rep, p.sweeps_done);

  SampleSet out;
  for (const auto& o : observables) out.names.push_back(o.name);
  out.values = std::move(p.values);
  out.meta.seed = config.seed;
  out.meta.stream_id = config.stream_id;
  out.meta.burn_in = p.burn_target;
  out.meta.thinning = config.thinning;
  out.meta.sweeps = p.sweeps_done;
  out.meta.burn_in_iat = p.iat;
  out.meta.moves = p.moves;
  out.final_state = std::move(state);
  return out;
}

std::vector<SampleSet> run_chains(const std::vector<ChainConfig>& configs,
                                  const std::vector<Observable>& observables, std::size_t threads) {
  std::vector<SampleSet> out(configs.size());
  parallel_for(configs.size(), threads, [&](std::size_t k) { out[k] = run_chain(configs[k], observables); });
  return out;
}

}  // namespace tle
