// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.
//
//   acceptance [--threads N] [--only 3,5,11]

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "tle/airy.hpp"
#include "tle/config.hpp"
#include "tle/coupling.hpp"
#include "tle/estimators.hpp"
#include "tle/experiments.hpp"
#include "tle/fs.hpp"
#include "tle/gibbs.hpp"
#include "tle/oracle.hpp"
#include "tle/parallel.hpp"
#include "tle/stats.hpp"

using namespace tle;
namespace fs = std::filesystem;

namespace {

const double kC0 = 2.0 * std::sqrt(2.0) / 3.0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::size_t g_threads = 1;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1

Verdict oracle_equivalence() {
  const GridInterval g(0, 1, 3);
  ChainConfig c;
  c.lines = 1;
  c.grid = g;
  c.tilt = TiltParams(1, 2);
  c.boundary = BoundarySpec::zero();
  c.burn_in = 1000;
  c.samples = 1'000'000;
  c.seed = 101;
  const auto out = run_chain(c, {observe_height_at_index(0, 1), observe_height_at_index(0, 2)});
  const auto t = exact_small_grid_marginal(1, g, c.tilt, c.boundary);
  const double tv1 = total_variation(t, 0, out.column(0));
  const double tv2 = total_variation(t, 1, out.column(1));
  return {tv1 < 0.02 && tv2 < 0.02,
          fmt("TV over %zu bins: %.4f, %.4f (limit 0.02)", t.edges.size() - 1, tv1, tv2)};
}

// ---------------------------------------------------------------- 2

// Root of the Maclaurin series by bisection, independent of the table.
double series_first_zero() {
  double lo = -2.5, hi = -2.2;
  for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
    const double mid = 0.5 * (lo + hi);
    double a, ap;
    airy_maclaurin(mid, a, ap);
    if (a > 0) hi = mid;
    else lo = mid;
  }
  return -0.5 * (lo + hi);
}

Verdict airy_numerics() {
  double a0, ap0;
  airy_maclaurin(0.0, a0, ap0);
  const double ai0 = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
  const double aip0 = -std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0);
  const double e_ai = std::max(std::abs(airy_ai(0.0) - a0), std::abs(airy_ai(0.0) - ai0));
  const double e_aip = std::max(std::abs(airy_ai_prime(0.0) - ap0), std::abs(airy_ai_prime(0.0) - aip0));
  const double e_w = std::abs(airy_first_zero() - series_first_zero());

  // Ai'' from a central difference of Ai', against x Ai, scaled by the size
  // of the terms so the zero of x Ai at the origin is harmless.
  double worst = 0.0;
  const double h = 1e-5;
  for (int k = 0; k <= 700; ++k) {
    const double x = -2.0 + 0.01 * k;
    const double d2 = (airy_ai_prime(x + h) - airy_ai_prime(x - h)) / (2 * h);
    worst = std::max(worst, std::abs(d2 - x * airy_ai(x)) / ((1 + std::abs(x)) * std::abs(airy_ai(x))));
  }
  const bool pass = e_ai < 1e-9 && e_aip < 1e-9 && e_w < 1e-9 && worst < 1e-6;
  return {pass, fmt("|dAi(0)| %.1e, |dAi'(0)| %.1e, |d omega1| %.1e (limit 1e-9); ODE residual %.1e (limit 1e-6)",
                    e_ai, e_aip, e_w, worst)};
}

// ---------------------------------------------------------------- 3, 4

TailFit g_fs_fit;

Verdict fs_upper_tail() {
  const auto x = fs_sample_many(1'000'000, RngStream(103, 0));
  g_fs_fit = fit_upper_tail(x);
  TailFitOptions iv;
  iv.weighting = TailWeighting::InverseVariance;
  const double c_iv = fit_upper_tail(x, iv).c_hat;
  const double rel = std::abs(g_fs_fit.c_hat - kC0) / kC0;
  return {rel < 0.15, fmt("c = %.4f (se %.4f), %.1f%% off 0.9428 (limit 15%%); inverse-variance weights give %.4f",
                          g_fs_fit.c_hat, g_fs_fit.se, 100 * rel, c_iv)};
}

Verdict fs_lower_tail_check() {
  double lo = 1e300, hi = 0;
  std::string parts;
  for (double e : {0.1, 0.2, 0.4}) {
    const double r = fs_lower_tail(e) / (e * e * e);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    parts += fmt(" %.4f", r);
  }
  return {hi / lo < 2.0, fmt("P(Y<=eps)/eps^3 =%s, spread %.3f (limit 2)", parts.c_str(), hi / lo)};
}

// ---------------------------------------------------------------- 5

Verdict le_upper_tail() {
  if (g_fs_fit.c_hat == 0.0) fs_upper_tail();
  ChainConfig c;
  c.lines = 4;
  c.grid = GridInterval::with_spacing(-20, 20, 0.05);
  c.tilt = TiltParams(1, 2);
  c.boundary = BoundarySpec::zero();
  c.schedule.blocks_per_sweep = 16;
  c.schedule.max_block_depth = 2;
  c.min_burn_in = 20'000;
  c.samples = 200'000;
  c.thinning = 2;
  c.seed = 105;
  const auto set = run_chain(c, {observe_height(0, 0.0, c.grid)});
  const auto x = set.column(0);
  TailFitOptions o;
  o.effective_samples = x.size() / stats::integrated_autocorr_time(x);
  const auto fit = fit_upper_tail(x, o);
  const double rel = std::abs(fit.c_hat - kC0) / kC0;
  const double floor = g_fs_fit.c_hat - std::hypot(fit.se, g_fs_fit.se);
  const bool pass = rel < 0.20 && fit.c_hat >= floor;
  return {pass, fmt("c = %.4f (se %.4f), %.1f%% off 0.9428 (limit 20%%); FS fit %.4f, floor %.4f; "
                    "mean X1(0) %.3f, P(X1(0) > 1.5) %.3f",
                    fit.c_hat, fit.se, 100 * rel, g_fs_fit.c_hat, floor, stats::mean(x),
                    fit.exceedances.empty() ? 0.0 : double(fit.exceedances.front()) / double(x.size()))};
}

// ---------------------------------------------------------------- 6

Verdict confinement() {
  const double lambda = 2.0;
  ChainConfig c;
  c.lines = 6;
  // The lattice wall correction (about 0.58 sqrt(dt) per gap) weighs most on
  // the deep lines, so this runs at a finer step than the other chains.
  c.grid = GridInterval::with_spacing(-10, 10, 0.01);
  c.tilt = TiltParams(1, lambda);
  c.boundary = BoundarySpec::zero();
  c.schedule.blocks_per_sweep = 16;
  c.schedule.max_block_depth = 2;
  c.min_burn_in = 20'000;
  c.samples = 20'000;
  c.thinning = 5;
  c.seed = 106;
  std::vector<Observable> obs;
  for (std::size_t k = 0; k < 4; ++k) obs.push_back(observe_height(k, 0.0, c.grid));
  const auto set = run_chain(c, obs);
  double lo = 1e300, hi = 0;
  std::string parts;
  for (std::size_t k = 0; k < 4; ++k) {
    const double v = std::pow(lambda, k / 3.0) * stats::mean(set.column(k));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    parts += fmt(" %.3f", v);
  }
  return {hi / lo < 2.0, fmt("lambda^{k/3} E[X^{k+1}(0)] =%s, spread %.3f (limit 2)", parts.c_str(), hi / lo)};
}

// ---------------------------------------------------------------- 7

Verdict monotone_coupling() {
  RngStream pick(107, 0);
  std::uint64_t falsified = 0, snaps = 0, sweeps = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + pick.next_u64() % 3;
    const std::size_t m = 4 + pick.next_u64() % 40;
    const double T = 0.5 + 3.0 * pick.uniform();
    const TiltParams tilt(0.2 + 2.0 * pick.uniform(), 1.2 + 3.0 * pick.uniform());
    const GridInterval g(-T, T, m);
    const int kinds = static_cast<int>(pick.next_u64() % 3);
    const BoundarySpec lb = kinds == 1 ? BoundarySpec::free() : BoundarySpec::zero();
    const BoundarySpec hb = kinds == 0 ? BoundarySpec::zero() : BoundarySpec::free();
    EnsembleState x = make_initial_state(g, n, tilt, lb), y = make_initial_state(g, n, tilt, hb);
    equilibrate(x, SweepSchedule{}, RngStream(1000 + trial, 0), 50);
    equilibrate(y, SweepSchedule{}, RngStream(2000 + trial, 0), 50);
    CoupledPair pair(std::move(x), std::move(y), RngStream(3000 + trial, 0));
    order_pair(pair);
    if (!pair.order_certificate) ++falsified;
    for (int k = 0; k < 100'000; ++k) {
      monotone_coupled_sweep(pair);
      ++sweeps;
    }
    falsified += pair.falsified_sweeps;
    snaps += pair.rounding_snaps;
  }
  return {falsified == 0, fmt("%llu coupled sweeps over 100 pairs, %llu falsified, %llu rounding snaps",
                              (unsigned long long)sweeps, (unsigned long long)falsified,
                              (unsigned long long)snaps)};
}

// ---------------------------------------------------------------- 8

Verdict reverse_coupling() {
  ReverseCouplingParams p;
  p.lines = 2;
  p.dt = 0.1;
  p.u = 1.5;
  p.schedule.blocks_per_sweep = 16;
  p.schedule.max_block_depth = 2;
  p.equilibration_sweeps = 2000;
  p.coupled_sweeps = 1000;
  const std::size_t trials = 200;
  std::size_t wins[2] = {0, 0};
  const double Ts[2] = {10.0, 40.0};
  for (int s = 0; s < 2; ++s) {
    p.T = Ts[s];
    std::vector<char> ok(trials, 0);
    parallel_for(trials, g_threads, [&](std::size_t k) {
      ok[k] = reverse_coupling_experiment(p, RngStream(108, s), k).success;
    });
    for (char v : ok) wins[s] += v;
  }
  const double p10 = double(wins[0]) / trials, p40 = double(wins[1]) / trials;
  const double pool = double(wins[0] + wins[1]) / (2.0 * trials);
  const double se = std::sqrt(pool * (1 - pool) * 2.0 / trials);
  const double z = se > 0 ? (p40 - p10) / se : 0.0;
  return {z > stats::z_quantile(0.95),
          fmt("u = 1.5: success %zu/200 at T=10, %zu/200 at T=40, one-sided z = %.2f (need > 1.645)", wins[0],
              wins[1], z)};
}

// ---------------------------------------------------------------- 9

Verdict scaling() {
  ScalingParams p;
  p.samples = 10'000;
  p.seed = 109;
  p.threads = g_threads;
  const auto r = scaling_check(p);
  return {r.ks.p_value > 0.01 && r.control.p_value < 1e-3,
          fmt("KS p = %.3f (need > 0.01); wrong exponent p = %.1e (need < 1e-3); means %.4f vs %.4f",
              r.ks.p_value, r.control.p_value, r.mean_direct, r.mean_mapped)};
}

// ---------------------------------------------------------------- 10

Verdict free_vs_zero() {
  FreeZeroParams p;
  p.lines = 2;
  p.T = {10.0, 40.0};
  p.seed = 110;
  p.threads = g_threads;
  const auto rows = free_vs_zero_convergence(p);
  bool dominated = true;
  std::string parts;
  for (const auto& r : rows) {
    dominated = dominated && r.gap1 >= -4 * r.se1 && r.gap2 >= -4 * r.se2;
    parts += fmt(" T=%g: gap %.3e (se %.1e), min diff %.1e;", r.T, r.gap1, r.se1, r.min_diff);
  }
  const bool decreasing = significantly_less(rows[1].gap1, rows[1].se1, rows[0].gap1, rows[0].se1);
  return {dominated && decreasing, fmt("%s domination %s, decrease %s", parts.c_str(), dominated ? "yes" : "no",
                                       decreasing ? "yes" : "no")};
}

// ---------------------------------------------------------------- 11

Verdict entropic_repulsion() {
  // Both slopes are taken at the same dt / eps^2 so the lattice correction
  // near the wall, a function of sqrt(dt) / eps, is matched.
  const double kappa = 0.025, h = 0.03;
  ConditionedSlopeParams p;
  p.lines = 4;
  p.T = 1.0;
  p.tilt = TiltParams(1, 2);
  p.h = h;
  p.schedule.blocks_per_sweep = 16;
  p.schedule.max_block_depth = 2;
  p.samples = 8000;
  p.thinning = 10;
  p.min_burn_in = 4000;
  p.seed = 111;
  LocalSlope s[2];
  const double eps[2] = {0.1, 0.4};
  for (int k = 0; k < 2; ++k) {
    p.eps = eps[k];
    p.dt = kappa * eps[k] * eps[k];
    p.stream_id = k;
    s[k] = conditioned_top_line_slope(p);
  }
  const bool steeper = significantly_less(s[1].slope, s[1].slope_se, s[0].slope, s[0].slope_se);
  const double f1 = fs_local_log_slope(0.1, h), f4 = fs_local_log_slope(0.4, h);
  const bool flat = std::abs(f1 - 3) < 0.6 && std::abs(f4 - 3) < 0.6;
  return {steeper && flat,
          fmt("slope %.2f (se %.2f) at 0.1 vs %.2f (se %.2f) at 0.4, steeper %s; FS control %.3f, %.3f (3 +- 20%%)",
              s[0].slope, s[0].slope_se, s[1].slope, s[1].slope_se, steeper ? "yes" : "no", f1, f4)};
}

// ---------------------------------------------------------------- 12

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "tle_acceptance_determinism";
  fs::remove_all(root);
  std::string parts;
  bool same = true;
  const char* configs[] = {
      "experiment = sample\nn = 3\nT = 4\ndt = 0.1\nsamples = 500\nthinning = 5\nmin_burn_in = 1000\n",
      "experiment = couple\nn = 2\nT = 6\ndt = 0.1\nu = 1.5\ntrials = 8\nequilibration_sweeps = 200\n"
      "coupled_sweeps = 100\n",
      "experiment = scaling\nn = 2\nT = 4\ndt = 0.1\nsamples = 300\nthinning = 5\nmin_burn_in = 500\n",
  };
  for (const char* text : configs) {
    ExperimentConfig c = parse_config(text);
    std::string first;
    for (int run = 0; run < 3; ++run) {
      c.output_dir = (root / (to_string(c.experiment) + std::to_string(run))).string();
      run_experiment(c, {run == 2 ? std::size_t{4} : std::size_t{1}, false});
      const auto body = slurp(fs::path(c.output_dir) / "results.csv");
      if (run == 0) first = body;
      else same = same && body == first && !body.empty();
    }
    parts += " " + to_string(c.experiment);
  }
  fs::remove_all(root);
  return {same, fmt("results.csv byte-identical over 2 runs and --threads 1/4 for%s", parts.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  app.add_option("--threads", g_threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"exact oracle equivalence", oracle_equivalence},
      {"Airy numerics", airy_numerics},
      {"FS upper tail", fs_upper_tail},
      {"FS lower tail", fs_lower_tail_check},
      {"LE upper tail", le_upper_tail},
      {"confinement", confinement},
      {"monotone coupling", monotone_coupling},
      {"reverse coupling", reverse_coupling},
      {"scaling identity", scaling},
      {"free vs zero convergence", free_vs_zero},
      {"entropic repulsion", entropic_repulsion},
      {"determinism", determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failed = 0;
  for (int k = 0; k < 12; ++k) {
    if (!selected.empty() && !selected.count(k + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::printf("%-2d %-26s %s  %s [%.1f s]\n", k + 1, criteria[k].first, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
