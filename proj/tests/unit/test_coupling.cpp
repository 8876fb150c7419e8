#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tle/coupling.hpp"
#include "tle/errors.hpp"
#include "tle/gibbs.hpp"
#include "tle/stats.hpp"

using namespace tle;

namespace {

EnsembleState equilibrated(const GridInterval& g, std::size_t n, const TiltParams& tilt, const BoundarySpec& b,
                           std::uint64_t seed, std::size_t sweeps = 200) {
  EnsembleState s = make_initial_state(g, n, tilt, b);
  equilibrate(s, SweepSchedule{}, RngStream(seed, 0), sweeps);
  return s;
}

EnsembleState with_bottom(const GridInterval& g, const std::vector<double>& bottom) {
  EnsembleState s(g, 1, TiltParams(1, 2), BoundarySpec::zero());
  for (std::size_t j = 1; j + 1 < g.points(); ++j) s.height(0, j) = bottom[j];
  return s;
}

}  // namespace

TEST(Coupling, DiagonalStaysDiagonal) {
  GridInterval g(-2, 2, 40);
  const auto s = equilibrated(g, 2, TiltParams(1, 2), BoundarySpec::free(), 1);
  CoupledPair pair(s, s, RngStream(2, 0));
  for (int k = 0; k < 500; ++k) monotone_coupled_sweep(pair);
  EXPECT_TRUE(pair.low == pair.high);
  EXPECT_EQ(pair.falsified_sweeps, 0u);
}

TEST(Coupling, ShiftedFixedBoundaryStaysAbove) {
  GridInterval g(-1, 1, 20);
  const TiltParams tilt(1, 2);
  const auto low = equilibrated(g, 2, tilt, BoundarySpec::zero(), 3);
  const double c = 0.7;
  EnsembleState high(g, 2, tilt, BoundarySpec::fixed({c + 0.2, c}, {c + 0.2, c}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 1; j < g.steps(); ++j) high.height(i, j) = low.height(i, j) + c + (i == 0 ? 0.2 : 0.0);
  ASSERT_TRUE(check_ordering(high).ok);
  CoupledPair pair(low, high, RngStream(4, 0));
  ASSERT_TRUE(pair.order_certificate);
  for (int k = 0; k < 100000; ++k) {
    monotone_coupled_sweep(pair);
    ASSERT_TRUE(pair.order_certificate) << "sweep " << k;
  }
}

TEST(Coupling, HigherFloorStaysAbove) {
  GridInterval g(0, 2, 20);
  const TiltParams tilt(0.0, 1.0, true);
  EnsembleState low(g, 1, tilt, BoundarySpec::fixed({1.5}, {1.5}));
  EnsembleState high = low;
  high.set_floor(std::vector<double>(g.points(), 1.0));
  fill_feasible_heights(low);
  fill_feasible_heights(high);
  CoupledPair pair(low, high, RngStream(5, 0));
  order_pair(pair);
  ASSERT_TRUE(pair.order_certificate);
  for (int k = 0; k < 5000; ++k) {
    monotone_coupled_sweep(pair);
    ASSERT_TRUE(pair.order_certificate);
  }
}

TEST(Coupling, MismatchedShapesRejected) {
  const TiltParams tilt(1, 2);
  auto a = make_initial_state(GridInterval(0, 1, 10), 1, tilt, BoundarySpec::zero());
  auto b = make_initial_state(GridInterval(0, 1, 12), 1, tilt, BoundarySpec::zero());
  auto c = make_initial_state(GridInterval(0, 1, 10), 1, TiltParams(2, 2), BoundarySpec::zero());
  EXPECT_THROW(CoupledPair(a, b, RngStream(1, 0)), PreconditionError);
  EXPECT_THROW(CoupledPair(a, c, RngStream(1, 0)), PreconditionError);
}

TEST(Coupling, RandomOrderedPairsNeverFalsify) {
  RngStream pick(6, 0);
  std::uint64_t snaps = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + pick.next_u64() % 3;
    const std::size_t m = 4 + pick.next_u64() % 40;
    const double T = 0.5 + 3.0 * pick.uniform();
    const TiltParams tilt(0.2 + 2.0 * pick.uniform(), 1.2 + 3.0 * pick.uniform());
    const GridInterval g(-T, T, m);
    const int kinds = static_cast<int>(pick.next_u64() % 3);
    const BoundarySpec lb = kinds == 1 ? BoundarySpec::free() : BoundarySpec::zero();
    const BoundarySpec hb = kinds == 0 ? BoundarySpec::zero() : BoundarySpec::free();
    auto x = equilibrated(g, n, tilt, lb, 100 + trial, 50);
    auto y = equilibrated(g, n, tilt, hb, 200 + trial, 50);
    CoupledPair pair(std::move(x), std::move(y), RngStream(300 + trial, 0));
    order_pair(pair);
    ASSERT_TRUE(pair.order_certificate) << "trial " << trial;
    for (int k = 0; k < 1000; ++k) {
      monotone_coupled_sweep(pair);
      ASSERT_TRUE(pair.order_certificate) << "trial " << trial << " sweep " << k;
    }
    snaps += pair.rounding_snaps;
    EXPECT_LT(pair.max_snap, 1e-9 * 10);
  }
  RecordProperty("rounding_snaps", static_cast<int>(snaps));
}

TEST(Coupling, ComponentHasUncoupledLaw) {
  GridInterval g(-2, 2, 40);
  const TiltParams tilt(1, 2);
  CoupledPair pair(make_initial_state(g, 1, tilt, BoundarySpec::zero()),
                   make_initial_state(g, 1, tilt, BoundarySpec::free()), RngStream(7, 0));
  order_pair(pair);
  std::vector<double> coupled;
  for (int k = 0; k < 1000; ++k) monotone_coupled_sweep(pair);
  for (int s = 0; s < 3000; ++s) {
    for (int k = 0; k < 40; ++k) monotone_coupled_sweep(pair);
    coupled.push_back(pair.low.height(0, 20));
  }
  ChainConfig cfg;
  cfg.grid = g;
  cfg.tilt = tilt;
  cfg.burn_in = 1000;
  cfg.samples = 3000;
  cfg.thinning = 40;
  cfg.seed = 8;
  const auto plain = run_chain(cfg, {observe_height_at_index(0, 20)}).column(0);
  EXPECT_GT(stats::ks_two_sample(coupled, plain).p_value, 0.01);
}

TEST(StoppingDomain, Examples) {
  GridInterval g(-1, 1, 10);
  const double u = 0.5;
  auto d = detect_stopping_domain(with_bottom(g, std::vector<double>(11, u + 1)), u);
  EXPECT_TRUE(d.found);
  EXPECT_EQ(d.tau_ell, 1u);
  EXPECT_EQ(d.tau_r, 9u);
  EXPECT_FALSE(detect_stopping_domain(with_bottom(g, std::vector<double>(11, u - 0.4)), u).found);
  std::vector<double> one(11, 0.1);
  one[4] = u;
  d = detect_stopping_domain(with_bottom(g, one), u);
  EXPECT_EQ(d.tau_ell, 4u);
  EXPECT_EQ(d.tau_r, 4u);
  EXPECT_FALSE(d.found);
}

TEST(StoppingDomain, IsAStoppingRule) {
  // Values strictly between the two times cannot move them.
  GridInterval g(-5, 5, 100);
  const auto s = equilibrated(g, 2, TiltParams(1, 2), BoundarySpec::zero(), 9);
  RngStream r(10, 0);
  for (double u : {0.05, 0.2, 0.5}) {
    const auto d = detect_stopping_domain(s, u);
    if (!d.found) continue;
    EnsembleState t = s;
    for (std::size_t j = d.tau_ell + 1; j < d.tau_r; ++j) t.height(1, j) = 10.0 * r.uniform();
    const auto e = detect_stopping_domain(t, u);
    EXPECT_EQ(e.tau_ell, d.tau_ell);
    EXPECT_EQ(e.tau_r, d.tau_r);
  }
}

TEST(ReverseCoupling, TinyThresholdFailsEventA) {
  ReverseCouplingParams p;
  p.T = 4;
  p.dt = 0.1;
  p.u = 1e-6;
  p.equilibration_sweeps = 200;
  const auto t = reverse_coupling_experiment(p, RngStream(11, 0), 0);
  EXPECT_FALSE(t.event_a && t.event_b);
  EXPECT_FALSE(t.success);
}

TEST(ReverseCoupling, SuccessMeansOrderedOnMiddleHalf) {
  ReverseCouplingParams p;
  p.T = 20;
  p.dt = 0.1;
  p.u = 1.5;
  p.equilibration_sweeps = 500;
  p.coupled_sweeps = 300;
  int successes = 0;
  for (std::size_t k = 0; k < 60; ++k) {
    const auto t = reverse_coupling_experiment(p, RngStream(12, 0), k);
    if (!t.success) continue;
    ++successes;
    const auto& g = t.free_sample.grid();
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = g.nearest_index(-10); j <= g.nearest_index(10); ++j)
        ASSERT_LE(t.free_sample.height(i, j), t.zero_sample.height(i, j));
  }
  EXPECT_GT(successes, 0);
}

TEST(ReverseCoupling, Deterministic) {
  ReverseCouplingParams p;
  p.T = 4;
  p.u = 0.5;
  p.equilibration_sweeps = 300;
  p.coupled_sweeps = 100;
  const auto a = reverse_coupling_experiment(p, RngStream(13, 0), 5);
  const auto b = reverse_coupling_experiment(p, RngStream(13, 0), 5);
  EXPECT_TRUE(a.free_sample == b.free_sample);
  EXPECT_TRUE(a.zero_sample == b.zero_sample);
  std::ostringstream row;
  write_coupling_csv_row(row, p, a);
  EXPECT_EQ(row.str().rfind("5,4,2,0.5,", 0), 0u);
}

TEST(Pinned, PinsAreZero) {
  PinnedParams p;
  p.T = 4;
  p.equilibration_sweeps = 200;
  const auto s = pinned_ensemble_sample(p, RngStream(14, 0));
  const auto& g = s.grid();
  for (double t : {-2.0, 0.0, 2.0}) {
    const std::size_t j = g.nearest_index(t);
    EXPECT_TRUE(s.is_pinned(j));
    for (std::size_t i = 0; i < p.lines; ++i) EXPECT_EQ(s.height(i, j), 0.0);
  }
  EXPECT_TRUE(check_ordering(s).ok);
  EXPECT_THROW(pinned_template(PinnedParams{2, 1.0, 0.05, 2.0}), PreconditionError);
}

TEST(Pinned, BlocksIndependent) {
  PinnedParams p;
  p.T = 2;
  p.equilibration_sweeps = 100;
  std::vector<double> left, right;
  for (std::size_t k = 0; k < 400; ++k) {
    const auto s = pinned_ensemble_sample(p, RngStream(15, k));
    left.push_back(s.height(0, s.grid().nearest_index(-1.0)));
    right.push_back(s.height(0, s.grid().nearest_index(1.0)));
  }
  const double ml = stats::mean(left), mr = stats::mean(right);
  double c = 0, vl = 0, vr = 0;
  for (std::size_t k = 0; k < left.size(); ++k) {
    c += (left[k] - ml) * (right[k] - mr);
    vl += (left[k] - ml) * (left[k] - ml);
    vr += (right[k] - mr) * (right[k] - mr);
  }
  EXPECT_LT(std::abs(c / std::sqrt(vl * vr)), 4.0 / std::sqrt(400.0));
}

TEST(Pinned, DominatedByUnpinned) {
  PinnedParams p;
  p.T = 4;
  p.equilibration_sweeps = 300;
  const auto pinned = pinned_ensemble_sample(p, RngStream(16, 0));
  const auto free = equilibrated(pinned.grid(), p.lines, p.tilt, BoundarySpec::zero(), 17, 300);
  CoupledPair pair(pinned, free, RngStream(18, 0));
  order_pair(pair);
  ASSERT_TRUE(pair.order_certificate);
  for (int k = 0; k < 2000; ++k) {
    monotone_coupled_sweep(pair);
    ASSERT_TRUE(pair.order_certificate);
  }
}

TEST(PinnedExceedance, Limits) {
  ExceedanceParams p;
  p.samples = 2000;
  p.min_burn_in = 500;
  p.v = 1e-3;
  EXPECT_GT(estimate_pinned_exceedance(p).p, 0.99);
  p.v = 1.0;
  const auto e = estimate_pinned_exceedance(p);
  EXPECT_GT(e.lo, 0.0);
  EXPECT_LT(e.hi, 1.0);
}

TEST(PinnedExceedance, DecreasesInKAndV) {
  ExceedanceParams p;
  p.samples = 2000;
  p.min_burn_in = 500;
  // ratio[v][k] = -log p_k(v) / (k v^2); the bound log p >= -C k v^2 asks for
  // it to stay bounded, in particular not to grow with k.
  double ratio[2][3], se[2][3];
  double prev_k = 1.0;
  for (std::size_t k = 1; k <= 3; ++k) {
    p.lines = k;
    p.v = 1.0;
    const auto one = estimate_pinned_exceedance(p);
    p.v = 2.0;
    const auto two = estimate_pinned_exceedance(p);
    EXPECT_LT(two.log_p, one.log_p);
    EXPECT_LT(one.log_p, std::log(prev_k) + 3 * one.log_se);
    prev_k = one.p;
    ratio[0][k - 1] = -one.log_p / k;
    se[0][k - 1] = one.log_se / k;
    ratio[1][k - 1] = -two.log_p / (4.0 * k);
    se[1][k - 1] = two.log_se / (4.0 * k);
  }
  for (int v = 0; v < 2; ++v) {
    for (int k = 1; k < 3; ++k) {
      EXPECT_LT(ratio[v][k], ratio[v][0] + 2 * std::hypot(se[v][k], se[v][0])) << "v index " << v << " k " << k + 1;
    }
  }
}
