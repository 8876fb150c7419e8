#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tle/errors.hpp"
#include "tle/model.hpp"
#include "tle/rng.hpp"

using namespace tle;

TEST(Grid, EndpointsExact) {
  GridInterval g(-3.7, 11.3, 997);
  EXPECT_EQ(g.time(0), -3.7);
  EXPECT_EQ(g.time(997), 11.3);
  for (std::size_t j = 1; j <= 997; ++j) EXPECT_LT(g.time(j - 1), g.time(j));
  EXPECT_DOUBLE_EQ(g.dt(), 15.0 / 997);
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(GridInterval(1.0, 1.0, 4), DomainError);
  EXPECT_THROW(GridInterval(0.0, 1.0, 0), DomainError);
}

TEST(Grid, WithSpacingAndSubGrid) {
  auto g = GridInterval::with_spacing(-20.0, 20.0, 0.05);
  EXPECT_EQ(g.steps(), 800u);
  EXPECT_EQ(g.nearest_index(0.0), 400u);
  auto s = g.sub_grid(100, 300);
  EXPECT_EQ(s.steps(), 200u);
  EXPECT_DOUBLE_EQ(s.ell(), g.time(100));
  EXPECT_DOUBLE_EQ(s.r(), g.time(300));
}

TEST(Tilt, Validation) {
  EXPECT_THROW(TiltParams(1.0, 1.0), DomainError);
  EXPECT_THROW(TiltParams(0.0, 2.0), DomainError);
  try {
    TiltParams(1.0, 0.5);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("lambda must exceed 1"), std::string::npos);
  }
  EXPECT_NO_THROW(TiltParams(0.0, 1.0, true));
  EXPECT_DOUBLE_EQ(TiltParams(1.5, 2.0).line_weight(3), 12.0);
}

TEST(Area, SpecExamples) {
  std::vector<double> c(9, 1.0);
  EXPECT_DOUBLE_EQ(area_functional(c, GridInterval(0, 2, 8)), 2.0);
  std::vector<double> tri{0, 1, 0};
  EXPECT_DOUBLE_EQ(area_functional(tri, GridInterval(0, 1, 2)), 0.5);
  std::vector<double> p{0, 0.3, 0.8, 0.1, 0};
  // 0.25 * (0.3 + 0.8 + 0.1); the endpoints carry half weight and are zero.
  EXPECT_NEAR(area_functional(p, GridInterval(0, 1, 4)), 0.3, 1e-15);
  EXPECT_THROW(area_functional(p, GridInterval(0, 1, 3)), DimensionError);
}

TEST(Area, ExactForPiecewiseLinear) {
  // A broken line sampled at its kinks integrates exactly.
  std::vector<double> p{1.0, 3.0, 2.0, 2.0, 0.5};
  const double exact = 0.25 * (2.0 + 2.5 + 2.0 + 1.25);
  EXPECT_NEAR(area_functional(p, GridInterval(0, 1, 4)), exact, 1e-15);
}

TEST(Area, LinearityProperty) {
  RngStream rng(5, 0);
  GridInterval g(-1, 2, 37);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> f(g.points()), h(g.points()), comb(g.points());
    const double al = rng.normal(), be = rng.normal();
    for (std::size_t j = 0; j < g.points(); ++j) {
      f[j] = rng.normal();
      h[j] = rng.normal();
      comb[j] = al * f[j] + be * h[j];
    }
    EXPECT_NEAR(area_functional(comb, g), al * area_functional(f, g) + be * area_functional(h, g), 1e-12);
  }
}

TEST(Area, CompensatedOnHugeGrid) {
  GridInterval g(0.0, 1.0, 2'000'000);
  std::vector<double> p(g.points(), 0.1);
  EXPECT_NEAR(area_functional(p, g), 0.1, 1e-15);
}

namespace {

EnsembleState constant_state(std::size_t n, std::vector<double> levels, GridInterval g, TiltParams tilt) {
  EnsembleState s(g, n, tilt, BoundarySpec::free());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < g.points(); ++j) s.height(i, j) = levels[i];
  return s;
}

}  // namespace

TEST(TiltWeight, SpecExamples) {
  auto s1 = constant_state(1, {1.0}, GridInterval(0, 2, 10), TiltParams(1.0, 2.0));
  EXPECT_DOUBLE_EQ(tilt_log_weight(s1), -2.0);
  auto s2 = constant_state(2, {1.0, 1.0}, GridInterval(0, 1, 10), TiltParams(1.0, 2.0));
  EXPECT_DOUBLE_EQ(tilt_log_weight(s2), -3.0);
  auto s3 = constant_state(3, {1.0, 1.0, 1.0}, GridInterval(0, 1, 10), TiltParams(1.0, 1.0, true));
  EXPECT_DOUBLE_EQ(tilt_log_weight(s3), -3.0);
}

TEST(TiltWeight, DecreasesUnderUpwardShift) {
  auto s = constant_state(3, {3.0, 2.0, 1.0}, GridInterval(0, 1, 10), TiltParams(0.7, 2.0));
  const double base = tilt_log_weight(s);
  for (std::size_t i = 0; i < 3; ++i) {
    auto t = s;
    for (double& v : t.path(i)) v += 0.01;
    EXPECT_LT(tilt_log_weight(t), base);
  }
}

TEST(BridgeMass, SpecExamples) {
  std::vector<double> z1{0.0}, z2{0.0, 0.0}, one{1.0};
  EXPECT_NEAR(gaussian_bridge_mass(z1, z1, 1.0), 0.3989422804, 1e-10);
  EXPECT_NEAR(gaussian_bridge_mass(z2, z2, 1.0), 0.1591549431, 1e-10);
  EXPECT_NEAR(gaussian_bridge_mass(z1, one, 0.5), 0.2075537487, 1e-10);
  EXPECT_THROW(gaussian_bridge_mass(z1, one, 0.0), DomainError);
}

TEST(BridgeMass, SymmetricAndPeakedAtDiagonal) {
  RngStream rng(9, 0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x{rng.normal(), rng.normal()}, y{rng.normal(), rng.normal()};
    const double d = 0.1 + rng.uniform();
    EXPECT_DOUBLE_EQ(gaussian_bridge_mass(x, y, d), gaussian_bridge_mass(y, x, d));
    EXPECT_LE(gaussian_bridge_mass(x, y, d), gaussian_bridge_mass(x, x, d));
  }
}

TEST(Ordering, SpecExamples) {
  GridInterval g(0, 1, 4);
  auto ok = constant_state(2, {2.0, 1.0}, g, TiltParams(1, 2));
  EXPECT_TRUE(check_ordering(ok).ok);

  auto tie = ok;
  tie.height(1, 2) = 2.0;
  auto rep = check_ordering(tie);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.kind, OrderingReport::Kind::LineOrder);
  EXPECT_EQ(rep.index, 2u);
  EXPECT_EQ(rep.line, 0u);

  auto touch = constant_state(1, {1.0}, g, TiltParams(1, 2));
  touch.height(0, 3) = 0.0;
  rep = check_ordering(touch);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.kind, OrderingReport::Kind::Floor);
}

TEST(Ordering, ZeroBoundaryAllowsTiesAtEnds) {
  auto s = make_initial_state(GridInterval(0, 1, 10), 3, TiltParams(1, 2), BoundarySpec::zero());
  EXPECT_TRUE(check_ordering(s).ok);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(s.height(i, 0), 0.0);
    EXPECT_EQ(s.height(i, 10), 0.0);
  }
  s.height(0, 0) = 0.1;
  EXPECT_EQ(check_ordering(s).kind, OrderingReport::Kind::Boundary);
}

TEST(Ordering, ShiftInvariance) {
  RngStream rng(3, 0);
  GridInterval g(0, 1, 12);
  for (int rep = 0; rep < 200; ++rep) {
    EnsembleState s(g, 2, TiltParams(1, 2), BoundarySpec::free());
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < g.points(); ++j) s.height(i, j) = 2.0 * rng.uniform();
    const bool before = check_ordering(s).ok;
    const double c = 5.0 * rng.normal();
    auto t = s;
    for (double& v : t.heights()) v += c;
    std::vector<double> fl(g.points(), c), ce(g.points(), std::numeric_limits<double>::infinity());
    t.set_floor(fl);
    t.set_ceiling(ce);
    EXPECT_EQ(before, check_ordering(t).ok);
  }
}

TEST(Ordering, FeasibleFillRespectsConstraints) {
  GridInterval g(-2, 2, 40);
  EnsembleState s(g, 4, TiltParams(1, 2), BoundarySpec::fixed({4, 3, 2, 1}, {0.4, 0.3, 0.2, 0.1}));
  std::vector<double> ceil(g.points(), 5.0);
  s.set_ceiling(ceil);
  s.constrain_site(0, 20, 0.0, 0.5);
  fill_feasible_heights(s);
  EXPECT_TRUE(check_ordering(s).ok) << check_ordering(s).describe();
  EXPECT_LT(s.height(0, 20), 0.5);
}

TEST(Ordering, DominatedBy) {
  GridInterval g(0, 1, 4);
  auto lo = constant_state(2, {2.0, 1.0}, g, TiltParams(1, 2));
  auto hi = constant_state(2, {2.5, 1.0}, g, TiltParams(1, 2));
  EXPECT_TRUE(dominated_by(lo, hi));
  EXPECT_FALSE(dominated_by(hi, lo));
}

TEST(State, NoLinesRejected) {
  EXPECT_THROW(EnsembleState(GridInterval(0, 1, 4), 0, TiltParams(1, 2), BoundarySpec::zero()), DomainError);
}
