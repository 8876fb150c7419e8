#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tle/bridge.hpp"
#include "tle/errors.hpp"
#include "tle/stats.hpp"

using namespace tle;

TEST(BridgeConditional, SpecExamples) {
  auto a = bridge_point_conditional(0, 0, 1, 0, 0.5);
  EXPECT_DOUBLE_EQ(a.mean, 0.0);
  EXPECT_DOUBLE_EQ(a.variance, 0.25);
  auto b = bridge_point_conditional(0, 1, 4, 3, 2);
  EXPECT_DOUBLE_EQ(b.mean, 2.0);
  EXPECT_DOUBLE_EQ(b.variance, 1.0);
  auto c = bridge_point_conditional(0, 1.5, 1, 7, 1e-12);
  EXPECT_NEAR(c.variance, 0.0, 1e-11);
  EXPECT_NEAR(c.mean, 1.5, 1e-10);
  EXPECT_THROW(bridge_point_conditional(0, 0, 1, 0, 1.0), DomainError);
  EXPECT_THROW(bridge_point_conditional(0, 0, 1, 0, -0.1), DomainError);
}

TEST(SampleBridge, EndpointsExact) {
  RngStream r(1, 0);
  GridInterval g(0.3, 2.9, 13);
  for (int k = 0; k < 100; ++k) {
    auto p = sample_bridge(g, 1.25, -0.7, r);
    ASSERT_EQ(p.front(), 1.25);
    ASSERT_EQ(p.back(), -0.7);
  }
}

TEST(SampleBridge, Moments) {
  RngStream r(2, 0);
  GridInterval g(0, 1, 8);
  const int n = 100000;
  std::vector<double> mid(n), quarter(n);
  for (int k = 0; k < n; ++k) {
    mid[k] = sample_bridge(g, 0, 0, r)[4];
    quarter[k] = sample_bridge(g, 0, 1, r)[2];
  }
  EXPECT_NEAR(stats::mean(mid), 0.0, 4 * 0.5 / std::sqrt(n));
  // sd of the sample variance of a normal: sigma^2 sqrt(2/(n-1))
  EXPECT_NEAR(stats::variance(mid), 0.25, 4 * 0.25 * std::sqrt(2.0 / n));
  EXPECT_NEAR(stats::mean(quarter), 0.25, 4 * std::sqrt(0.1875 / n));
}

TEST(SampleBridge, Covariance) {
  RngStream r(3, 0);
  GridInterval g(0, 2, 4);  // points 0, .5, 1, 1.5, 2
  const int n = 200000;
  double s = 0;
  for (int k = 0; k < n; ++k) {
    auto p = sample_bridge(g, 0, 0, r);
    s += p[1] * p[3];
  }
  // cov(t=.5, t=1.5) = .5 * .5 / 2
  EXPECT_NEAR(s / n, 0.125, 4 * 0.2 / std::sqrt(n));
}

TEST(SampleBridge, MarkovConsistency) {
  // Conditioning a bridge on its value at an interior time splits it into two
  // independent bridges; compare the law at t = 0.75 given X(0.5) near 0.3.
  RngStream r(4, 0);
  GridInterval g(0, 1, 4);
  GridInterval right(0.5, 1, 2);
  std::vector<double> a, b;
  while (a.size() < 10000) {
    auto p = sample_bridge(g, 0, 0, r);
    if (std::abs(p[2] - 0.3) < 0.005) a.push_back(p[3]);
  }
  for (int k = 0; k < 10000; ++k) b.push_back(sample_bridge(right, 0.3, 0, r)[1]);
  EXPECT_GT(stats::ks_two_sample(a, b).p_value, 0.01);
}

TEST(BridgeDensity, SpecExamples) {
  std::vector<double> one{0.0, 1.0};
  EXPECT_NEAR(bridge_log_density(one, GridInterval(0, 1, 1), 0.0, 1.0), 0.0, 1e-14);
  std::vector<double> p{0.0, 0.0, 0.0};
  EXPECT_NEAR(bridge_log_density(p, GridInterval(0, 1, 2), 0, 0), -0.2257913526, 1e-10);
  std::vector<double> q{0.0, 0.4, 0.0};
  const double expect = -0.5 * std::log(2 * std::numbers::pi * 0.25) - 0.16 / 0.5;
  EXPECT_NEAR(bridge_log_density(q, GridInterval(0, 1, 2), 0, 0), expect, 1e-12);
}

TEST(BridgeDensity, TranslationInvariant) {
  std::vector<double> p{0.1, 0.7, -0.2, 0.4, 0.3}, s = p;
  for (double& v : s) v += 3.3;
  GridInterval g(0, 2, 4);
  EXPECT_NEAR(bridge_log_density(p, g, 0.1, 0.3), bridge_log_density(s, g, 3.4, 3.6), 1e-12);
}

TEST(BridgeDensity, IntegratesToOne) {
  // Two interior points: plain tensor trapezoid on a wide box is spectrally
  // accurate for a Gaussian integrand.
  GridInterval g(0, 1.5, 3);
  const double x = 0.2, y = -0.4;
  const int n = 801;
  const double lo = -4.0, hi = 4.0, h = (hi - lo) / (n - 1);
  double s = 0;
  std::vector<double> path{x, 0, 0, y};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      path[1] = lo + i * h;
      path[2] = lo + j * h;
      s += std::exp(bridge_log_density(path, g, x, y));
    }
  }
  EXPECT_NEAR(s * h * h, 1.0, 1e-6);
}
