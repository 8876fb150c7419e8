#include "tle/airy.hpp"

#include <cmath>
#include <numbers>

namespace tle {

namespace {

constexpr double kTableMin = -12.0;
constexpr double kStep = 1.0 / 32.0;
constexpr int kTaylorTerms = 20;

}  // namespace

void airy_asymptotic(double x, double& ai, double& ai_prime) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  double u = 1.0, su = 1.0, sv = 1.0, last = 1.0;
  for (int k = 1; k < 60; ++k) {
    u *= (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / (216.0 * k * (2.0 * k - 1)) / zeta;
    const double v = -(6.0 * k + 1) / (6.0 * k - 1) * u;
    if (std::abs(u) > last) break;  // past the smallest term
    const double sign = (k % 2) ? -1.0 : 1.0;
    su += sign * u;
    sv += sign * v;
    last = std::abs(u);
    if (last < 1e-17) break;
  }
  const double pre = std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi));
  const double q = std::sqrt(std::sqrt(x));
  ai = pre / q * su;
  ai_prime = -pre * q * sv;
}

void airy_maclaurin(double x, double& ai, double& ai_prime) {
  const long double c1 = 0.355028053887817239260063186004183177L;
  const long double c2 = 0.258819403792806798405183560189203963L;
  const long double X = x, x3 = X * X * X;
  long double f = 1, g = X, fp = 0, gp = 1;
  long double t = 1, s = X, p = X * X / 2, q = 1;
  fp = p;
  for (int k = 1; k < 200; ++k) {
    t *= x3 / ((3.0L * k - 1) * (3.0L * k));
    s *= x3 / ((3.0L * k) * (3.0L * k + 1));
    q *= x3 / ((3.0L * k - 2) * (3.0L * k));
    if (k > 1) {
      p *= x3 / ((3.0L * k - 3) * (3.0L * k - 1));
      fp += p;
    }
    f += t;
    g += s;
    gp += q;
    if (std::abs(t) + std::abs(s) + std::abs(q) + std::abs(p) < 1e-30L * (std::abs(f) + std::abs(g) + 1)) break;
  }
  ai = static_cast<double>(c1 * f - c2 * g);
  ai_prime = static_cast<double>(c1 * fp - c2 * gp);
}

void AiryTable::taylor(double x_node, double a0, double a1, double dx, double& ai, double& ai_prime) const {
  double c[kTaylorTerms];
  c[0] = a0;
  c[1] = a1;
  c[2] = x_node * a0 / 2.0;
  for (int k = 1; k + 2 < kTaylorTerms; ++k) c[k + 2] = (x_node * c[k] + c[k - 1]) / ((k + 2.0) * (k + 1.0));
  double y = c[kTaylorTerms - 1], yp = (kTaylorTerms - 1) * c[kTaylorTerms - 1];
  for (int k = kTaylorTerms - 2; k >= 0; --k) {
    y = y * dx + c[k];
    if (k >= 1) yp = yp * dx + k * c[k];
  }
  ai = y;
  ai_prime = yp;
}

AiryTable::AiryTable() : x0_(kTableMin), h_(kStep) {
  const std::size_t nodes = static_cast<std::size_t>(std::lround((switch_point() - x0_) / h_)) + 1;
  ai_.resize(nodes);
  aip_.resize(nodes);
  airy_asymptotic(switch_point(), ai_[nodes - 1], aip_[nodes - 1]);
  for (std::size_t k = nodes - 1; k > 0; --k) {
    const double xk = x0_ + static_cast<double>(k) * h_;
    taylor(xk, ai_[k], aip_[k], -h_, ai_[k - 1], aip_[k - 1]);
  }
  double lo = -3.0, hi = -2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ai(mid) > 0.0) hi = mid; else lo = mid;
  }
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    double a, ap;
    evaluate(z, a, ap);
    if (ap == 0.0) break;
    z -= a / ap;
  }
  omega1_ = -z;
}

const AiryTable& AiryTable::instance() {
  static const AiryTable table;
  return table;
}

void AiryTable::evaluate(double x, double& ai, double& ai_prime) const {
  if (x >= switch_point()) {
    airy_asymptotic(x, ai, ai_prime);
    return;
  }
  if (x < x0_) {
    // Outside the table: walk down from its first node.
    double xc = x0_, a = ai_[0], ap = aip_[0];
    while (xc - x > h_) {
      taylor(xc, a, ap, -h_, a, ap);
      xc -= h_;
    }
    taylor(xc, a, ap, x - xc, ai, ai_prime);
    return;
  }
  const std::size_t k = static_cast<std::size_t>(std::lround((x - x0_) / h_));
  const double xk = x0_ + static_cast<double>(k) * h_;
  taylor(xk, ai_[k], aip_[k], x - xk, ai, ai_prime);
}

double AiryTable::ai(double x) const {
  double a, ap;
  evaluate(x, a, ap);
  return a;
}

double AiryTable::ai_prime(double x) const {
  double a, ap;
  evaluate(x, a, ap);
  return ap;
}

double airy_ai(double x) { return AiryTable::instance().ai(x); }
double airy_ai_prime(double x) { return AiryTable::instance().ai_prime(x); }
double airy_first_zero() { return -AiryTable::instance().largest_zero(); }

}  // namespace tle
