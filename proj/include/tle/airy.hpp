#pragma once

#include <vector>

namespace tle {

/// Ai and Ai' on the real line.
///
/// For x >= switch_point() the asymptotic expansion is summed to its smallest
/// term. Below that, values come from a table built by integrating Ai'' = x Ai
/// backwards from the switch point with high-order Taylor steps (backwards is
/// the stable direction for Ai), then a local Taylor expansion from the nearest
/// node. Relative accuracy is about 1e-13 on [-10, 20] away from the zeros.
class AiryTable {
 public:
  static const AiryTable& instance();

  double ai(double x) const;
  double ai_prime(double x) const;
  /// Both at once; cheaper than two calls.
  void evaluate(double x, double& ai, double& ai_prime) const;

  /// True when x lies in the range where the accuracy claim holds.
  static bool in_supported_range(double x) { return x >= -10.0 && x <= 20.0; }
  static double switch_point() { return 8.0; }
  double table_min() const { return x0_; }

  /// -omega_1, the largest zero of Ai.
  double largest_zero() const { return -omega1_; }

 private:
  AiryTable();
  void taylor(double x_node, double a0, double a1, double dx, double& ai, double& ai_prime) const;

  double x0_;
  double h_;
  std::vector<double> ai_;
  std::vector<double> aip_;
  double omega1_;
};

double airy_ai(double x);
double airy_ai_prime(double x);

/// Asymptotic expansion for large positive x (used above the switch point and
/// exposed for the continuity check).
void airy_asymptotic(double x, double& ai, double& ai_prime);

/// Maclaurin series in long double. Independent reference for |x| <~ 3;
/// cancellation makes it unreliable far from 0.
void airy_maclaurin(double x, double& ai, double& ai_prime);

/// omega_1 with |Ai(-omega_1)| < 1e-12, from bisection on [-3, -2] followed by
/// Newton steps.
double airy_first_zero();

}  // namespace tle
