#pragma once

#include <cstddef>

namespace nadyn {

/// Slope of rho_(m,n) = rho_n o ... o rho_m, the first-branch composition of
/// the example33 family, as the direct product of (k - 1) / k over k = m..n.
/// Requires 2 <= m <= n.
double rho_slope(std::size_t m, std::size_t n);
/// (m - 1) / n, what the factors telescope to.
double rho_slope_telescoped(std::size_t m, std::size_t n);
/// m / n, the closed form as printed alongside them.
double rho_slope_printed(std::size_t m, std::size_t n);

struct EscapeResult {
  /// Smallest m with 2^{-(m-1)} < epsilon.
  std::size_t m = 0;
  /// Composition end index: tau_(2,n)^{-1}([0, delta]) has measure > 1 - epsilon.
  std::size_t n = 0;
  /// Measure of the preimage by interval arithmetic.
  double measure = 0.0;
  /// Same measure from the closed-form count of orbits landing in [0, delta].
  double analytic_measure = 0.0;
  /// 1 - 2^{-(m-1)}, the dyadic tail the recipe guarantees.
  double dyadic_floor = 0.0;
};

/// Two-stage escape recipe for the example33 family: pick m from epsilon, then
/// the first n at which the first-branch dilation of [0, delta] covers [0, 1/2]
/// for every landing time up to m - 1. Requires delta > 0 and 0 < epsilon < 1/2.
EscapeResult example33_escape(double delta, double epsilon);

/// Closed form of m(tau_(2,n)^{-1}([0, delta])): orbits that start in
/// [0, 1/2) contribute min(delta n, 1/2), orbits entering [0, 1/2) after
/// j - 1 doubling steps contribute min(delta n / j, 1/2) 2^{-(j-1)}, and
/// orbits that never enter contribute (delta - 1/2)^+ 2^{-(n-1)}.
double example33_escape_measure(double delta, std::size_t n);

}  // namespace nadyn
