#include "nadyn/example33.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nadyn/map_sequence.hpp"
#include "nadyn/straube.hpp"

namespace nadyn {

namespace {

void check_pair(std::size_t m, std::size_t n) {
  if (m < 2) throw std::invalid_argument("rho_slope needs m >= 2; the example33 family starts at index 2");
  if (m > n) throw std::invalid_argument("rho_slope needs m <= n");
}

}  // namespace

double rho_slope(std::size_t m, std::size_t n) {
  check_pair(m, n);
  double product = 1.0;
  for (std::size_t k = m; k <= n; ++k) product *= static_cast<double>(k - 1) / static_cast<double>(k);
  return product;
}

double rho_slope_telescoped(std::size_t m, std::size_t n) {
  check_pair(m, n);
  return static_cast<double>(m - 1) / static_cast<double>(n);
}

double rho_slope_printed(std::size_t m, std::size_t n) {
  check_pair(m, n);
  return static_cast<double>(m) / static_cast<double>(n);
}

double example33_escape_measure(double delta, std::size_t n) {
  if (n < 2) throw std::invalid_argument("example33_escape_measure needs n >= 2");
  if (delta >= 1.0) return 1.0;
  const double nd = static_cast<double>(n);
  double total = std::min(delta * nd, 0.5);
  for (std::size_t j = 2; j <= n; ++j) {
    const double land = std::min(delta * nd / static_cast<double>(j), 0.5);
    total += std::ldexp(land, -static_cast<int>(j - 1));
  }
  total += std::ldexp(std::max(0.0, delta - 0.5), -static_cast<int>(n - 1));
  return total;
}

EscapeResult example33_escape(double delta, double epsilon) {
  if (!(delta > 0.0)) throw std::invalid_argument("example33_escape needs delta > 0");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("example33_escape needs 0 < epsilon < 1/2");

  EscapeResult r;
  r.m = 2;
  while (std::ldexp(1.0, -static_cast<int>(r.m - 1)) >= epsilon) ++r.m;
  r.dyadic_floor = 1.0 - std::ldexp(1.0, -static_cast<int>(r.m - 1));
  if (delta >= 0.5) {
    r.n = r.m - 1;
  } else {
    // Smallest n with delta n >= (m - 1) / 2.
    const double need = 0.5 * static_cast<double>(r.m - 1);
    r.n = static_cast<std::size_t>(std::ceil(need / delta));
    while (r.n > 1 && delta * static_cast<double>(r.n - 1) >= need) --r.n;
    while (delta * static_cast<double>(r.n) < need) ++r.n;
  }
  r.n = std::max<std::size_t>(r.n, 2);

  const MapSequence seq = make_family("example33");
  const IntervalSet target({Interval{0.0, std::min(delta, 1.0)}});
  r.measure = preimage_composition(seq, r.n, target, 2).measure();
  r.analytic_measure = example33_escape_measure(delta, r.n);
  return r;
}

}  // namespace nadyn
