#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the library's transport, preimage or distance code; only map evaluation and
// plain data access are shared.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "nadyn/interval_maps.hpp"
#include "nadyn/interval_set.hpp"
#include "nadyn/step_density.hpp"

namespace oracle {

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

/// Random closed interval inside [0, 1] with positive length.
inline nadyn::Interval random_interval(std::mt19937_64& rng) {
  double a = uniform01(rng);
  double b = uniform01(rng);
  if (a > b) std::swap(a, b);
  if (b - a < 1e-6) b = std::min(1.0, a + 1e-3);
  return {a, b};
}

/// True when y is within `margin` of any endpoint of the set.
inline bool near_boundary(const nadyn::IntervalSet& s, double y, double margin) {
  for (const auto& p : s.pieces())
    if (std::abs(y - p.lo) < margin || std::abs(y - p.hi) < margin) return true;
  return false;
}

inline bool near_any(std::span<const double> points, double x, double margin) {
  for (double p : points)
    if (std::abs(x - p) < margin) return true;
  return false;
}

/// Transfer operator evaluated pointwise from its defining sum over branches,
/// inverting each affine branch by hand: (P f)(y) = sum f(x_i) / |a_i| with
/// a_i x_i + b_i = y and x_i in the branch domain.
inline double fp_pointwise(const nadyn::PiecewiseMap& map, const nadyn::StepDensity& f, double y) {
  double total = 0.0;
  for (const auto& br : map.branches()) {
    const double a = br.slope();
    const double x = (y - br(br.lo())) / a + br.lo();
    if (x < br.lo() || x > br.hi()) continue;
    total += f(std::min(x, 1.0)) / std::abs(a);
  }
  return total;
}

/// Midpoint-rule integral of |g| over [0, 1] with n cells.
inline double l1_numeric(const std::function<double(double)>& g, std::size_t n = 200000) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += std::abs(g((static_cast<double>(i) + 0.5) / static_cast<double>(n)));
  return total / static_cast<double>(n);
}

/// Interior jump sum computed from scratch over the value list.
inline double jump_sum(std::span<const double> values) {
  double v = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) v += std::abs(values[i] - values[i - 1]);
  return v;
}

/// Fraction of bin i sent into bin j, estimated from `samples` equispaced
/// points per bin.
inline std::vector<std::vector<double>> ulam_by_sampling(const nadyn::PiecewiseMap& map, std::size_t bins,
                                                         std::size_t samples) {
  std::vector<std::vector<double>> m(bins, std::vector<double>(bins, 0.0));
  for (std::size_t i = 0; i < bins; ++i) {
    for (std::size_t s = 0; s < samples; ++s) {
      const double x = (static_cast<double>(i) + (static_cast<double>(s) + 0.5) / static_cast<double>(samples)) /
                       static_cast<double>(bins);
      const auto j = std::min<std::size_t>(bins - 1, static_cast<std::size_t>(map(x) * static_cast<double>(bins)));
      m[i][j] += 1.0 / static_cast<double>(samples);
    }
  }
  return m;
}

/// Pushforward of Lebesgue measure restricted to [0, 1] evaluated on E by
/// forward sampling: fraction of grid points x with forward(x) in E.
inline double forward_fraction(const std::function<double(double)>& forward, const nadyn::IntervalSet& e,
                               std::size_t points) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(points);
    if (e.contains(forward(x))) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(points);
}

}  // namespace oracle
