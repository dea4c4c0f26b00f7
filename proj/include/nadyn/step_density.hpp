#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace nadyn {

/// Piecewise-constant probability density on [0, 1].
///
/// Breakpoints 0 = b_0 < b_1 < ... < b_k = 1; `values[i]` is the density on
/// [b_i, b_{i+1}). Values are nonnegative and integrate to 1 within
/// `kMassTolerance`.
class StepDensity {
 public:
  static constexpr double kMassTolerance = 1e-10;

  StepDensity(std::vector<double> breakpoints, std::vector<double> values);

  static StepDensity uniform();
  /// Normalized indicator of [lo, hi), i.e. value 1/(hi - lo) there.
  static StepDensity indicator(double lo, double hi);
  /// Cell values on the uniform grid with `values.size()` cells.
  static StepDensity on_uniform_grid(std::vector<double> values);

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }
  std::size_t cell_count() const { return values_.size(); }

  double integral() const;
  /// Value of the cell owning x ([b_i, b_{i+1}), last cell closed).
  double operator()(double x) const;
  /// Integral of the density over [a, b] with 0 <= a <= b <= 1.
  double integral_over(double a, double b) const;

  /// Merges adjacent cells whose values differ by at most `tolerance`,
  /// replacing them by their width-weighted mean so the integral is kept.
  StepDensity compacted(double tolerance = 0.0) const;

  /// {"breakpoints": [...], "values": [...]}
  std::string to_json() const;
  static StepDensity from_json(const std::string& text);

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// Equispaced grid k/n, k = 0..n, with the last point exactly 1.
std::vector<double> uniform_grid(std::size_t n);

/// Interior jump sum sum_i |v_{i+1} - v_i|; no boundary terms.
double variation(const StepDensity& f);

/// Exact L1 distance over merged breakpoints.
double l1_distance(const StepDensity& f, const StepDensity& g);

/// Pointwise convex combination wf * f + wg * g (wf + wg = 1).
StepDensity mix(const StepDensity& f, double wf, const StepDensity& g, double wg);

struct Coarsened {
  StepDensity density;
  /// L1 distance between the input and its coarsening.
  double error = 0.0;
};

/// Cell averages on the uniform grid with n_bins cells (n_bins >= 2).
Coarsened coarsen(const StepDensity& f, std::size_t n_bins);

/// Random density with 1..max_cells cells, random interior breakpoints and
/// values, some cells zero. Reproducible across platforms for a given engine state.
StepDensity random_step_density(std::mt19937_64& rng, std::size_t max_cells = 32);

}  // namespace nadyn
