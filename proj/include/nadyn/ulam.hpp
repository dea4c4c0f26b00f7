#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "nadyn/interval_maps.hpp"
#include "nadyn/step_density.hpp"

namespace nadyn {

/// Point mass carried exactly alongside the binned part of a measure.
struct Atom {
  double position = 0.0;
  double mass = 0.0;
};

/// Probability measure at bin resolution: an absolutely continuous part given
/// by bin weights (mass spread uniformly inside each bin) plus finitely many
/// atoms whose positions are tracked exactly.
class BinnedMeasure {
 public:
  /// Tolerance on total mass accepted at construction.
  static constexpr double kMassTolerance = 1e-9;

  explicit BinnedMeasure(std::vector<double> weights, std::vector<Atom> atoms = {});

  static BinnedMeasure uniform(std::size_t n_bins);
  /// Unit atom at the left edge of `bin`.
  static BinnedMeasure point(std::size_t n_bins, std::size_t bin);
  /// Bin masses of a step density.
  static BinnedMeasure from_density(const StepDensity& f, std::size_t n_bins);

  std::size_t bins() const { return weights_.size(); }
  /// Weights of the absolutely continuous part.
  std::span<const double> weights() const { return weights_; }
  std::span<const Atom> atoms() const { return atoms_; }
  /// Total mass per bin, atoms folded into the bin that owns them.
  std::vector<double> binned() const;
  double mass() const;
  std::size_t bin_of(double x) const;

  /// Density of the absolutely continuous part (weight * n_bins per bin).
  StepDensity to_density() const;

 private:
  std::vector<double> weights_;
  std::vector<Atom> atoms_;
};

/// Pointwise combination wa * a + wb * b of two measures on the same bins.
BinnedMeasure mix(const BinnedMeasure& a, double wa, const BinnedMeasure& b, double wb);

/// Sum of |difference| of binned masses (the L1 distance of the densities
/// when there are no atoms).
double l1_distance(const BinnedMeasure& a, const BinnedMeasure& b);

/// Integral of |F_a - F_b| for the cumulative distribution functions, i.e.
/// the Wasserstein-1 distance on [0, 1]. Exact for bin-uniform mass plus atoms.
double cdf_distance(const BinnedMeasure& a, const BinnedMeasure& b);

/// Variation of the binned density weight * n_bins (interior jumps).
double variation(const BinnedMeasure& m);

/// Row-stochastic bin transfer matrix
/// M[i][j] = m(bin_i intersect tau^{-1}(bin_j)) / m(bin_i), stored as CSR.
class UlamOperator {
 public:
  struct Entry {
    std::size_t col;
    double value;
  };

  /// From explicit rows; rows must be stochastic within 1e-12.
  explicit UlamOperator(std::vector<std::vector<Entry>> rows, std::optional<PiecewiseMap> map = std::nullopt);

  std::size_t bins() const { return row_start_.size() - 1; }
  std::span<const std::size_t> columns(std::size_t row) const;
  std::span<const double> values(std::size_t row) const;
  double at(std::size_t row, std::size_t col) const;
  /// Map the operator was built from; needed to move atoms.
  const std::optional<PiecewiseMap>& map() const { return map_; }

  /// Weight vector times the matrix (pushforward at bin resolution).
  std::vector<double> apply(std::span<const double> weights) const;

  /// One "row col value" line per stored entry.
  void write_coo(std::ostream& out) const;

 private:
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
  std::optional<PiecewiseMap> map_;
};

/// Rows are computed independently from a shared table of bin-edge preimages
/// (exact for affine branches, bisection for analytic ones). Requires n_bins >= 2.
UlamOperator build_ulam(const PiecewiseMap& map, std::size_t n_bins);

/// Pushforward of a measure: weights through the matrix, atoms through the map.
BinnedMeasure ulam_apply(const UlamOperator& op, const BinnedMeasure& mu);

struct StationaryResult {
  BinnedMeasure measure;
  /// || v M - v ||_1 of the returned vector.
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct StationaryOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 100000;
  /// Number of consecutive iterates averaged per sweep.
  std::size_t block = 2;
};

/// Fixed vector of a row-stochastic operator by Cesaro-averaged power
/// iteration from the uniform vector: each sweep replaces v by the mean of
/// v M, ..., v M^block. Stops when successive sweeps differ by
/// less than `tolerance` in L1 or after `max_iterations` matrix applications.
StationaryResult invariant_density_ulam(const UlamOperator& op, const StationaryOptions& options = {});

}  // namespace nadyn
