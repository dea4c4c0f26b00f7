#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nadyn/interval_set.hpp"

namespace nadyn {

/// x -> slope * x + intercept.
struct AffineRule {
  double slope = 1.0;
  double intercept = 0.0;
};

/// Smooth monotone branch given by evaluators.
///
/// `second_derivative_bound` bounds |forward''| and feeds the Lasota-Yorke
/// constant B. `derivative_lower_bound` is inf |derivative| on the
/// domain; when absent it is estimated on a grid and flagged as an estimate.
struct AnalyticRule {
  std::function<double(double)> forward;
  std::function<double(double)> derivative;
  double second_derivative_bound = 0.0;
  bool increasing = true;
  std::optional<double> derivative_lower_bound;
};

/// Absolute tolerance of the bisection used to invert analytic branches.
inline constexpr double kBisectionTolerance = 1e-12;

/// One strictly monotone piece of a piecewise map.
class Branch {
 public:
  Branch(double lo, double hi, AffineRule rule);
  Branch(double lo, double hi, AnalyticRule rule);

  /// Affine branch sending lo to y_at_lo and hi to y_at_hi; keeps the image
  /// endpoints exact instead of recomputing them from slope and intercept.
  static Branch linear_onto(double lo, double hi, double y_at_lo, double y_at_hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double image_lo() const { return image_lo_; }
  double image_hi() const { return image_hi_; }

  bool is_affine() const { return std::holds_alternative<Affine>(rule_); }
  bool increasing() const { return increasing_; }
  double slope() const;  ///< Affine branches only.
  double intercept() const;  ///< Affine branches only.

  double operator()(double x) const;
  double derivative(double x) const;

  /// x in [lo, hi] with forward(x) == y, or empty when y is outside the image.
  std::optional<double> inverse(double y) const;

  double min_abs_derivative() const { return min_abs_derivative_; }
  bool min_abs_derivative_is_estimate() const { return derivative_estimated_; }
  double second_derivative_bound() const;

 private:
  // Anchored form y = anchor_y + slope * (x - lo); lo maps exactly to anchor_y.
  struct Affine {
    double slope;
    double anchor_y;
  };

  void init_image();

  double lo_ = 0.0;
  double hi_ = 1.0;
  double image_lo_ = 0.0;
  double image_hi_ = 1.0;
  bool increasing_ = true;
  double min_abs_derivative_ = 1.0;
  bool derivative_estimated_ = false;
  std::variant<Affine, AnalyticRule> rule_;
};

/// Piecewise monotone map of [0, 1].
///
/// Cell i is [a_i, a_{i+1}) except the last, which is closed, so evaluation is
/// single-valued on the whole interval. Copies share the immutable branch data.
class PiecewiseMap {
 public:
  explicit PiecewiseMap(std::vector<Branch> branches, std::string name = "");

  const std::string& name() const { return impl_->name; }
  std::span<const Branch> branches() const { return impl_->branches; }
  std::span<const double> partition() const { return impl_->partition; }
  std::size_t branch_count() const { return impl_->branches.size(); }
  const Branch& branch(std::size_t i) const;

  /// Index of the cell owning x under the half-open convention.
  std::size_t branch_index(double x) const;

  double operator()(double x) const;
  /// One-sided derivative from the owning cell at partition points.
  double derivative(double x) const;
  std::optional<double> branch_inverse(std::size_t branch, double y) const;

  /// Exact preimage of an interval, one piece per branch whose image meets it.
  IntervalSet preimage(const Interval& target) const;
  IntervalSet preimage(const IntervalSet& target) const;

  bool piecewise_affine() const { return impl_->affine; }
  bool expanding() const { return impl_->expanding; }
  double min_cell_width() const;

  static PiecewiseMap identity();

 private:
  struct Impl {
    std::string name;
    std::vector<Branch> branches;
    std::vector<double> partition;
    bool affine = true;
    bool expanding = true;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Lasota-Yorke constants A = 2/s and B = max|f''|/s + 2/h.
struct LYConstants {
  double s = 0.0;
  double h = 0.0;
  std::size_t q = 0;
  double second_derivative_max = 0.0;
  double A = 0.0;
  double B = 0.0;
  /// A < 1, i.e. s > 2.
  bool contracting = false;
  /// Uniform branch-count bound and derivative lower bound over the maps the
  /// constants were taken from (equal to q and s for a single map).
  std::size_t q_u = 0;
  double s_u = 0.0;
};

/// Throws std::domain_error naming the first branch with inf |f'| <= 1.
LYConstants ly_constants(const PiecewiseMap& map);

// Built-in maps.
PiecewiseMap doubling_map();
PiecewiseMap tripling_map();
/// Markov map with branches [0,1/3] -> [1/3,1] (slope 2) and [1/3,1] -> [0,1]
/// (slope 3/2); its invariant density is 3/4 on [0,1/3) and 9/8 on [1/3,1].
PiecewiseMap markov_oracle_map();
/// (1 - 1/n) x on [0, 1/2), 2x - 1 on [1/2, 1]; requires n >= 2.
PiecewiseMap example33_map(std::size_t n);
/// x on [0, 1/2), 2x - 1 on [1/2, 1].
PiecewiseMap example33_limit_map();
/// Tripling map whose branches are t -> t + (strength/n) t (1 - t) in the
/// rescaled cell coordinate t in [0, 1].
PiecewiseMap perturbed_tripling_map(std::size_t n, double strength = 1.0);

/// Lookup by name: identity, doubling, tripling, markov_oracle, example33_limit.
PiecewiseMap builtin_map(const std::string& name);
std::vector<std::string> builtin_map_names();

}  // namespace nadyn
