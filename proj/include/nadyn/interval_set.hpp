#pragma once

#include <span>
#include <string>
#include <vector>

namespace nadyn {

/// Closed subinterval [lo, hi] of the unit interval.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi > lo ? hi - lo : 0.0; }
  bool contains(double x) const { return lo <= x && x <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite disjoint union of closed intervals in [0, 1], kept sorted.
///
/// Construction normalizes: pieces are clipped to [0, 1], zero-length pieces
/// are dropped (they carry no Lebesgue measure), and pieces separated by a gap
/// below `kMergeGap` (rounding-noise scale) are fused.
class IntervalSet {
 public:
  static constexpr double kMergeGap = 1e-15;

  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> pieces);
  IntervalSet(std::initializer_list<Interval> pieces)
      : IntervalSet(std::vector<Interval>(pieces)) {}

  static IntervalSet unit() { return IntervalSet({Interval{0.0, 1.0}}); }

  std::span<const Interval> pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }

  /// Lebesgue measure (sum of lengths).
  double measure() const;
  bool contains(double x) const;

  IntervalSet unite(const IntervalSet& other) const;
  IntervalSet intersect(const Interval& window) const;

  /// JSON list of [lo, hi] pairs.
  std::string to_json() const;
  static IntervalSet from_json(const std::string& text);

 private:
  std::vector<Interval> pieces_;
};

bool operator==(const IntervalSet& a, const IntervalSet& b);

}  // namespace nadyn
