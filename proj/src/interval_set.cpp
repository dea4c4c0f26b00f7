#include "nadyn/interval_set.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace nadyn {

IntervalSet::IntervalSet(std::vector<Interval> pieces) {
  std::vector<Interval> kept;
  kept.reserve(pieces.size());
  for (Interval p : pieces) {
    p.lo = std::clamp(p.lo, 0.0, 1.0);
    p.hi = std::clamp(p.hi, 0.0, 1.0);
    if (p.hi > p.lo) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

  for (const Interval& p : kept) {
    if (!pieces_.empty() && p.lo - pieces_.back().hi < kMergeGap) {
      pieces_.back().hi = std::max(pieces_.back().hi, p.hi);
    } else {
      pieces_.push_back(p);
    }
  }
}

double IntervalSet::measure() const {
  double total = 0.0;
  for (const Interval& p : pieces_) total += p.length();
  return total;
}

bool IntervalSet::contains(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Interval& p) { return v < p.lo; });
  if (it == pieces_.begin()) return false;
  return std::prev(it)->contains(x);
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  std::vector<Interval> all(pieces_.begin(), pieces_.end());
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersect(const Interval& window) const {
  std::vector<Interval> out;
  for (const Interval& p : pieces_) {
    const double lo = std::max(p.lo, window.lo);
    const double hi = std::min(p.hi, window.hi);
    if (hi > lo) out.push_back({lo, hi});
  }
  return IntervalSet(std::move(out));
}

std::string IntervalSet::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const Interval& p : pieces_) j.push_back({p.lo, p.hi});
  return j.dump();
}

IntervalSet IntervalSet::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.is_array()) throw std::invalid_argument("interval set JSON must be a list of [lo, hi] pairs");
  std::vector<Interval> pieces;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::invalid_argument("interval set JSON must be a list of [lo, hi] pairs");
    pieces.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return IntervalSet(std::move(pieces));
}

bool operator==(const IntervalSet& a, const IntervalSet& b) {
  return std::ranges::equal(a.pieces(), b.pieces());
}

}  // namespace nadyn
