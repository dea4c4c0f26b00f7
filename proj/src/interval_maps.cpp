#include "nadyn/interval_maps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nadyn {

namespace {

constexpr double kImageSlack = 1e-12;
constexpr int kMonotonicityGrid = 512;
constexpr int kDerivativeGrid = 2000;

void check_domain(double lo, double hi) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) {
    std::ostringstream msg;
    msg << "branch domain [" << lo << ", " << hi << "] must satisfy 0 <= lo < hi <= 1";
    throw std::invalid_argument(msg.str());
  }
}

double snap_to_unit(double y) {
  if (y < -kImageSlack || y > 1.0 + kImageSlack) {
    std::ostringstream msg;
    msg << "branch image leaves [0, 1] (endpoint value " << y << ")";
    throw std::invalid_argument(msg.str());
  }
  return std::clamp(y, 0.0, 1.0);
}

}  // namespace

Branch::Branch(double lo, double hi, AffineRule rule) : lo_(lo), hi_(hi) {
  check_domain(lo, hi);
  if (rule.slope == 0.0 || !std::isfinite(rule.slope))
    throw std::invalid_argument("affine branch needs a finite nonzero slope");
  rule_ = Affine{rule.slope, rule.slope * lo + rule.intercept};
  increasing_ = rule.slope > 0.0;
  min_abs_derivative_ = std::abs(rule.slope);
  init_image();
}

Branch::Branch(double lo, double hi, AnalyticRule rule) : lo_(lo), hi_(hi) {
  check_domain(lo, hi);
  if (!rule.forward || !rule.derivative)
    throw std::invalid_argument("analytic branch needs forward and derivative evaluators");
  if (!(rule.second_derivative_bound >= 0.0))
    throw std::invalid_argument("analytic branch needs a nonnegative second-derivative bound");
  increasing_ = rule.increasing;

  // Strict monotonicity in the declared direction, checked on a grid.
  double prev = rule.forward(lo);
  for (int k = 1; k <= kMonotonicityGrid; ++k) {
    const double x = k == kMonotonicityGrid ? hi : lo + (hi - lo) * k / kMonotonicityGrid;
    const double y = rule.forward(x);
    if (increasing_ ? !(y > prev) : !(y < prev))
      throw std::invalid_argument("analytic branch is not strictly monotone in its declared direction");
    prev = y;
  }

  if (rule.derivative_lower_bound) {
    min_abs_derivative_ = *rule.derivative_lower_bound;
  } else {
    double m = std::abs(rule.derivative(lo));
    for (int k = 1; k <= kDerivativeGrid; ++k) {
      const double x = k == kDerivativeGrid ? hi : lo + (hi - lo) * k / kDerivativeGrid;
      m = std::min(m, std::abs(rule.derivative(x)));
    }
    min_abs_derivative_ = m;
    derivative_estimated_ = true;
  }
  rule_ = std::move(rule);
  init_image();
}

Branch Branch::linear_onto(double lo, double hi, double y_at_lo, double y_at_hi) {
  check_domain(lo, hi);
  const double slope = (y_at_hi - y_at_lo) / (hi - lo);
  Branch b(lo, hi, AffineRule{slope, y_at_lo - slope * lo});
  b.rule_ = Affine{slope, y_at_lo};
  b.image_lo_ = snap_to_unit(std::min(y_at_lo, y_at_hi));
  b.image_hi_ = snap_to_unit(std::max(y_at_lo, y_at_hi));
  return b;
}

void Branch::init_image() {
  const double a = (*this)(lo_);
  const double b = (*this)(hi_);
  image_lo_ = snap_to_unit(std::min(a, b));
  image_hi_ = snap_to_unit(std::max(a, b));
  if (!(image_hi_ > image_lo_)) throw std::invalid_argument("branch image is degenerate");
}

double Branch::slope() const {
  if (const auto* a = std::get_if<Affine>(&rule_)) return a->slope;
  throw std::logic_error("slope() requested from an analytic branch");
}

double Branch::intercept() const {
  if (const auto* a = std::get_if<Affine>(&rule_)) return a->anchor_y - a->slope * lo_;
  throw std::logic_error("intercept() requested from an analytic branch");
}

double Branch::operator()(double x) const {
  if (const auto* a = std::get_if<Affine>(&rule_)) return a->anchor_y + a->slope * (x - lo_);
  return std::get<AnalyticRule>(rule_).forward(x);
}

double Branch::derivative(double x) const {
  if (const auto* a = std::get_if<Affine>(&rule_)) return a->slope;
  return std::get<AnalyticRule>(rule_).derivative(x);
}

double Branch::second_derivative_bound() const {
  if (is_affine()) return 0.0;
  return std::get<AnalyticRule>(rule_).second_derivative_bound;
}

std::optional<double> Branch::inverse(double y) const {
  if (y < image_lo_ || y > image_hi_) return std::nullopt;
  if (const auto* a = std::get_if<Affine>(&rule_)) {
    // Exact at the image endpoints; clamped against rounding elsewhere.
    if (y == (increasing_ ? image_lo_ : image_hi_)) return lo_;
    if (y == (increasing_ ? image_hi_ : image_lo_)) return hi_;
    return std::clamp(lo_ + (y - a->anchor_y) / a->slope, lo_, hi_);
  }
  if (y == (increasing_ ? image_lo_ : image_hi_)) return lo_;
  if (y == (increasing_ ? image_hi_ : image_lo_)) return hi_;
  const auto& f = std::get<AnalyticRule>(rule_).forward;
  double a = lo_;
  double b = hi_;
  while (b - a > kBisectionTolerance) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const bool below = f(mid) < y;
    if (below == increasing_) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

PiecewiseMap::PiecewiseMap(std::vector<Branch> branches, std::string name) {
  if (branches.empty()) throw std::invalid_argument("a piecewise map needs at least one branch");
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(name);
  if (branches.front().lo() != 0.0 || branches.back().hi() != 1.0)
    throw std::invalid_argument("branch domains must start at 0 and end at 1");
  impl->partition.push_back(0.0);
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (i > 0 && branches[i].lo() != branches[i - 1].hi()) {
      std::ostringstream msg;
      msg << "branch " << i << " starts at " << branches[i].lo() << " but branch " << i - 1
          << " ends at " << branches[i - 1].hi() << "; domains must tile [0, 1]";
      throw std::invalid_argument(msg.str());
    }
    impl->partition.push_back(branches[i].hi());
    impl->affine = impl->affine && branches[i].is_affine();
    impl->expanding = impl->expanding && branches[i].min_abs_derivative() > 1.0;
  }
  impl->branches = std::move(branches);
  impl_ = std::move(impl);
}

const Branch& PiecewiseMap::branch(std::size_t i) const {
  if (i >= impl_->branches.size()) throw std::out_of_range("branch index out of range");
  return impl_->branches[i];
}

std::size_t PiecewiseMap::branch_index(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::out_of_range("map argument outside [0, 1]");
  const auto& p = impl_->partition;
  // Interior partition points a_1 .. a_{q-1}; x == a_i belongs to cell i.
  const auto first = p.begin() + 1;
  const auto last = p.end() - 1;
  return static_cast<std::size_t>(std::upper_bound(first, last, x) - first);
}

double PiecewiseMap::operator()(double x) const { return impl_->branches[branch_index(x)](x); }

double PiecewiseMap::derivative(double x) const {
  return impl_->branches[branch_index(x)].derivative(x);
}

std::optional<double> PiecewiseMap::branch_inverse(std::size_t b, double y) const {
  return branch(b).inverse(y);
}

IntervalSet PiecewiseMap::preimage(const Interval& target) const {
  std::vector<Interval> pieces;
  for (const Branch& b : impl_->branches) {
    const double c = std::max(target.lo, b.image_lo());
    const double d = std::min(target.hi, b.image_hi());
    if (!(d > c)) continue;
    const double x1 = *b.inverse(c);
    const double x2 = *b.inverse(d);
    pieces.push_back({std::min(x1, x2), std::max(x1, x2)});
  }
  return IntervalSet(std::move(pieces));
}

IntervalSet PiecewiseMap::preimage(const IntervalSet& target) const {
  std::vector<Interval> pieces;
  for (const Interval& t : target.pieces()) {
    const IntervalSet part = preimage(t);
    pieces.insert(pieces.end(), part.pieces().begin(), part.pieces().end());
  }
  return IntervalSet(std::move(pieces));
}

double PiecewiseMap::min_cell_width() const {
  double h = 1.0;
  for (const Branch& b : impl_->branches) h = std::min(h, b.hi() - b.lo());
  return h;
}

PiecewiseMap PiecewiseMap::identity() {
  return PiecewiseMap({Branch::linear_onto(0.0, 1.0, 0.0, 1.0)}, "identity");
}

LYConstants ly_constants(const PiecewiseMap& map) {
  LYConstants c;
  c.q = map.branch_count();
  c.h = map.min_cell_width();
  c.s = map.branch(0).min_abs_derivative();
  for (std::size_t i = 0; i < map.branch_count(); ++i) {
    const Branch& b = map.branch(i);
    if (!(b.min_abs_derivative() > 1.0)) {
      std::ostringstream msg;
      msg << "map '" << map.name() << "' is not expanding: branch " << i << " on [" << b.lo()
          << ", " << b.hi() << ") has inf|derivative| = " << b.min_abs_derivative() << " <= 1";
      throw std::domain_error(msg.str());
    }
    c.s = std::min(c.s, b.min_abs_derivative());
    c.second_derivative_max = std::max(c.second_derivative_max, b.second_derivative_bound());
  }
  c.A = 2.0 / c.s;
  c.B = c.second_derivative_max / c.s + 2.0 / c.h;
  c.contracting = c.s > 2.0;
  c.q_u = c.q;
  c.s_u = c.s;
  return c;
}

PiecewiseMap doubling_map() {
  return PiecewiseMap({Branch::linear_onto(0.0, 0.5, 0.0, 1.0), Branch::linear_onto(0.5, 1.0, 0.0, 1.0)},
                      "doubling");
}

PiecewiseMap tripling_map() {
  const double a1 = 1.0 / 3.0;
  const double a2 = 2.0 / 3.0;
  return PiecewiseMap({Branch::linear_onto(0.0, a1, 0.0, 1.0), Branch::linear_onto(a1, a2, 0.0, 1.0),
                       Branch::linear_onto(a2, 1.0, 0.0, 1.0)},
                      "tripling");
}

PiecewiseMap markov_oracle_map() {
  const double a1 = 1.0 / 3.0;
  return PiecewiseMap({Branch::linear_onto(0.0, a1, a1, 1.0), Branch::linear_onto(a1, 1.0, 0.0, 1.0)},
                      "markov_oracle");
}

PiecewiseMap example33_map(std::size_t n) {
  if (n < 2) throw std::invalid_argument("example33 maps are defined for n >= 2");
  const double slope = 1.0 - 1.0 / static_cast<double>(n);
  return PiecewiseMap({Branch::linear_onto(0.0, 0.5, 0.0, 0.5 * slope), Branch::linear_onto(0.5, 1.0, 0.0, 1.0)},
                      "example33_" + std::to_string(n));
}

PiecewiseMap example33_limit_map() {
  return PiecewiseMap({Branch::linear_onto(0.0, 0.5, 0.0, 0.5), Branch::linear_onto(0.5, 1.0, 0.0, 1.0)},
                      "example33_limit");
}

PiecewiseMap perturbed_tripling_map(std::size_t n, double strength) {
  if (n < 1) throw std::invalid_argument("perturbed_tripling maps are indexed from n = 1");
  const double c = strength / static_cast<double>(n);
  if (!(std::abs(c) <= 1.0)) throw std::invalid_argument("perturbed_tripling needs |strength / n| <= 1");
  std::vector<Branch> branches;
  for (int k = 0; k < 3; ++k) {
    const double lo = k / 3.0;
    const double hi = k == 2 ? 1.0 : (k + 1) / 3.0;
    const double width = hi - lo;
    AnalyticRule rule;
    rule.forward = [lo, width, c](double x) {
      const double t = std::clamp((x - lo) / width, 0.0, 1.0);
      return t + c * t * (1.0 - t);
    };
    rule.derivative = [lo, width, c](double x) {
      const double t = std::clamp((x - lo) / width, 0.0, 1.0);
      return (1.0 + c * (1.0 - 2.0 * t)) / width;
    };
    rule.second_derivative_bound = 2.0 * std::abs(c) / (width * width);
    rule.derivative_lower_bound = (1.0 - std::abs(c)) / width;
    rule.increasing = true;
    branches.emplace_back(lo, hi, std::move(rule));
  }
  return PiecewiseMap(std::move(branches), "perturbed_tripling_" + std::to_string(n));
}

std::vector<std::string> builtin_map_names() {
  return {"identity", "doubling", "tripling", "markov_oracle", "example33_limit"};
}

PiecewiseMap builtin_map(const std::string& name) {
  if (name == "identity") return PiecewiseMap::identity();
  if (name == "doubling") return doubling_map();
  if (name == "tripling") return tripling_map();
  if (name == "markov_oracle") return markov_oracle_map();
  if (name == "example33_limit") return example33_limit_map();
  std::string known;
  for (const auto& n : builtin_map_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown map '" + name + "'; built-in maps: " + known);
}

}  // namespace nadyn
