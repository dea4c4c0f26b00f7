#include "nadyn/ulam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace nadyn {

BinnedMeasure::BinnedMeasure(std::vector<double> weights, std::vector<Atom> atoms)
    : weights_(std::move(weights)), atoms_(std::move(atoms)) {
  if (weights_.empty()) throw std::invalid_argument("binned measure needs at least one bin");
  for (double w : weights_)
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("bin weights must be finite and >= 0");
  for (const Atom& a : atoms_) {
    if (!(a.position >= 0.0 && a.position <= 1.0)) throw std::invalid_argument("atom position outside [0, 1]");
    if (!(a.mass >= 0.0)) throw std::invalid_argument("atom mass must be >= 0");
  }
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.position < b.position; });
  const double total = mass();
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "binned measure has total mass " << total << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
}

BinnedMeasure BinnedMeasure::uniform(std::size_t n_bins) {
  if (n_bins < 1) throw std::invalid_argument("uniform measure needs at least one bin");
  return BinnedMeasure(std::vector<double>(n_bins, 1.0 / static_cast<double>(n_bins)));
}

BinnedMeasure BinnedMeasure::point(std::size_t n_bins, std::size_t bin) {
  if (bin >= n_bins) throw std::invalid_argument("point mass bin out of range");
  return BinnedMeasure(std::vector<double>(n_bins, 0.0),
                       {Atom{static_cast<double>(bin) / static_cast<double>(n_bins), 1.0}});
}

BinnedMeasure BinnedMeasure::from_density(const StepDensity& f, std::size_t n_bins) {
  const auto grid = uniform_grid(n_bins);
  std::vector<double> w(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) w[k] = f.integral_over(grid[k], grid[k + 1]);
  return BinnedMeasure(std::move(w));
}

std::size_t BinnedMeasure::bin_of(double x) const {
  const std::size_t n = weights_.size();
  if (!(x >= 0.0 && x <= 1.0)) throw std::out_of_range("position outside [0, 1]");
  auto k = static_cast<std::size_t>(x * static_cast<double>(n));
  k = std::min(k, n - 1);
  if (k > 0 && static_cast<double>(k) / static_cast<double>(n) > x) --k;
  if (k + 1 < n && static_cast<double>(k + 1) / static_cast<double>(n) <= x) ++k;
  return k;
}

std::vector<double> BinnedMeasure::binned() const {
  std::vector<double> out = weights_;
  for (const Atom& a : atoms_) out[bin_of(a.position)] += a.mass;
  return out;
}

double BinnedMeasure::mass() const {
  double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  for (const Atom& a : atoms_) total += a.mass;
  return total;
}

StepDensity BinnedMeasure::to_density() const {
  if (!atoms_.empty()) throw std::domain_error("a measure with atoms has no density");
  std::vector<double> v(weights_.size());
  const double n = static_cast<double>(weights_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = weights_[k] * n;
  return StepDensity::on_uniform_grid(std::move(v));
}

BinnedMeasure mix(const BinnedMeasure& a, double wa, const BinnedMeasure& b, double wb) {
  if (a.bins() != b.bins()) throw std::invalid_argument("bin-count mismatch");
  std::vector<double> w(a.bins());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = wa * a.weights()[k] + wb * b.weights()[k];
  std::vector<Atom> atoms;
  for (const Atom& x : a.atoms()) atoms.push_back({x.position, wa * x.mass});
  for (const Atom& x : b.atoms()) atoms.push_back({x.position, wb * x.mass});
  std::sort(atoms.begin(), atoms.end(), [](const Atom& p, const Atom& q) { return p.position < q.position; });
  std::vector<Atom> merged;
  for (const Atom& x : atoms) {
    if (!merged.empty() && merged.back().position == x.position) {
      merged.back().mass += x.mass;
    } else if (x.mass > 0.0) {
      merged.push_back(x);
    }
  }
  return BinnedMeasure(std::move(w), std::move(merged));
}

double l1_distance(const BinnedMeasure& a, const BinnedMeasure& b) {
  if (a.bins() != b.bins()) throw std::invalid_argument("bin-count mismatch");
  const auto wa = a.binned();
  const auto wb = b.binned();
  double total = 0.0;
  for (std::size_t k = 0; k < wa.size(); ++k) total += std::abs(wa[k] - wb[k]);
  return total;
}

namespace {

// Cumulative distribution of a binned measure: linear inside bins, with
// jumps at the atoms.
class Cdf {
 public:
  explicit Cdf(const BinnedMeasure& m) : m_(m), prefix_(m.bins() + 1, 0.0) {
    for (std::size_t k = 0; k < m.bins(); ++k) prefix_[k + 1] = prefix_[k] + m.weights()[k];
  }

  double continuous_part(double x) const {
    const std::size_t n = m_.bins();
    const std::size_t k = m_.bin_of(x);
    const double lo = static_cast<double>(k) / static_cast<double>(n);
    return prefix_[k] + m_.weights()[k] * (x - lo) * static_cast<double>(n);
  }

  /// Atom mass at positions <= x.
  double atoms_up_to(double x) const {
    double total = 0.0;
    for (const Atom& a : m_.atoms())
      if (a.position <= x) total += a.mass;
    return total;
  }

 private:
  const BinnedMeasure& m_;
  std::vector<double> prefix_;
};

double integral_abs_linear(double d0, double d1, double length) {
  if ((d0 >= 0.0) == (d1 >= 0.0)) return 0.5 * length * (std::abs(d0) + std::abs(d1));
  return 0.5 * length * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
}

}  // namespace

double cdf_distance(const BinnedMeasure& a, const BinnedMeasure& b) {
  if (a.bins() != b.bins()) throw std::invalid_argument("bin-count mismatch");
  std::vector<double> points = uniform_grid(a.bins());
  for (const Atom& x : a.atoms()) points.push_back(x.position);
  for (const Atom& x : b.atoms()) points.push_back(x.position);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const Cdf fa(a);
  const Cdf fb(b);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const double p = points[k];
    const double q = points[k + 1];
    const double jumps = fa.atoms_up_to(p) - fb.atoms_up_to(p);
    const double d0 = fa.continuous_part(p) - fb.continuous_part(p) + jumps;
    const double d1 = fa.continuous_part(q) - fb.continuous_part(q) + jumps;
    total += integral_abs_linear(d0, d1, q - p);
  }
  return total;
}

double variation(const BinnedMeasure& m) {
  const auto w = m.weights();
  double total = 0.0;
  for (std::size_t k = 1; k < w.size(); ++k) total += std::abs(w[k] - w[k - 1]);
  return total * static_cast<double>(w.size());
}

UlamOperator::UlamOperator(std::vector<std::vector<Entry>> rows, std::optional<PiecewiseMap> map)
    : map_(std::move(map)) {
  const std::size_t n = rows.size();
  if (n < 1) throw std::invalid_argument("Ulam operator needs at least one row");
  row_start_.reserve(n + 1);
  row_start_.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = rows[i];
    std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
    double sum = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      const Entry& e = row[k];
      if (e.col >= n) throw std::invalid_argument("Ulam entry column out of range");
      if (!(e.value >= 0.0)) throw std::invalid_argument("Ulam entries must be >= 0");
      sum += e.value;
      if (!cols_.empty() && cols_.size() > row_start_.back() && cols_.back() == e.col) {
        vals_.back() += e.value;
      } else {
        cols_.push_back(e.col);
        vals_.push_back(e.value);
      }
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "Ulam row " << i << " sums to " << sum << ", expected 1";
      throw std::invalid_argument(msg.str());
    }
    row_start_.push_back(cols_.size());
  }
}

std::span<const std::size_t> UlamOperator::columns(std::size_t row) const {
  return std::span<const std::size_t>(cols_).subspan(row_start_[row], row_start_[row + 1] - row_start_[row]);
}

std::span<const double> UlamOperator::values(std::size_t row) const {
  return std::span<const double>(vals_).subspan(row_start_[row], row_start_[row + 1] - row_start_[row]);
}

double UlamOperator::at(std::size_t row, std::size_t col) const {
  const auto c = columns(row);
  const auto it = std::lower_bound(c.begin(), c.end(), col);
  if (it == c.end() || *it != col) return 0.0;
  return values(row)[static_cast<std::size_t>(it - c.begin())];
}

std::vector<double> UlamOperator::apply(std::span<const double> weights) const {
  if (weights.size() != bins()) throw std::invalid_argument("bin-count mismatch");
  std::vector<double> out(bins(), 0.0);
  for (std::size_t i = 0; i < bins(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) out[cols_[k]] += w * vals_[k];
  }
  return out;
}

void UlamOperator::write_coo(std::ostream& out) const {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < bins(); ++i)
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) out << i << ' ' << cols_[k] << ' ' << vals_[k] << '\n';
  out.precision(old);
}

namespace {

struct Piece {
  double x0;
  double x1;
  std::size_t target;
};

// Splits a branch domain into pieces that each map into a single bin.
std::vector<Piece> branch_pieces(const Branch& b, const std::vector<double>& edges) {
  const double ylo = b.image_lo();
  const double yhi = b.image_hi();
  const auto k_first = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), ylo) - edges.begin());
  const auto k_last = static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), yhi) - edges.begin()) - 1;

  std::vector<double> ys{ylo};
  for (std::size_t k = k_first; k <= k_last && k < edges.size(); ++k) ys.push_back(edges[k]);
  ys.push_back(yhi);

  std::vector<double> xs(ys.size());
  for (std::size_t t = 0; t < ys.size(); ++t) xs[t] = *b.inverse(ys[t]);
  // Endpoints exactly, interior knots monotone.
  xs.front() = b.increasing() ? b.lo() : b.hi();
  xs.back() = b.increasing() ? b.hi() : b.lo();
  for (std::size_t t = 1; t < xs.size(); ++t)
    xs[t] = b.increasing() ? std::max(xs[t], xs[t - 1]) : std::min(xs[t], xs[t - 1]);

  std::vector<Piece> pieces;
  pieces.reserve(xs.size() - 1);
  for (std::size_t t = 0; t + 1 < xs.size(); ++t) {
    const std::size_t target = k_first - 1 + t;
    pieces.push_back({std::min(xs[t], xs[t + 1]), std::max(xs[t], xs[t + 1]), target});
  }
  if (!b.increasing()) std::reverse(pieces.begin(), pieces.end());
  return pieces;
}

std::vector<UlamOperator::Entry> ulam_row(std::size_t i, const std::vector<double>& edges, const PiecewiseMap& map,
                                          const std::vector<std::vector<Piece>>& table) {
  const double lo = edges[i];
  const double hi = edges[i + 1];
  std::vector<UlamOperator::Entry> row;
  double total = 0.0;
  for (std::size_t bi = 0; bi < map.branch_count(); ++bi) {
    const Branch& b = map.branch(bi);
    if (b.hi() <= lo || b.lo() >= hi) continue;
    const auto& pieces = table[bi];
    auto it = std::upper_bound(pieces.begin(), pieces.end(), lo, [](double x, const Piece& p) { return x < p.x1; });
    for (; it != pieces.end() && it->x0 < hi; ++it) {
      const double len = std::min(hi, it->x1) - std::max(lo, it->x0);
      if (len > 0.0) {
        row.push_back({it->target, len});
        total += len;
      }
    }
  }
  std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.col < b.col; });
  std::vector<UlamOperator::Entry> merged;
  for (const auto& e : row) {
    if (!merged.empty() && merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  // Row sums equal the bin width up to rounding; normalize by the actual sum.
  for (auto& e : merged) e.value /= total;
  return merged;
}

}  // namespace

UlamOperator build_ulam(const PiecewiseMap& map, std::size_t n_bins) {
  if (n_bins < 2) throw std::invalid_argument("build_ulam needs n_bins >= 2");
  const auto edges = uniform_grid(n_bins);
  std::vector<std::vector<Piece>> table;
  table.reserve(map.branch_count());
  for (const Branch& b : map.branches()) table.push_back(branch_pieces(b, edges));

  std::vector<std::vector<UlamOperator::Entry>> rows(n_bins);
  const std::size_t workers =
      n_bins >= 2048 ? std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8)) : 1;
  if (workers == 1) {
    for (std::size_t i = 0; i < n_bins; ++i) rows[i] = ulam_row(i, edges, map, table);
  } else {
    // Each row is written by exactly one worker from read-only inputs.
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n_bins + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::size_t end = std::min(n_bins, (w + 1) * chunk);
        for (std::size_t i = w * chunk; i < end; ++i) rows[i] = ulam_row(i, edges, map, table);
      });
    }
  }
  return UlamOperator(std::move(rows), map);
}

BinnedMeasure ulam_apply(const UlamOperator& op, const BinnedMeasure& mu) {
  if (mu.bins() != op.bins()) throw std::invalid_argument("bin-count mismatch between measure and Ulam operator");
  std::vector<Atom> atoms;
  if (!mu.atoms().empty()) {
    if (!op.map()) throw std::invalid_argument("moving atoms needs an Ulam operator built from a map");
    for (const Atom& a : mu.atoms()) atoms.push_back({(*op.map())(a.position), a.mass});
  }
  return BinnedMeasure(op.apply(mu.weights()), std::move(atoms));
}

StationaryResult invariant_density_ulam(const UlamOperator& op, const StationaryOptions& options) {
  if (options.block < 1) throw std::invalid_argument("Cesaro block must be >= 1");
  const std::size_t n = op.bins();
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  std::size_t iterations = 0;
  bool converged = false;

  while (iterations < options.max_iterations) {
    std::vector<double> cur = v;
    std::vector<double> acc(n, 0.0);
    for (std::size_t t = 0; t < options.block; ++t) {
      cur = op.apply(cur);
      for (std::size_t k = 0; k < n; ++k) acc[k] += cur[k];
      ++iterations;
    }
    double sum = std::accumulate(acc.begin(), acc.end(), 0.0);
    double change = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc[k] /= sum;
      change += std::abs(acc[k] - v[k]);
    }
    v = std::move(acc);
    if (change < options.tolerance) {
      converged = true;
      break;
    }
  }

  const auto image = op.apply(v);
  double residual = 0.0;
  for (std::size_t k = 0; k < n; ++k) residual += std::abs(image[k] - v[k]);
  return {BinnedMeasure(std::move(v)), residual, iterations, converged};
}

}  // namespace nadyn
