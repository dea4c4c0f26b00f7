#include "nadyn/frobenius_perron.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace nadyn {

namespace {

// Image breakpoints closer than this are treated as one point.
constexpr double kSnap = 1e-14;
// Adjacent output cells whose values differ by less than this are merged.
constexpr double kValueMerge = 1e-13;
constexpr double kMarkovMatch = 1e-12;

struct Event {
  double y;
  double delta;
};

std::size_t nearest_index(const std::vector<double>& grid, double y) {
  auto it = std::lower_bound(grid.begin(), grid.end(), y);
  if (it == grid.end()) return grid.size() - 1;
  if (it == grid.begin()) return 0;
  const auto prev = std::prev(it);
  return static_cast<std::size_t>((y - *prev <= *it - y ? prev : it) - grid.begin());
}

// Image of x under branch b, exact at the branch endpoints.
double branch_image(const Branch& b, double x) {
  if (x == b.lo()) return b.increasing() ? b.image_lo() : b.image_hi();
  if (x == b.hi()) return b.increasing() ? b.image_hi() : b.image_lo();
  return std::clamp(b(x), b.image_lo(), b.image_hi());
}

}  // namespace

StepDensity fp_step(const PiecewiseMap& map, const StepDensity& f) {
  if (!map.piecewise_affine())
    throw std::invalid_argument("fp_step needs a piecewise-affine map; use the Ulam discretization for '" +
                                map.name() + "'");
  const auto fb = f.breakpoints();
  const auto fv = f.values();

  std::vector<Event> events;
  events.reserve(2 * (fv.size() + map.branch_count()));
  for (const Branch& b : map.branches()) {
    const double scale = 1.0 / std::abs(b.slope());
    // First cell of f overlapping [b.lo, b.hi).
    std::size_t i = static_cast<std::size_t>(std::upper_bound(fb.begin(), fb.end(), b.lo()) - fb.begin()) - 1;
    for (; i < fv.size() && fb[i] < b.hi(); ++i) {
      const double u = std::max(fb[i], b.lo());
      const double v = std::min(fb[i + 1], b.hi());
      if (!(v > u) || fv[i] == 0.0) continue;
      const double yu = branch_image(b, u);
      const double yv = branch_image(b, v);
      const double w = fv[i] * scale;
      events.push_back({std::min(yu, yv), w});
      events.push_back({std::max(yu, yv), -w});
    }
  }

  std::vector<double> points{0.0, 1.0};
  points.reserve(events.size() + 2);
  for (const Event& e : events) points.push_back(e.y);
  std::sort(points.begin(), points.end());
  std::vector<double> grid;
  grid.reserve(points.size());
  for (double p : points) {
    if (grid.empty() || p - grid.back() > kSnap) grid.push_back(p);
  }
  // Keep 0 and 1 as the exact endpoints even after snapping.
  grid.front() = 0.0;
  if (1.0 - grid.back() <= kSnap) {
    grid.back() = 1.0;
  } else {
    grid.push_back(1.0);
  }

  std::vector<double> diff(grid.size(), 0.0);
  for (const Event& e : events) diff[nearest_index(grid, e.y)] += e.delta;

  std::vector<double> values(grid.size() - 1);
  double running = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    running += diff[k];
    values[k] = std::abs(running) < kValueMerge ? 0.0 : running;
    if (values[k] < 0.0) values[k] = 0.0;
  }
  // Drop cells that collapsed to zero width after snapping.
  std::vector<double> b{0.0};
  std::vector<double> v;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    if (!(grid[k + 1] > b.back())) continue;
    b.push_back(grid[k + 1]);
    v.push_back(values[k]);
  }
  return StepDensity(std::move(b), std::move(v)).compacted(kValueMerge);
}

LYReport ly_inequality_check(const PiecewiseMap& map, const StepDensity& f) {
  LYReport r;
  r.constants = ly_constants(map);
  r.lhs = variation(fp_step(map, f));
  r.rhs = r.constants.A * variation(f) + r.constants.B * f.integral();
  r.holds = r.lhs <= r.rhs + 1e-10;
  return r;
}

StepDensity markov_exact_invariant(const PiecewiseMap& map, std::span<const double> markov_partition) {
  if (!map.piecewise_affine()) throw std::invalid_argument("markov_exact_invariant needs a piecewise-affine map");
  const std::vector<double> part(markov_partition.begin(), markov_partition.end());
  if (part.size() < 2 || part.front() != 0.0 || part.back() != 1.0)
    throw std::invalid_argument("Markov partition must start at 0 and end at 1");
  for (std::size_t i = 1; i < part.size(); ++i)
    if (!(part[i] > part[i - 1])) throw std::invalid_argument("Markov partition must be strictly increasing");

  auto match = [&](double y) -> std::ptrdiff_t {
    const std::size_t k = nearest_index(part, y);
    return std::abs(part[k] - y) <= kMarkovMatch ? static_cast<std::ptrdiff_t>(k) : -1;
  };
  for (double a : map.partition()) {
    if (match(a) < 0) {
      std::ostringstream msg;
      msg << "Markov partition does not refine the map partition (missing point " << a << ")";
      throw std::invalid_argument(msg.str());
    }
  }

  const std::size_t r = part.size() - 1;
  Eigen::MatrixXd transfer = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
  for (std::size_t i = 0; i < r; ++i) {
    const Branch& b = map.branch(map.branch_index(0.5 * (part[i] + part[i + 1])));
    const double y1 = branch_image(b, part[i]);
    const double y2 = branch_image(b, part[i + 1]);
    const auto j1 = match(std::min(y1, y2));
    const auto j2 = match(std::max(y1, y2));
    if (j1 < 0 || j2 < 0) {
      std::ostringstream msg;
      msg << "map is not Markov for this partition: image of cell [" << part[i] << ", " << part[i + 1]
          << "] is [" << std::min(y1, y2) << ", " << std::max(y1, y2) << "]";
      throw std::invalid_argument(msg.str());
    }
    for (auto j = j1; j < j2; ++j) transfer(j, static_cast<Eigen::Index>(i)) += 1.0 / std::abs(b.slope());
  }

  const Eigen::MatrixXd system = transfer - Eigen::MatrixXd::Identity(transfer.rows(), transfer.cols());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  lu.setThreshold(1e-10);
  if (lu.dimensionOfKernel() != 1) {
    std::ostringstream msg;
    msg << "invariant step density is not unique on this partition (fixed space dimension "
        << lu.dimensionOfKernel() << ")";
    throw std::domain_error(msg.str());
  }

  // Stack the normalization row under the fixed-point equations.
  Eigen::MatrixXd augmented(system.rows() + 1, system.cols());
  augmented << system, Eigen::RowVectorXd::Zero(system.cols());
  for (std::size_t i = 0; i < r; ++i) augmented(system.rows(), static_cast<Eigen::Index>(i)) = part[i + 1] - part[i];
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(augmented.rows());
  rhs(system.rows()) = 1.0;
  const Eigen::VectorXd solution = augmented.colPivHouseholderQr().solve(rhs);

  std::vector<double> values(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double v = solution(static_cast<Eigen::Index>(i));
    if (v < -1e-10) throw std::domain_error("Markov system produced a negative density value");
    values[i] = std::max(v, 0.0);
  }
  return StepDensity(part, std::move(values));
}

}  // namespace nadyn
