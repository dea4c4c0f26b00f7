#include "nadyn/step_density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nadyn {

StepDensity::StepDensity(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size())
    throw std::invalid_argument("step density needs k + 1 breakpoints for k >= 1 values");
  if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
    throw std::invalid_argument("step density breakpoints must start at 0 and end at 1");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    if (!(breakpoints_[i] > breakpoints_[i - 1]))
      throw std::invalid_argument("step density breakpoints must be strictly increasing");
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("step density values must be finite and >= 0");
  const double mass = integral();
  if (std::abs(mass - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "step density integrates to " << mass << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
}

StepDensity StepDensity::uniform() { return StepDensity({0.0, 1.0}, {1.0}); }

StepDensity StepDensity::indicator(double lo, double hi) {
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw std::invalid_argument("indicator needs 0 <= lo < hi <= 1");
  std::vector<double> b{0.0};
  std::vector<double> v;
  if (lo > 0.0) {
    b.push_back(lo);
    v.push_back(0.0);
  }
  b.push_back(hi);
  v.push_back(1.0 / (hi - lo));
  if (hi < 1.0) {
    b.push_back(1.0);
    v.push_back(0.0);
  }
  return StepDensity(std::move(b), std::move(v));
}

StepDensity StepDensity::on_uniform_grid(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("grid density needs at least one cell");
  auto grid = uniform_grid(values.size());
  return StepDensity(std::move(grid), std::move(values));
}

double StepDensity::integral() const {
  double total = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) total += values_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
  return total;
}

double StepDensity::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::out_of_range("density argument outside [0, 1]");
  const auto first = breakpoints_.begin() + 1;
  const auto last = breakpoints_.end() - 1;
  return values_[static_cast<std::size_t>(std::upper_bound(first, last, x) - first)];
}

double StepDensity::integral_over(double a, double b) const {
  a = std::clamp(a, 0.0, 1.0);
  b = std::clamp(b, 0.0, 1.0);
  if (!(b > a)) return 0.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), a);
  std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  double total = 0.0;
  for (; i < values_.size() && breakpoints_[i] < b; ++i) {
    const double lo = std::max(a, breakpoints_[i]);
    const double hi = std::min(b, breakpoints_[i + 1]);
    if (hi > lo) total += values_[i] * (hi - lo);
  }
  return total;
}

StepDensity StepDensity::compacted(double tolerance) const {
  std::vector<double> b{0.0};
  std::vector<double> v{values_[0]};
  double run_mass = values_[0] * (breakpoints_[1] - breakpoints_[0]);
  double run_start = 0.0;
  for (std::size_t i = 1; i < values_.size(); ++i) {
    const double w = breakpoints_[i + 1] - breakpoints_[i];
    if (std::abs(values_[i] - v.back()) <= tolerance) {
      run_mass += values_[i] * w;
      if (tolerance > 0.0) v.back() = run_mass / (breakpoints_[i + 1] - run_start);
    } else {
      b.push_back(breakpoints_[i]);
      v.push_back(values_[i]);
      run_mass = values_[i] * w;
      run_start = breakpoints_[i];
    }
  }
  b.push_back(1.0);
  return StepDensity(std::move(b), std::move(v));
}

std::string StepDensity::to_json() const {
  nlohmann::json j;
  j["breakpoints"] = breakpoints_;
  j["values"] = values_;
  return j.dump();
}

StepDensity StepDensity::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.is_object() || !j.contains("breakpoints") || !j.contains("values"))
    throw std::invalid_argument("step density JSON needs 'breakpoints' and 'values'");
  return StepDensity(j.at("breakpoints").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
}

std::vector<double> uniform_grid(std::size_t n) {
  if (n < 1) throw std::invalid_argument("uniform grid needs at least one cell");
  std::vector<double> g(n + 1);
  for (std::size_t k = 0; k < n; ++k) g[k] = static_cast<double>(k) / static_cast<double>(n);
  g[n] = 1.0;
  return g;
}

double variation(const StepDensity& f) {
  const auto v = f.values();
  double total = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) total += std::abs(v[i] - v[i - 1]);
  return total;
}

namespace {

// Visits the common refinement of two breakpoint sets, calling
// visit(lo, hi, f_value, g_value) once per cell.
template <typename Visit>
void sweep(const StepDensity& f, const StepDensity& g, Visit&& visit) {
  const auto fb = f.breakpoints();
  const auto gb = g.breakpoints();
  std::size_t i = 0;
  std::size_t j = 0;
  double lo = 0.0;
  while (i + 1 < fb.size() && j + 1 < gb.size()) {
    const double hi = std::min(fb[i + 1], gb[j + 1]);
    if (hi > lo) visit(lo, hi, f.values()[i], g.values()[j]);
    lo = hi;
    if (fb[i + 1] == hi) ++i;
    if (gb[j + 1] == hi) ++j;
  }
}

}  // namespace

double l1_distance(const StepDensity& f, const StepDensity& g) {
  double total = 0.0;
  sweep(f, g, [&](double lo, double hi, double a, double b) { total += std::abs(a - b) * (hi - lo); });
  return total;
}

StepDensity mix(const StepDensity& f, double wf, const StepDensity& g, double wg) {
  if (!(wf >= 0.0 && wg >= 0.0)) throw std::invalid_argument("mix weights must be nonnegative");
  std::vector<double> b{0.0};
  std::vector<double> v;
  sweep(f, g, [&](double, double hi, double a, double c) {
    v.push_back(wf * a + wg * c);
    b.push_back(hi);
  });
  b.back() = 1.0;
  return StepDensity(std::move(b), std::move(v)).compacted();
}

Coarsened coarsen(const StepDensity& f, std::size_t n_bins) {
  if (n_bins < 2) throw std::invalid_argument("coarsen needs n_bins >= 2");
  auto grid = uniform_grid(n_bins);
  std::vector<double> values(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k)
    values[k] = f.integral_over(grid[k], grid[k + 1]) / (grid[k + 1] - grid[k]);
  StepDensity coarse = StepDensity(std::move(grid), std::move(values)).compacted();
  const double error = l1_distance(f, coarse);
  return {std::move(coarse), error};
}

namespace {

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

}  // namespace

StepDensity random_step_density(std::mt19937_64& rng, std::size_t max_cells) {
  if (max_cells < 1) throw std::invalid_argument("random_step_density needs max_cells >= 1");
  const std::size_t cells = 1 + rng() % max_cells;
  std::vector<double> interior;
  while (interior.size() + 1 < cells) {
    const double x = unit_draw(rng);
    if (x > 0.0 && std::find(interior.begin(), interior.end(), x) == interior.end()) interior.push_back(x);
  }
  std::sort(interior.begin(), interior.end());
  std::vector<double> breakpoints{0.0};
  breakpoints.insert(breakpoints.end(), interior.begin(), interior.end());
  breakpoints.push_back(1.0);

  std::vector<double> values(cells);
  double mass = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    values[i] = rng() % 4 == 0 ? 0.0 : unit_draw(rng);
    mass += values[i] * (breakpoints[i + 1] - breakpoints[i]);
  }
  if (mass <= 0.0) return StepDensity::uniform();
  for (double& v : values) v /= mass;
  return StepDensity(std::move(breakpoints), std::move(values));
}

}  // namespace nadyn
