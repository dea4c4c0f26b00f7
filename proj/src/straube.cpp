#include "nadyn/straube.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nadyn/frobenius_perron.hpp"
#include "nadyn/step_density.hpp"

namespace nadyn {

IntervalSet preimage_composition(const MapSequence& seq, std::size_t k, const IntervalSet& e, std::size_t start,
                                 std::size_t piece_cap) {
  IntervalSet current = e;
  for (std::size_t i = k; i >= start && i >= 1; --i) {
    current = seq.term(i).preimage(current);
    if (current.size() > piece_cap)
      throw std::length_error("preimage at index " + std::to_string(i) + " has " + std::to_string(current.size()) +
                              " pieces, above the cap of " + std::to_string(piece_cap));
    if (current.empty()) break;
  }
  return current;
}

namespace {

constexpr std::size_t kDensityCellCap = 1'000'000;

// Transported densities phi_k = P_{tau_k} ... P_{tau_start} 1 for k = first..K,
// or nothing when some term is not piecewise affine.
std::optional<std::vector<StepDensity>> transported_densities(const MapSequence& seq, std::size_t start,
                                                               std::size_t K) {
  const std::size_t first = std::max<std::size_t>(start, 1);
  for (std::size_t k = first; k <= K; ++k)
    if (!seq.term(k).piecewise_affine()) return std::nullopt;
  std::vector<StepDensity> out;
  out.reserve(K >= first ? K - first + 1 : 0);
  StepDensity phi = StepDensity::uniform();
  for (std::size_t k = first; k <= K; ++k) {
    phi = fp_step(seq.term(k), phi);
    if (phi.cell_count() > kDensityCellCap)
      throw std::length_error("transported density at index " + std::to_string(k) + " exceeds " +
                              std::to_string(kDensityCellCap) + " cells");
    out.push_back(phi);
  }
  return out;
}

double mass_on(const StepDensity& phi, const IntervalSet& e) {
  double total = 0.0;
  for (const Interval& piece : e.pieces()) total += phi.integral_over(piece.lo, piece.hi);
  return total;
}

}  // namespace

StraubeSup straube_sup(const MapSequence& seq, const IntervalSet& e, std::size_t K, std::size_t start) {
  if (K < 1) throw std::invalid_argument("straube_sup needs K >= 1");
  const std::size_t first = std::max<std::size_t>(start, 1);
  StraubeSup best{-1.0, first};
  if (const auto densities = transported_densities(seq, start, K)) {
    for (std::size_t k = first; k <= K; ++k) {
      const double v = mass_on((*densities)[k - first], e);
      if (v > best.value) best = {v, k};
    }
  } else {
    for (std::size_t k = first; k <= K; ++k) {
      const double v = preimage_composition(seq, k, e, start).measure();
      if (v > best.value) best = {v, k};
    }
  }
  if (best.value < 0.0) best = {e.measure(), start};
  return best;
}

namespace {

// Endpoint grid indices of up to three pieces, in enumeration order.
struct Candidate {
  std::array<std::size_t, 6> ends{};
  std::size_t pieces = 0;

  IntervalSet to_set(double cell) const {
    std::vector<Interval> v;
    for (std::size_t p = 0; p < pieces; ++p)
      v.push_back({static_cast<double>(ends[2 * p]) * cell, static_cast<double>(ends[2 * p + 1]) * cell});
    return IntervalSet(std::move(v));
  }
};

constexpr std::size_t kCandidateCap = 20'000'000;

// Depth-first enumeration in lexicographic order of the endpoint sequence, a
// prefix before its extensions. Pieces are separated by at least one cell so
// every union has a single representation.
template <typename Visit>
void enumerate(Candidate& c, std::size_t from, std::size_t cells_left, std::size_t grid, std::size_t& count,
               Visit&& visit) {
  if (c.pieces == 3) return;
  for (std::size_t a = from; a < grid; ++a) {
    for (std::size_t len = 1; len <= cells_left && a + len <= grid; ++len) {
      c.ends[2 * c.pieces] = a;
      c.ends[2 * c.pieces + 1] = a + len;
      ++c.pieces;
      if (++count > kCandidateCap)
        throw std::length_error("straube probe search family exceeds " + std::to_string(kCandidateCap) + " sets");
      visit(c);
      enumerate(c, a + len + 1, cells_left - len, grid, count, visit);
      --c.pieces;
    }
  }
}

}  // namespace

StraubeReport straube_probe(const MapSequence& seq, double delta, double alpha, std::size_t K, std::size_t L,
                            std::size_t start) {
  if (K < 1) throw std::invalid_argument("straube_probe needs K >= 1");
  if (L < 1 || L > 16) throw std::invalid_argument("straube_probe needs 1 <= L <= 16");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("straube_probe needs 0 < alpha < 1");

  StraubeReport report;
  report.delta = delta;
  report.alpha = alpha;
  report.K = K;
  report.L = L;
  report.start = start;
  const std::size_t grid = std::size_t{1} << L;
  const double cell = 1.0 / static_cast<double>(grid);
  // Largest cell count c with c / 2^L < delta.
  const double ratio = delta * static_cast<double>(grid);
  if (!(ratio > 0.0)) return report;
  const auto max_cells = static_cast<std::size_t>(std::min<double>(std::ceil(ratio) - 1.0, static_cast<double>(grid)));
  if (max_cells == 0) return report;

  const std::size_t first = std::max<std::size_t>(start, 1);
  const auto densities = transported_densities(seq, start, K);
  // prefix[k - first][j] = mass of [0, j / 2^L] under phi_k.
  std::vector<std::vector<double>> prefix;
  if (densities) {
    for (const StepDensity& phi : *densities) {
      std::vector<double> p(grid + 1, 0.0);
      for (std::size_t j = 0; j < grid; ++j)
        p[j + 1] = p[j] + phi.integral_over(static_cast<double>(j) * cell, static_cast<double>(j + 1) * cell);
      prefix.push_back(std::move(p));
    }
  }

  auto evaluate = [&](const Candidate& c) -> StraubeSup {
    if (!densities) return straube_sup(seq, c.to_set(cell), K, start);
    StraubeSup best{-1.0, first};
    for (std::size_t k = first; k <= K; ++k) {
      const auto& p = prefix[k - first];
      double v = 0.0;
      for (std::size_t q = 0; q < c.pieces; ++q) v += p[c.ends[2 * q + 1]] - p[c.ends[2 * q]];
      if (v > best.value) best = {v, k};
    }
    return best;
  };

  Candidate c;
  std::size_t count = 0;
  enumerate(c, 0, max_cells, grid, count, [&](const Candidate& cand) {
    const StraubeSup s = evaluate(cand);
    if (s.value > report.max_sup || !report.max_set) {
      report.max_sup = s.value;
      report.max_set = cand.to_set(cell);
    }
    if (!report.violation && s.value >= alpha) {
      report.violation = true;
      report.witness = cand.to_set(cell);
      report.witness_sup = s.value;
      report.witness_k = s.argmax;
    }
  });
  report.candidates = count;
  return report;
}

}  // namespace nadyn
