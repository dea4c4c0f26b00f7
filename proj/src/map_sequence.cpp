#include "nadyn/map_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nadyn {

MapSequence::MapSequence(std::string name, TermRule term, PiecewiseMap limit, GapRule gap)
    : name_(std::move(name)), term_(std::move(term)), limit_(std::move(limit)), gap_(std::move(gap)) {
  if (!term_ || !gap_) throw std::invalid_argument("map sequence needs term and gap rules");
}

MapSequence::MapSequence(std::string name, TermRule term, PiecewiseMap limit)
    : name_(std::move(name)), term_(std::move(term)), limit_(std::move(limit)), gap_is_estimate_(true) {
  if (!term_) throw std::invalid_argument("map sequence needs a term rule");
  gap_ = [term = term_, limit = limit_](std::size_t n) { return sup_distance_on_grid(term(n), limit); };
}

MapSequence MapSequence::constant(const PiecewiseMap& map) {
  MapSequence seq("constant(" + map.name() + ")", [map](std::size_t) { return map; }, map,
                  [](std::size_t) { return 0.0; });
  seq.constant_ = true;
  return seq;
}

PiecewiseMap MapSequence::term(std::size_t n) const {
  if (n == 0) return PiecewiseMap::identity();
  return term_(n);
}

double MapSequence::uniform_gap(std::size_t n) const { return gap_(n); }

double uniform_distance(const MapSequence& seq, std::size_t n) {
  if (n < 1) throw std::invalid_argument("uniform_distance needs n >= 1");
  return seq.uniform_gap(n);
}

double sup_distance_on_grid(const PiecewiseMap& f, const PiecewiseMap& g, std::size_t points) {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  double gap = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double x = k + 1 == points ? 1.0 : static_cast<double>(k) / static_cast<double>(points - 1);
    gap = std::max(gap, std::abs(f(x) - g(x)));
  }
  return gap;
}

LYConstants uniform_ly_constants(const MapSequence& seq, std::size_t first, std::size_t last) {
  if (first < 1 || last < first) throw std::invalid_argument("uniform_ly_constants needs 1 <= first <= last");
  LYConstants u = ly_constants(seq.term(first));
  for (std::size_t n = first + 1; n <= last; ++n) {
    const LYConstants c = ly_constants(seq.term(n));
    u.q_u = std::max(u.q_u, c.q);
    u.s_u = std::min(u.s_u, c.s);
    u.h = std::min(u.h, c.h);
    u.second_derivative_max = std::max(u.second_derivative_max, c.second_derivative_max);
  }
  u.q = u.q_u;
  u.s = u.s_u;
  u.A = 2.0 / u.s;
  u.B = u.second_derivative_max / u.s + 2.0 / u.h;
  u.contracting = u.s > 2.0;
  return u;
}

std::vector<std::string> family_names() {
  return {"example33", "perturbed_tripling", "constant", "markov_oracle"};
}

namespace {

double parse_param(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v))
    throw std::invalid_argument("invalid " + what + " parameter '" + text + "'");
  return v;
}

}  // namespace

MapSequence make_family(const std::string& name, const std::vector<std::string>& params) {
  if (name == "example33") {
    if (!params.empty()) throw std::invalid_argument("family example33 takes no parameters");
    // The family starts at n = 2; index 1 aliases n = 2.
    return MapSequence(
        "example33", [](std::size_t n) { return example33_map(std::max<std::size_t>(n, 2)); },
        example33_limit_map(),
        [](std::size_t n) { return 1.0 / (2.0 * static_cast<double>(std::max<std::size_t>(n, 2))); });
  }
  if (name == "perturbed_tripling") {
    if (params.size() > 1) throw std::invalid_argument("family perturbed_tripling takes at most one parameter (strength)");
    const double strength = params.empty() ? 1.0 : parse_param(params[0], "perturbed_tripling strength");
    if (!(std::abs(strength) <= 1.0))
      throw std::invalid_argument("perturbed_tripling strength must lie in [-1, 1]");
    // sup_t |strength/n * t(1 - t)| = |strength| / (4n), attained at the cell midpoints.
    return MapSequence(
        "perturbed_tripling", [strength](std::size_t n) { return perturbed_tripling_map(n, strength); },
        tripling_map(), [strength](std::size_t n) { return std::abs(strength) / (4.0 * static_cast<double>(n)); });
  }
  if (name == "constant") {
    if (params.size() != 1) throw std::invalid_argument("family constant takes exactly one parameter (a map name)");
    return MapSequence::constant(builtin_map(params[0]));
  }
  if (name == "markov_oracle") {
    if (!params.empty()) throw std::invalid_argument("family markov_oracle takes no parameters");
    return MapSequence::constant(markov_oracle_map());
  }
  std::string known;
  for (const auto& n : family_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown family '" + name + "'; supported families: " + known);
}

}  // namespace nadyn
