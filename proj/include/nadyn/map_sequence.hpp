#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "nadyn/interval_maps.hpp"

namespace nadyn {

/// Indexed family n -> tau_n converging uniformly to a limit map.
///
/// Index 0 always denotes the identity. `uniform_gap(n)` bounds
/// sup_x |tau_n(x) - tau(x)|; it is exact when the family supplies it and a
/// grid estimate otherwise (see `gap_is_estimate`).
class MapSequence {
 public:
  using TermRule = std::function<PiecewiseMap(std::size_t)>;
  using GapRule = std::function<double(std::size_t)>;

  MapSequence(std::string name, TermRule term, PiecewiseMap limit, GapRule gap);
  /// Without an analytic gap: the gap is estimated on a uniform grid.
  MapSequence(std::string name, TermRule term, PiecewiseMap limit);

  static MapSequence constant(const PiecewiseMap& map);

  const std::string& name() const { return name_; }
  PiecewiseMap term(std::size_t n) const;
  const PiecewiseMap& limit() const { return limit_; }
  double uniform_gap(std::size_t n) const;
  bool gap_is_estimate() const { return gap_is_estimate_; }
  /// True when every term equals the limit (lets callers reuse operators).
  bool is_constant() const { return constant_; }

 private:
  std::string name_;
  TermRule term_;
  PiecewiseMap limit_;
  GapRule gap_;
  bool gap_is_estimate_ = false;
  bool constant_ = false;
};

/// sup_x |tau_n(x) - tau(x)| bound; requires n >= 1.
double uniform_distance(const MapSequence& seq, std::size_t n);

/// Grid estimate of sup_x |f(x) - g(x)| on `points` equispaced samples.
double sup_distance_on_grid(const PiecewiseMap& f, const PiecewiseMap& g, std::size_t points = 10001);

/// Constants taken uniformly over terms first..last: q_u = max q, s_u = min s,
/// h = min h, and A, B formed from those bounds.
LYConstants uniform_ly_constants(const MapSequence& seq, std::size_t first, std::size_t last);

/// Families: example33, perturbed_tripling [strength], constant <map>,
/// markov_oracle. Throws std::invalid_argument for unknown names or bad params.
MapSequence make_family(const std::string& name, const std::vector<std::string>& params = {});
std::vector<std::string> family_names();

}  // namespace nadyn
