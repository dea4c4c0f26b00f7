#pragma once

#include <span>

#include "nadyn/interval_maps.hpp"
#include "nadyn/step_density.hpp"

namespace nadyn {

/// Exact transfer operator on step densities for a piecewise-affine map:
/// (P f)(y) = sum over branches of f(x) / |slope| at the branch preimage x.
///
/// Output breakpoints are the branch images of f's breakpoints and of the
/// branch endpoints, so their count grows by at most 2q per application.
/// Throws std::invalid_argument when the map has analytic branches.
StepDensity fp_step(const PiecewiseMap& map, const StepDensity& f);

struct LYReport {
  double lhs = 0.0;  ///< V(P f)
  double rhs = 0.0;  ///< A V(f) + B int|f|
  bool holds = false;
  LYConstants constants;
};

/// Evaluates both sides of V(P f) <= A V(f) + B int|f| with the map's own
/// constants. `holds` allows 1e-10 of floating slack.
LYReport ly_inequality_check(const PiecewiseMap& map, const StepDensity& f);

/// Invariant density of a piecewise-affine Markov map, constant on the cells
/// of `markov_partition`, from the finite linear system it satisfies.
///
/// The partition must refine the map's partition and every cell image must be
/// a union of cells; otherwise std::invalid_argument is thrown. A non-unique
/// invariant density raises std::domain_error.
StepDensity markov_exact_invariant(const PiecewiseMap& map, std::span<const double> markov_partition);

}  // namespace nadyn
