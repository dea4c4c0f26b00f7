#pragma once

#include <cstddef>
#include <optional>

#include "nadyn/interval_set.hpp"
#include "nadyn/map_sequence.hpp"

namespace nadyn {

/// Upper limit on pieces carried through a backward composition.
inline constexpr std::size_t kPreimagePieceCap = std::size_t{1} << 20;

/// tau_(start,k)^{-1}(E) = tau_start^{-1}(... tau_k^{-1}(E)), applying tau_k^{-1}
/// first; index 0 is the identity and k < start gives E back. Throws
/// std::length_error when an intermediate set exceeds `piece_cap` pieces.
IntervalSet preimage_composition(const MapSequence& seq, std::size_t k, const IntervalSet& e, std::size_t start = 0,
                                 std::size_t piece_cap = kPreimagePieceCap);

struct StraubeSup {
  double value = 0.0;
  std::size_t argmax = 0;
};

/// max over k = max(start, 1)..K of m(tau_(start,k)^{-1}(E)) with m Lebesgue.
///
/// Piecewise-affine sequences integrate the transported density
/// P_(start,k) 1 over E, which equals the preimage measure; other sequences go
/// through preimage_composition.
StraubeSup straube_sup(const MapSequence& seq, const IntervalSet& e, std::size_t K, std::size_t start = 0);

struct StraubeReport {
  double delta = 0.0;
  double alpha = 0.0;
  std::size_t K = 0;
  std::size_t L = 0;
  std::size_t start = 0;
  /// Candidate sets examined: unions of at most three intervals with
  /// endpoints on the grid j / 2^L and total measure below delta.
  std::size_t candidates = 0;
  bool violation = false;
  /// Lexicographically smallest violating set by its endpoint sequence.
  std::optional<IntervalSet> witness;
  double witness_sup = 0.0;
  std::size_t witness_k = 0;
  /// Largest sup over all candidates, with the set attaining it.
  double max_sup = 0.0;
  std::optional<IntervalSet> max_set;
};

/// Searches the dyadic family for an E with m(E) < delta and
/// sup_{k <= K} m(tau_(start,k)^{-1}(E)) >= alpha. A clean report only says
/// no violation exists inside the searched family. delta <= 0 leaves the
/// family empty. Requires 1 <= L <= 16.
StraubeReport straube_probe(const MapSequence& seq, double delta, double alpha, std::size_t K, std::size_t L,
                            std::size_t start = 0);

}  // namespace nadyn
