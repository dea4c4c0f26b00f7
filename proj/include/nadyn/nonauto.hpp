#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "nadyn/map_sequence.hpp"
#include "nadyn/observable.hpp"
#include "nadyn/step_density.hpp"
#include "nadyn/ulam.hpp"

namespace nadyn {

/// Terms m..n of a sequence (index 0 is the identity).
std::vector<PiecewiseMap> terms(const MapSequence& seq, std::size_t m, std::size_t n);

/// tau_(m,n)(x) = tau_n(... tau_{m+1}(tau_m(x))); throws when m > n.
double compose_eval(const MapSequence& seq, std::size_t m, std::size_t n, double x);

/// nu_n = (tau_(0,n))_* eta at the bin resolution of eta, one Ulam operator per term.
BinnedMeasure pushforward(const MapSequence& seq, std::size_t n, const BinnedMeasure& eta);

/// Integral of g against a binned measure (bin mass spread uniformly, atoms exact).
double expectation(const BinnedMeasure& mu, const Observable& g);
/// Integral of g against a step density, exact cell by cell.
double expectation(const StepDensity& f, const Observable& g);

struct CesaroRecord {
  std::size_t n = 0;
  double l1_to_reference = 0.0;
  double invariance_defect = 0.0;
  double kb_defect = 0.0;
  double variation = 0.0;
  double mass = 0.0;
  double coarsen_budget = 0.0;
};

/// Per-step diagnostics of a running Cesaro average.
struct CesaroTrace {
  std::vector<CesaroRecord> rows;
  /// Binned snapshots of the running average, when requested.
  std::vector<std::pair<std::size_t, std::vector<double>>> snapshots;
  std::optional<BinnedMeasure> final_measure;
  std::optional<StepDensity> final_density;

  static constexpr const char* kCsvHeader = "n,l1_to_reference,invariance_defect,kb_defect,variation,mass,coarsen_budget";
  void write_csv(std::ostream& out) const;
};

struct MeasureTraceOptions {
  Observable observable = Observable::monomial(1);
  /// Weak-* reference; l1_to_reference is NaN without one.
  std::optional<BinnedMeasure> reference;
  std::size_t snapshot_every = 0;
};

/// Running averages mu_k = (1/k) sum_{i<=k} nu_i for k = 1..n in one sweep.
///
/// Columns: l1_to_reference and invariance_defect are CDF-L1 (Wasserstein-1)
/// distances, to the reference and between mu_k and tau_* mu_k; kb_defect is
/// |mu_k(g) - mu_k(g o tau)|, with tau_* taken through the limit map's Ulam
/// operator and atoms moved exactly.
CesaroTrace cesaro_measures(const MapSequence& seq, std::size_t n, const BinnedMeasure& eta,
                            const MeasureTraceOptions& options = {});

/// |mu_n(g) - mu_n(g o tau)| after n steps.
double kb_defect(const MapSequence& seq, std::size_t n, const Observable& g, const BinnedMeasure& eta);

enum class TransportMode { Exact, Ulam };

struct DensityTraceOptions {
  TransportMode mode = TransportMode::Exact;
  /// Ulam resolution, and coarsening grid in exact mode.
  std::size_t n_bins = 1024;
  /// Exact mode coarsens any step density with more cells than this.
  std::size_t breakpoint_cap = 1'000'000;
  Observable observable = Observable::monomial(1);
  std::optional<StepDensity> reference;
  std::size_t snapshot_every = 0;
};

/// Running averages f_k = (1/k) sum_{i<=k} phi_i with phi_i = P_{tau_i} phi_{i-1},
/// phi_0 = f. `variation` records V(phi_k); `coarsen_budget` accumulates the
/// L1 error of every coarsening performed so far.
CesaroTrace cesaro_densities(const MapSequence& seq, std::size_t n, const StepDensity& f,
                             const DensityTraceOptions& options = {});

/// ||P_tau f - f||_1 by exact transport (piecewise-affine limit).
double invariance_defect(const PiecewiseMap& limit, const StepDensity& f);
/// ||f M - f||_1 with M the limit's Ulam operator at f's resolution.
double invariance_defect(const PiecewiseMap& limit, const BinnedMeasure& f);

}  // namespace nadyn
