#include "nadyn/nonauto.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nadyn/format.hpp"
#include "nadyn/frobenius_perron.hpp"

namespace nadyn {

std::vector<PiecewiseMap> terms(const MapSequence& seq, std::size_t m, std::size_t n) {
  if (m > n) throw std::invalid_argument("composition needs m <= n");
  std::vector<PiecewiseMap> out;
  out.reserve(n - m + 1);
  for (std::size_t i = m; i <= n; ++i) out.push_back(seq.term(i));
  return out;
}

double compose_eval(const MapSequence& seq, std::size_t m, std::size_t n, double x) {
  if (m > n) throw std::invalid_argument("compose_eval needs m <= n");
  for (std::size_t i = m; i <= n; ++i) {
    if (i == 0) continue;
    x = seq.term(i)(x);
  }
  return x;
}

namespace {

// Hands out the Ulam operator of each term in turn, building it once for
// constant sequences.
class UlamChain {
 public:
  UlamChain(const MapSequence& seq, std::size_t n_bins) : seq_(seq), n_bins_(n_bins) {}

  const UlamOperator& operator()(std::size_t i) {
    if (!current_ || !seq_.is_constant()) current_.emplace(build_ulam(seq_.term(i), n_bins_));
    return *current_;
  }

 private:
  const MapSequence& seq_;
  std::size_t n_bins_;
  std::optional<UlamOperator> current_;
};

}  // namespace

BinnedMeasure pushforward(const MapSequence& seq, std::size_t n, const BinnedMeasure& eta) {
  UlamChain chain(seq, eta.bins());
  BinnedMeasure nu = eta;
  for (std::size_t i = 1; i <= n; ++i) nu = ulam_apply(chain(i), nu);
  return nu;
}

double expectation(const BinnedMeasure& mu, const Observable& g) {
  const auto w = mu.weights();
  const double n = static_cast<double>(w.size());
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] == 0.0) continue;
    const double lo = static_cast<double>(k) / n;
    const double hi = k + 1 == w.size() ? 1.0 : static_cast<double>(k + 1) / n;
    total += w[k] * g.integral(lo, hi) / (hi - lo);
  }
  for (const Atom& a : mu.atoms()) total += a.mass * g(a.position);
  return total;
}

double expectation(const StepDensity& f, const Observable& g) {
  const auto b = f.breakpoints();
  const auto v = f.values();
  double total = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k] != 0.0) total += v[k] * g.integral(b[k], b[k + 1]);
  return total;
}

void CesaroTrace::write_csv(std::ostream& out) const {
  out << kCsvHeader << '\n';
  for (const CesaroRecord& r : rows) {
    out << r.n << ',' << format_double(r.l1_to_reference) << ',' << format_double(r.invariance_defect) << ','
        << format_double(r.kb_defect) << ',' << format_double(r.variation) << ',' << format_double(r.mass) << ','
        << format_double(r.coarsen_budget) << '\n';
  }
}

CesaroTrace cesaro_measures(const MapSequence& seq, std::size_t n, const BinnedMeasure& eta,
                            const MeasureTraceOptions& options) {
  if (n < 1) throw std::invalid_argument("cesaro_measures needs n >= 1");
  if (options.reference && options.reference->bins() != eta.bins())
    throw std::invalid_argument("reference measure has a different bin count");
  const UlamOperator limit_op = build_ulam(seq.limit(), eta.bins());
  UlamChain chain(seq, eta.bins());

  CesaroTrace trace;
  trace.rows.reserve(n);
  BinnedMeasure nu = eta;
  std::optional<BinnedMeasure> avg;
  for (std::size_t i = 1; i <= n; ++i) {
    nu = ulam_apply(chain(i), nu);
    const double k = static_cast<double>(i);
    avg = i == 1 ? nu : mix(*avg, (k - 1.0) / k, nu, 1.0 / k);

    const BinnedMeasure image = ulam_apply(limit_op, *avg);
    CesaroRecord r;
    r.n = i;
    r.l1_to_reference =
        options.reference ? cdf_distance(*avg, *options.reference) : std::numeric_limits<double>::quiet_NaN();
    r.invariance_defect = cdf_distance(image, *avg);
    r.kb_defect = std::abs(expectation(*avg, options.observable) - expectation(image, options.observable));
    r.variation = variation(*avg);
    r.mass = avg->mass();
    trace.rows.push_back(r);
    if (options.snapshot_every > 0 && i % options.snapshot_every == 0) trace.snapshots.emplace_back(i, avg->binned());
  }
  trace.final_measure = std::move(avg);
  return trace;
}

double kb_defect(const MapSequence& seq, std::size_t n, const Observable& g, const BinnedMeasure& eta) {
  MeasureTraceOptions options;
  options.observable = g;
  return cesaro_measures(seq, n, eta, options).rows.back().kb_defect;
}

double invariance_defect(const PiecewiseMap& limit, const StepDensity& f) {
  return l1_distance(fp_step(limit, f), f);
}

double invariance_defect(const PiecewiseMap& limit, const BinnedMeasure& f) {
  return l1_distance(ulam_apply(build_ulam(limit, f.bins()), f), f);
}

namespace {

CesaroTrace exact_density_trace(const MapSequence& seq, std::size_t n, const StepDensity& f,
                                const DensityTraceOptions& options) {
  const PiecewiseMap& limit = seq.limit();
  std::optional<UlamOperator> limit_op;
  if (!limit.piecewise_affine()) limit_op.emplace(build_ulam(limit, options.n_bins));

  CesaroTrace trace;
  trace.rows.reserve(n);
  double budget = 0.0;
  auto cap = [&](StepDensity d) {
    if (d.cell_count() <= options.breakpoint_cap) return d;
    Coarsened c = coarsen(d, options.n_bins);
    budget += c.error;
    return std::move(c.density);
  };

  StepDensity phi = f;
  std::optional<StepDensity> avg;
  for (std::size_t i = 1; i <= n; ++i) {
    const PiecewiseMap map = seq.term(i);
    if (!map.piecewise_affine())
      throw std::invalid_argument("exact transport needs piecewise-affine terms; term " + std::to_string(i) + " ('" +
                                  map.name() + "') is not");
    phi = cap(fp_step(map, phi));
    const double k = static_cast<double>(i);
    avg = cap(i == 1 ? phi : mix(*avg, (k - 1.0) / k, phi, 1.0 / k));

    CesaroRecord r;
    r.n = i;
    r.l1_to_reference =
        options.reference ? l1_distance(*avg, *options.reference) : std::numeric_limits<double>::quiet_NaN();
    if (limit_op) {
      const BinnedMeasure binned = BinnedMeasure::from_density(*avg, options.n_bins);
      const BinnedMeasure image = ulam_apply(*limit_op, binned);
      r.invariance_defect = l1_distance(image, binned);
      r.kb_defect = std::abs(expectation(binned, options.observable) - expectation(image, options.observable));
    } else {
      const StepDensity image = fp_step(limit, *avg);
      r.invariance_defect = l1_distance(image, *avg);
      r.kb_defect = std::abs(expectation(*avg, options.observable) - expectation(image, options.observable));
    }
    r.variation = variation(phi);
    r.mass = avg->integral();
    r.coarsen_budget = budget;
    trace.rows.push_back(r);
    if (options.snapshot_every > 0 && i % options.snapshot_every == 0)
      trace.snapshots.emplace_back(i, BinnedMeasure::from_density(*avg, options.n_bins).binned());
  }
  trace.final_density = std::move(avg);
  return trace;
}

CesaroTrace ulam_density_trace(const MapSequence& seq, std::size_t n, const StepDensity& f,
                               const DensityTraceOptions& options) {
  const std::size_t bins = options.n_bins;
  const UlamOperator limit_op = build_ulam(seq.limit(), bins);
  std::optional<BinnedMeasure> reference;
  if (options.reference) reference = BinnedMeasure::from_density(*options.reference, bins);
  UlamChain chain(seq, bins);

  CesaroTrace trace;
  trace.rows.reserve(n);
  BinnedMeasure phi = BinnedMeasure::from_density(f, bins);
  std::optional<BinnedMeasure> avg;
  for (std::size_t i = 1; i <= n; ++i) {
    phi = ulam_apply(chain(i), phi);
    const double k = static_cast<double>(i);
    avg = i == 1 ? phi : mix(*avg, (k - 1.0) / k, phi, 1.0 / k);

    const BinnedMeasure image = ulam_apply(limit_op, *avg);
    CesaroRecord r;
    r.n = i;
    r.l1_to_reference = reference ? l1_distance(*avg, *reference) : std::numeric_limits<double>::quiet_NaN();
    r.invariance_defect = l1_distance(image, *avg);
    r.kb_defect = std::abs(expectation(*avg, options.observable) - expectation(image, options.observable));
    r.variation = variation(phi);
    r.mass = avg->mass();
    trace.rows.push_back(r);
    if (options.snapshot_every > 0 && i % options.snapshot_every == 0) trace.snapshots.emplace_back(i, avg->binned());
  }
  trace.final_measure = std::move(avg);
  return trace;
}

}  // namespace

CesaroTrace cesaro_densities(const MapSequence& seq, std::size_t n, const StepDensity& f,
                             const DensityTraceOptions& options) {
  if (n < 1) throw std::invalid_argument("cesaro_densities needs n >= 1");
  if (options.n_bins < 2) throw std::invalid_argument("cesaro_densities needs n_bins >= 2");
  return options.mode == TransportMode::Exact ? exact_density_trace(seq, n, f, options)
                                              : ulam_density_trace(seq, n, f, options);
}

}  // namespace nadyn
