#include "nadyn/experiments.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "nadyn/example33.hpp"
#include "nadyn/format.hpp"
#include "nadyn/frobenius_perron.hpp"
#include "nadyn/map_sequence.hpp"
#include "nadyn/nonauto.hpp"
#include "nadyn/straube.hpp"
#include "nadyn/ulam.hpp"

namespace nadyn {

namespace {

std::ofstream open_artifact(const std::string& path, RunResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  result.artifacts.push_back(path);
  return out;
}

std::string header(const ExperimentConfig& c) { return "# config: " + c.to_json() + "\n"; }

StepDensity initial_density(const ExperimentConfig& c) {
  if (c.initial.kind == InitialSpec::Kind::Step) return StepDensity(c.initial.breakpoints, c.initial.values);
  return StepDensity::uniform();
}

BinnedMeasure initial_measure(const ExperimentConfig& c) {
  switch (c.initial.kind) {
    case InitialSpec::Kind::Point:
      return BinnedMeasure::point(c.n_bins, c.initial.bin);
    case InitialSpec::Kind::Step:
      return BinnedMeasure::from_density(initial_density(c), c.n_bins);
    case InitialSpec::Kind::Uniform:
      break;
  }
  return BinnedMeasure::uniform(c.n_bins);
}

void write_trace(const ExperimentConfig& c, const CesaroTrace& trace, RunResult& result) {
  auto out = open_artifact(c.out + ".csv", result);
  out << header(c);
  trace.write_csv(out);
  const CesaroRecord& last = trace.rows.back();
  std::ostringstream s;
  s << "n=" << last.n << " l1_to_reference=" << format_double(last.l1_to_reference)
    << " invariance_defect=" << format_double(last.invariance_defect) << " kb_defect=" << format_double(last.kb_defect)
    << " mass=" << format_double(last.mass) << " coarsen_budget=" << format_double(last.coarsen_budget) << '\n';
  result.summary += s.str();
}

RunResult run_cesaro_measure(const ExperimentConfig& c) {
  RunResult result;
  const MapSequence seq = make_family(c.family, c.family_params);
  const StationaryResult reference = invariant_density_ulam(build_ulam(seq.limit(), c.n_bins));
  MeasureTraceOptions options;
  options.observable = Observable::parse(c.observable);
  options.reference = reference.measure;
  write_trace(c, cesaro_measures(seq, c.n_steps, initial_measure(c), options), result);
  if (!reference.converged) {
    result.summary += "reference invariant vector did not converge (residual " + format_double(reference.residual) + ")\n";
    result.exit_code = kExitNonConvergence;
  }
  return result;
}

RunResult run_cesaro_density(const ExperimentConfig& c) {
  RunResult result;
  const MapSequence seq = make_family(c.family, c.family_params);
  const StationaryResult reference = invariant_density_ulam(build_ulam(seq.limit(), c.n_bins));
  DensityTraceOptions options;
  options.mode = c.mode == "exact" ? TransportMode::Exact : TransportMode::Ulam;
  options.n_bins = c.n_bins;
  options.breakpoint_cap = c.breakpoint_cap;
  options.observable = Observable::parse(c.observable);
  options.reference = reference.measure.to_density().compacted();
  write_trace(c, cesaro_densities(seq, c.n_steps, initial_density(c), options), result);
  if (!reference.converged) {
    result.summary += "reference invariant vector did not converge (residual " + format_double(reference.residual) + ")\n";
    result.exit_code = kExitNonConvergence;
  }
  return result;
}

nlohmann::json set_json(const std::optional<IntervalSet>& set) {
  return set ? nlohmann::json::parse(set->to_json()) : nlohmann::json(nullptr);
}

RunResult run_straube(const ExperimentConfig& c) {
  RunResult result;
  const MapSequence seq = make_family(c.family, c.family_params);
  const StraubeReport r = straube_probe(seq, c.delta, c.alpha, c.K, c.L, c.start_index);
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(c.to_json());
  j["search"] = {{"delta", r.delta}, {"alpha", r.alpha}, {"K", r.K},
                 {"L", r.L},         {"start_index", r.start}, {"candidates", r.candidates}};
  j["violation"] = r.violation;
  j["witness"] = set_json(r.witness);
  j["witness_sup"] = r.witness_sup;
  j["witness_k"] = r.witness_k;
  j["max_sup"] = r.max_sup;
  j["max_set"] = set_json(r.max_set);
  auto out = open_artifact(c.out + ".json", result);
  out << j.dump(2) << '\n';
  result.summary += std::string(r.violation ? "violation found: E = " + r.witness->to_json() + " sup " +
                                                  format_double(r.witness_sup) + " at k = " +
                                                  std::to_string(r.witness_k)
                                            : "no violation found within the search family") +
                    " (" + std::to_string(r.candidates) + " candidates)\n";
  return result;
}

RunResult run_example33(const ExperimentConfig& c) {
  RunResult result;
  const EscapeResult e = example33_escape(c.delta, c.epsilon);
  {
    auto out = open_artifact(c.out + ".csv", result);
    out << header(c) << "delta,epsilon,m,n,measure,analytic_measure,dyadic_floor,exceeds_1_minus_epsilon\n";
    out << format_double(c.delta) << ',' << format_double(c.epsilon) << ',' << e.m << ',' << e.n << ','
        << format_double(e.measure) << ',' << format_double(e.analytic_measure) << ',' << format_double(e.dyadic_floor)
        << ',' << (e.measure > 1.0 - c.epsilon ? "true" : "false") << '\n';
  }
  {
    const MapSequence seq = make_family("example33");
    const IntervalSet target({Interval{0.0, std::min(c.delta, 1.0)}});
    auto out = open_artifact(c.out + "_table.csv", result);
    out << header(c) << "n,measure,analytic_measure,abs_difference,rho_slope,rho_slope_telescoped,rho_slope_printed\n";
    for (std::size_t n = 2; n <= e.n; ++n) {
      const double measure = preimage_composition(seq, n, target, 2).measure();
      const double analytic = example33_escape_measure(c.delta, n);
      out << n << ',' << format_double(measure) << ',' << format_double(analytic) << ','
          << format_double(std::abs(measure - analytic)) << ',' << format_double(rho_slope(2, n)) << ','
          << format_double(rho_slope_telescoped(2, n)) << ',' << format_double(rho_slope_printed(2, n)) << '\n';
    }
  }
  result.summary += "m=" + std::to_string(e.m) + " n=" + std::to_string(e.n) + " measure=" + format_double(e.measure) +
                    " analytic=" + format_double(e.analytic_measure) + '\n';
  return result;
}

RunResult run_ulam(const ExperimentConfig& c) {
  RunResult result;
  const MapSequence seq = make_family(c.family, c.family_params);
  const UlamOperator op = build_ulam(seq.limit(), c.n_bins);
  const StationaryResult s = invariant_density_ulam(op);
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(c.to_json());
  j["map"] = seq.limit().name();
  j["n_bins"] = c.n_bins;
  j["residual"] = s.residual;
  j["iterations"] = s.iterations;
  j["converged"] = s.converged;
  j["invariant"] = s.measure.binned();
  {
    auto out = open_artifact(c.out + ".json", result);
    out << j.dump(2) << '\n';
  }
  {
    auto out = open_artifact(c.out + ".coo", result);
    out << header(c);
    op.write_coo(out);
  }
  result.summary += "residual=" + format_double(s.residual) + " iterations=" + std::to_string(s.iterations) +
                    (s.converged ? "" : " (not converged)") + '\n';
  if (!s.converged) result.exit_code = kExitNonConvergence;
  return result;
}

RunResult run_ly_check(const ExperimentConfig& c) {
  RunResult result;
  const MapSequence seq = make_family(c.family, c.family_params);
  std::mt19937_64 rng(c.seed);
  auto out = open_artifact(c.out + ".csv", result);
  out << header(c) << "index,cells,variation,lhs,rhs,holds\n";
  std::size_t held = 0;
  for (std::size_t i = 0; i < c.n_steps; ++i) {
    const StepDensity f = random_step_density(rng);
    const LYReport r = ly_inequality_check(seq.limit(), f);
    held += r.holds ? 1 : 0;
    out << i << ',' << f.cell_count() << ',' << format_double(variation(f)) << ',' << format_double(r.lhs) << ','
        << format_double(r.rhs) << ',' << (r.holds ? "true" : "false") << '\n';
  }
  result.summary += std::to_string(held) + " of " + std::to_string(c.n_steps) + " densities satisfy the inequality\n";
  return result;
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
  try {
    if (config.experiment == "cesaro-measure") return run_cesaro_measure(config);
    if (config.experiment == "cesaro-density") return run_cesaro_density(config);
    if (config.experiment == "straube") return run_straube(config);
    if (config.experiment == "example33") return run_example33(config);
    if (config.experiment == "ulam") return run_ulam(config);
    if (config.experiment == "ly-check") return run_ly_check(config);
    throw std::invalid_argument("unknown experiment '" + config.experiment + "'");
  } catch (const std::exception& e) {
    RunResult failed;
    failed.exit_code = kExitConfig;
    failed.summary = std::string("error: ") + e.what() + "\n  in config " + config.to_json() + "\n";
    return failed;
  }
}

int run_text(const std::string& text, std::ostream& log) {
  const ConfigResult parsed = parse_config(text);
  if (!parsed.config) {
    for (const auto& e : parsed.errors) log << "config error: " << e << '\n';
    return kExitConfig;
  }
  const RunResult r = run(*parsed.config);
  log << r.summary;
  for (const auto& path : r.artifacts) log << "wrote " << path << '\n';
  return r.exit_code;
}

}  // namespace nadyn
