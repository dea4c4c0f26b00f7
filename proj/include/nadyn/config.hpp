#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nadyn {

/// Initial density or measure: uniform, step(b_0,...,b_k;v_0,...,v_{k-1}), or point(bin).
struct InitialSpec {
  enum class Kind { Uniform, Step, Point };
  Kind kind = Kind::Uniform;
  std::vector<double> breakpoints;
  std::vector<double> values;
  std::size_t bin = 0;

  std::string to_string() const;
};

struct ExperimentConfig {
  std::string experiment;
  std::string family;
  std::vector<std::string> family_params;
  std::size_t n_steps = 100;
  std::size_t n_bins = 1024;
  InitialSpec initial;
  std::size_t start_index = 0;
  double delta = 0.0625;
  double alpha = 0.9;
  double epsilon = 0.125;
  std::size_t K = 50;
  std::size_t L = 6;
  std::string out;
  std::uint64_t seed = 0;
  std::string observable = "x";
  /// "ulam" or "exact" transport for cesaro-density.
  std::string mode = "ulam";
  std::size_t breakpoint_cap = 1'000'000;

  /// Canonical record: every field, keys sorted, no whitespace.
  std::string to_json() const;
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;
  /// Every problem found, not just the first.
  std::vector<std::string> errors;
};

/// Accepts a JSON object or whitespace/newline separated key=value pairs
/// ('#' starts a comment). Numbers may be written as rationals such as 1/16.
ConfigResult parse_config(const std::string& text);

std::vector<std::string> experiment_names();

}  // namespace nadyn
