#include "nadyn/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "nadyn/format.hpp"
#include "nadyn/map_sequence.hpp"
#include "nadyn/observable.hpp"
#include "nadyn/step_density.hpp"

namespace nadyn {

namespace {

const std::vector<std::string> kExperiments = {"cesaro-measure", "cesaro-density", "straube",
                                               "example33",      "ulam",           "ly-check"};

const std::vector<std::string> kKeys = {"experiment", "family", "family_params", "n_steps", "n_bins",
                                        "initial",    "start_index", "delta",   "alpha",   "epsilon",
                                        "K",          "L",           "out",     "seed",    "observable",
                                        "mode",       "breakpoint_cap"};

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : sep) + s;
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string piece;
  std::istringstream in(s);
  while (std::getline(in, piece, sep)) out.push_back(trim(piece));
  return out;
}

std::optional<double> parse_real(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const auto num = parse_real(text.substr(0, slash));
    const auto den = parse_real(text.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
  }
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) return std::nullopt;
  return v;
}

template <typename T>
std::optional<T> parse_unsigned(const std::string& text) {
  T v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) return std::nullopt;
  return v;
}

std::optional<std::vector<double>> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    const auto v = parse_real(item);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

// Raw value plus where it came from, for error messages.
struct Entry {
  std::string value;
  std::string where;
};

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

void read_json(const std::string& text, std::vector<std::pair<std::string, Entry>>& entries,
               std::vector<std::string>& errors) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    errors.push_back(std::string("malformed JSON: ") + e.what());
    return;
  }
  if (!doc.is_object()) {
    errors.push_back("JSON config must be an object");
    return;
  }
  for (const auto& [key, value] : doc.items()) {
    std::string raw;
    if (value.is_array()) {
      std::vector<std::string> parts;
      for (const auto& item : value) parts.push_back(json_scalar(item));
      raw = join(parts, ",");
    } else {
      raw = json_scalar(value);
    }
    entries.push_back({key, {raw, "key '" + key + "'"}});
  }
}

void read_pairs(const std::string& text, std::vector<std::pair<std::string, Entry>>& entries,
                std::vector<std::string>& errors) {
  std::istringstream lines(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      const auto eq = token.find('=');
      const std::string where = "line " + std::to_string(number) + " '" + token + "'";
      if (eq == std::string::npos || eq == 0) {
        errors.push_back(where + ": expected key=value");
        continue;
      }
      entries.push_back({token.substr(0, eq), {token.substr(eq + 1), where}});
    }
  }
}

std::optional<InitialSpec> parse_initial(const std::string& text, std::string& error) {
  InitialSpec spec;
  if (text == "uniform") return spec;
  const auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')') {
    error = "initial must be uniform, step(b_0,...,b_k;v_0,...) or point(bin)";
    return std::nullopt;
  }
  const std::string head = text.substr(0, open);
  const std::string body = text.substr(open + 1, text.size() - open - 2);
  if (head == "point") {
    const auto bin = parse_unsigned<std::size_t>(body);
    if (!bin) {
      error = "point(bin) needs a nonnegative integer bin";
      return std::nullopt;
    }
    spec.kind = InitialSpec::Kind::Point;
    spec.bin = *bin;
    return spec;
  }
  if (head == "step") {
    const auto semi = body.find(';');
    const auto bps = semi == std::string::npos ? std::nullopt : parse_list(body.substr(0, semi));
    const auto vals = semi == std::string::npos ? std::nullopt : parse_list(body.substr(semi + 1));
    if (!bps || !vals) {
      error = "step(...) needs comma-separated breakpoints, ';', then comma-separated values";
      return std::nullopt;
    }
    try {
      StepDensity check(*bps, *vals);
    } catch (const std::exception& e) {
      error = std::string("step density rejected: ") + e.what();
      return std::nullopt;
    }
    spec.kind = InitialSpec::Kind::Step;
    spec.breakpoints = *bps;
    spec.values = *vals;
    return spec;
  }
  error = "unknown initial kind '" + head + "'";
  return std::nullopt;
}

}  // namespace

std::string InitialSpec::to_string() const {
  switch (kind) {
    case Kind::Uniform:
      return "uniform";
    case Kind::Point:
      return "point(" + std::to_string(bin) + ")";
    case Kind::Step: {
      std::string out = "step(";
      for (std::size_t i = 0; i < breakpoints.size(); ++i) out += (i ? "," : "") + format_double(breakpoints[i]);
      out += ";";
      for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_double(values[i]);
      return out + ")";
    }
  }
  return {};
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["family"] = family;
  j["family_params"] = family_params;
  j["n_steps"] = n_steps;
  j["n_bins"] = n_bins;
  j["initial"] = initial.to_string();
  j["start_index"] = start_index;
  j["delta"] = delta;
  j["alpha"] = alpha;
  j["epsilon"] = epsilon;
  j["K"] = K;
  j["L"] = L;
  j["out"] = out;
  j["seed"] = seed;
  j["observable"] = observable;
  j["mode"] = mode;
  j["breakpoint_cap"] = breakpoint_cap;
  return j.dump();
}

std::vector<std::string> experiment_names() { return kExperiments; }

ConfigResult parse_config(const std::string& text) {
  ConfigResult result;
  auto& errors = result.errors;
  std::vector<std::pair<std::string, Entry>> entries;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{')
    read_json(body, entries, errors);
  else
    read_pairs(text, entries, errors);

  std::map<std::string, Entry> values;
  for (auto& [key, entry] : entries) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      errors.push_back(entry.where + ": unknown key '" + key + "'; accepted keys: " + join(kKeys, ", "));
      continue;
    }
    if (values.count(key)) {
      errors.push_back(entry.where + ": duplicate key '" + key + "'");
      continue;
    }
    values.emplace(key, entry);
  }

  ExperimentConfig c;
  auto text_of = [&](const std::string& key) -> const Entry* {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };
  auto read_size = [&](const std::string& key, std::size_t& field, std::size_t min, const std::string& rule) {
    const Entry* e = text_of(key);
    if (!e) return;
    const auto v = parse_unsigned<std::size_t>(e->value);
    if (!v) {
      errors.push_back(e->where + ": " + key + " must be a nonnegative integer");
    } else if (*v < min) {
      errors.push_back(e->where + ": " + rule + " (got " + e->value + ")");
    } else {
      field = *v;
    }
  };
  auto read_real = [&](const std::string& key, double& field, auto valid, const std::string& rule) {
    const Entry* e = text_of(key);
    if (!e) return;
    const auto v = parse_real(e->value);
    if (!v) {
      errors.push_back(e->where + ": " + key + " must be a number or a rational a/b");
    } else if (!valid(*v)) {
      errors.push_back(e->where + ": " + rule + " (got " + e->value + ")");
    } else {
      field = *v;
    }
  };

  if (const Entry* e = text_of("experiment")) {
    if (std::find(kExperiments.begin(), kExperiments.end(), e->value) == kExperiments.end())
      errors.push_back(e->where + ": unknown experiment '" + e->value + "'; supported experiments: " +
                       join(kExperiments, ", "));
    else
      c.experiment = e->value;
  } else {
    errors.push_back("missing key 'experiment'; supported experiments: " + join(kExperiments, ", "));
  }

  if (const Entry* e = text_of("family_params"); e && !e->value.empty()) c.family_params = split(e->value, ',');
  if (const Entry* e = text_of("family")) {
    try {
      make_family(e->value, c.family_params);
      c.family = e->value;
    } catch (const std::invalid_argument& ex) {
      errors.push_back(e->where + ": " + ex.what());
    }
  } else if (c.experiment == "example33") {
    c.family = "example33";
  } else if (!c.experiment.empty()) {
    errors.push_back("missing key 'family'; supported families: " + join(family_names(), ", "));
  }

  read_size("n_steps", c.n_steps, 1, "n_steps ≥ 1");
  read_size("n_bins", c.n_bins, 2, "n_bins ≥ 2");
  read_size("start_index", c.start_index, 0, "");
  read_size("K", c.K, 1, "K ≥ 1");
  read_size("L", c.L, 1, "L ≥ 1");
  if (c.L > 16) errors.push_back("L ≤ 16 (got " + std::to_string(c.L) + ")");
  read_size("breakpoint_cap", c.breakpoint_cap, 1, "breakpoint_cap ≥ 1");
  read_real("delta", c.delta, [](double v) { return v > 0.0; }, "delta > 0");
  read_real("alpha", c.alpha, [](double v) { return v > 0.0 && v < 1.0; }, "0 < alpha < 1");
  read_real("epsilon", c.epsilon, [](double v) { return v > 0.0 && v < 0.5; }, "0 < epsilon < 1/2");
  if (const Entry* e = text_of("seed")) {
    if (const auto v = parse_unsigned<std::uint64_t>(e->value))
      c.seed = *v;
    else
      errors.push_back(e->where + ": seed must be a nonnegative integer");
  }
  if (const Entry* e = text_of("observable")) {
    try {
      Observable::parse(e->value);
      c.observable = e->value;
    } catch (const std::invalid_argument& ex) {
      errors.push_back(e->where + ": " + ex.what());
    }
  }
  if (const Entry* e = text_of("mode")) {
    if (e->value == "exact" || e->value == "ulam")
      c.mode = e->value;
    else
      errors.push_back(e->where + ": mode must be exact or ulam");
  }
  if (const Entry* e = text_of("initial")) {
    std::string problem;
    if (auto spec = parse_initial(e->value, problem)) {
      c.initial = *spec;
      if (spec->kind == InitialSpec::Kind::Point && spec->bin >= c.n_bins)
        errors.push_back(e->where + ": point bin must be below n_bins = " + std::to_string(c.n_bins));
      if (spec->kind == InitialSpec::Kind::Point && c.experiment == "cesaro-density")
        errors.push_back(e->where + ": cesaro-density needs a density, not a point mass");
    } else {
      errors.push_back(e->where + ": " + problem);
    }
  }
  if (const Entry* e = text_of("out")) c.out = e->value;
  if (c.out.empty()) c.out = c.experiment.empty() ? "nadyn" : c.experiment;

  if (errors.empty()) result.config = std::move(c);
  return result;
}

}  // namespace nadyn
