#pragma once

// Experiment configuration: a single JSON document, unknown keys rejected.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kgsym/errors.hpp"
#include "kgsym/initial_data.hpp"
#include "kgsym/integrators.hpp"
#include "kgsym/nonlinearity.hpp"

namespace kgsym {

enum class ExperimentKind { convergence, efficiency, energy_drift, simulate };

inline std::string experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::convergence: return "convergence";
    case ExperimentKind::efficiency: return "efficiency";
    case ExperimentKind::energy_drift: return "energy-drift";
    case ExperimentKind::simulate: return "simulate";
  }
  return "?";
}

inline ExperimentKind parse_experiment(const std::string& s) {
  if (s == "convergence") return ExperimentKind::convergence;
  if (s == "efficiency") return ExperimentKind::efficiency;
  if (s == "energy-drift") return ExperimentKind::energy_drift;
  if (s == "simulate") return ExperimentKind::simulate;
  throw ConfigError("unknown experiment '" + s + "'");
}

/// How the convergence reference is produced and certified.
struct ReferencePolicy {
  Scheme scheme = Scheme::slri2;
  int refinement = 128;  // tau_ref = smallest tau / refinement
  Scheme cross_check = Scheme::lri2;
  double tolerance = 1e-9;  // max err_metric distance between the two references
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::convergence;
  std::vector<Scheme> schemes;
  std::string nonlinearity = "sine";
  int grid_n = 1024;
  bool dealias = false;
  std::variant<RoughDatumSpec, SolitonDatumSpec> datum = RoughDatumSpec{};
  double t_end = 1.0;
  std::vector<double> taus;  // convergence and efficiency sweeps
  double h = 0.1;            // energy-drift and simulate
  ReferencePolicy reference;
  double exact_floor = 1e-11;  // err at or below this counts as exact
  std::string output_dir = "out";
  std::int64_t sample_stride = 10;
  std::optional<std::pair<double, double>> drift_window;
  std::optional<std::pair<double, double>> trend_window;
  std::vector<double> snapshot_times;
  std::string snapshot_format = "binary";
};

/// Number of steps of size tau covering t_end; throws unless it is whole within 1e-9.
inline std::int64_t whole_steps(double t_end, double tau) {
  const double ratio = t_end / tau;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9) {
    std::ostringstream os;
    os << "t_end=" << t_end << " is not a whole number of steps of " << tau;
    throw ConfigError(os.str());
  }
  return static_cast<std::int64_t>(rounded);
}

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
  return get_or<T>(j, key, T{});
}

inline std::optional<std::pair<double, double>> window_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  const auto v = get_or<std::vector<double>>(j, key, {});
  if (v.size() != 2 || !(v[0] <= v[1])) throw ConfigError(std::string(key) + " must be [lo, hi] with lo <= hi");
  return std::pair{v[0], v[1]};
}

}  // namespace detail

/// Checks the cross-field invariants of a parsed configuration.
inline void validate(const ExperimentConfig& c) {
  if (c.schemes.empty()) throw ConfigError("at least one scheme is required");
  if (c.grid_n < 4) throw ConfigError("grid_n must be at least 4");
  if (!(c.t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
  nonlinearity_by_name(c.nonlinearity);
  if (const auto* r = std::get_if<RoughDatumSpec>(&c.datum)) {
    if (r->max_frequency < 1 || r->max_frequency > c.grid_n) throw ConfigError("datum.max_frequency must lie in [1, grid_n]");
    if (!(r->theta > 0.5)) throw ConfigError("datum.theta must exceed 1/2");
  } else {
    const auto& s = std::get<SolitonDatumSpec>(c.datum);
    if (!(s.a > 0.0) || !(s.b > 0.0) || !(s.a * s.a > s.c * s.c)) {
      throw ConfigError("soliton datum needs a > 0, b > 0 and a^2 > c^2");
    }
  }
  if (c.sample_stride < 1) throw ConfigError("sample_stride must be positive");
  if (c.kind == ExperimentKind::convergence || c.kind == ExperimentKind::efficiency) {
    if (c.taus.size() < 2) throw ConfigError("a sweep needs at least two taus");
    for (std::size_t i = 0; i < c.taus.size(); ++i) {
      if (!(c.taus[i] > 0.0)) throw ConfigError("taus must be positive");
      if (i > 0 && !(c.taus[i] < c.taus[i - 1])) throw ConfigError("taus must be strictly decreasing");
      whole_steps(c.t_end, c.taus[i]);
    }
    if (c.reference.refinement < 1) throw ConfigError("reference.refinement must be at least 1");
    whole_steps(c.t_end, c.taus.back() / c.reference.refinement);
  } else {
    if (!(c.h > 0.0)) throw ConfigError("h must be positive");
    whole_steps(c.t_end, c.h);
    for (double t : c.snapshot_times) {
      if (t < 0.0 || t > c.t_end) throw ConfigError("snapshot times must lie in [0, t_end]");
      whole_steps(t, c.h);
    }
  }
  if (c.snapshot_format != "binary" && c.snapshot_format != "csv") {
    throw ConfigError("snapshot_format must be 'binary' or 'csv'");
  }
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  detail::reject_unknown(j,
                         {"experiment", "schemes", "nonlinearity", "grid_n", "dealias", "datum", "t_end", "taus", "h",
                          "reference", "exact_floor", "output_dir", "sample_stride", "drift_window", "trend_window",
                          "snapshot_times", "snapshot_format"},
                         "config");
  ExperimentConfig c;
  c.kind = parse_experiment(detail::require<std::string>(j, "experiment", "config"));
  for (const auto& s : detail::require<std::vector<std::string>>(j, "schemes", "config")) c.schemes.push_back(parse_scheme(s));
  c.nonlinearity = detail::get_or<std::string>(j, "nonlinearity", c.nonlinearity);
  c.grid_n = detail::get_or<int>(j, "grid_n", c.grid_n);
  c.dealias = detail::get_or<bool>(j, "dealias", c.dealias);
  c.t_end = detail::get_or<double>(j, "t_end", c.t_end);
  c.taus = detail::get_or<std::vector<double>>(j, "taus", {});
  c.h = detail::get_or<double>(j, "h", c.h);
  c.exact_floor = detail::get_or<double>(j, "exact_floor", c.exact_floor);
  c.output_dir = detail::get_or<std::string>(j, "output_dir", c.output_dir);
  c.sample_stride = detail::get_or<std::int64_t>(j, "sample_stride", c.sample_stride);
  c.drift_window = detail::window_from(j, "drift_window");
  c.trend_window = detail::window_from(j, "trend_window");
  c.snapshot_times = detail::get_or<std::vector<double>>(j, "snapshot_times", {});
  c.snapshot_format = detail::get_or<std::string>(j, "snapshot_format", c.snapshot_format);

  const auto& d = j.contains("datum") ? j.at("datum") : throw ConfigError("missing key 'datum' in config");
  const auto kind = detail::require<std::string>(d, "kind", "datum");
  if (kind == "rough") {
    detail::reject_unknown(d, {"kind", "theta", "seed", "max_frequency", "scale"}, "datum");
    RoughDatumSpec r;
    r.theta = detail::require<double>(d, "theta", "datum");
    r.seed = detail::require<std::uint64_t>(d, "seed", "datum");
    r.max_frequency = detail::get_or<int>(d, "max_frequency", c.grid_n);
    r.scale = detail::get_or<double>(d, "scale", 1.0);
    c.datum = r;
  } else if (kind == "soliton") {
    detail::reject_unknown(d, {"kind", "a", "b", "c", "scale"}, "datum");
    SolitonDatumSpec s;
    s.a = detail::require<double>(d, "a", "datum");
    s.b = detail::require<double>(d, "b", "datum");
    s.c = detail::require<double>(d, "c", "datum");
    s.scale = detail::get_or<double>(d, "scale", s.scale);
    c.datum = s;
  } else {
    throw ConfigError("datum.kind must be 'rough' or 'soliton'");
  }

  if (j.contains("reference")) {
    const auto& r = j.at("reference");
    detail::reject_unknown(r, {"scheme", "refinement", "cross_check", "tolerance"}, "reference");
    c.reference.scheme = parse_scheme(detail::get_or<std::string>(r, "scheme", "slri2"));
    c.reference.refinement = detail::get_or<int>(r, "refinement", c.reference.refinement);
    c.reference.cross_check = parse_scheme(detail::get_or<std::string>(r, "cross_check", "lri2"));
    c.reference.tolerance = detail::get_or<double>(r, "tolerance", c.reference.tolerance);
  }
  validate(c);
  return c;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = experiment_name(c.kind);
  std::vector<std::string> names;
  for (auto s : c.schemes) names.emplace_back(scheme_name(s));
  j["schemes"] = names;
  j["nonlinearity"] = c.nonlinearity;
  j["grid_n"] = c.grid_n;
  j["dealias"] = c.dealias;
  if (const auto* r = std::get_if<RoughDatumSpec>(&c.datum)) {
    j["datum"] = {{"kind", "rough"}, {"theta", r->theta}, {"seed", r->seed}, {"max_frequency", r->max_frequency},
                  {"scale", r->scale}};
  } else {
    const auto& s = std::get<SolitonDatumSpec>(c.datum);
    j["datum"] = {{"kind", "soliton"}, {"a", s.a}, {"b", s.b}, {"c", s.c}, {"scale", s.scale}};
  }
  j["t_end"] = c.t_end;
  if (!c.taus.empty()) j["taus"] = c.taus;
  j["h"] = c.h;
  j["reference"] = {{"scheme", std::string(scheme_name(c.reference.scheme))},
                    {"refinement", c.reference.refinement},
                    {"cross_check", std::string(scheme_name(c.reference.cross_check))},
                    {"tolerance", c.reference.tolerance}};
  j["exact_floor"] = c.exact_floor;
  j["output_dir"] = c.output_dir;
  j["sample_stride"] = c.sample_stride;
  if (c.drift_window) j["drift_window"] = {c.drift_window->first, c.drift_window->second};
  if (c.trend_window) j["trend_window"] = {c.trend_window->first, c.trend_window->second};
  if (!c.snapshot_times.empty()) j["snapshot_times"] = c.snapshot_times;
  j["snapshot_format"] = c.snapshot_format;
  return j;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

inline StateU make_initial_state(const ExperimentConfig& c, const Grid& grid) {
  if (const auto* r = std::get_if<RoughDatumSpec>(&c.datum)) return make_rough(*r, grid);
  return make_soliton(std::get<SolitonDatumSpec>(c.datum), grid);
}

}  // namespace kgsym
