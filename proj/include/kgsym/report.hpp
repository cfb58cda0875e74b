#pragma once

// RunReport and its JSON / CSV serializations.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgsym/config.hpp"
#include "kgsym/diagnostics.hpp"
#include "kgsym/snapshot.hpp"
#include "kgsym/version.hpp"

namespace kgsym {

enum class RowStatus { ok, exact, blow_up };

inline std::string status_name(RowStatus s) {
  switch (s) {
    case RowStatus::ok: return "ok";
    case RowStatus::exact: return "exact";
    case RowStatus::blow_up: return "blow-up";
  }
  return "?";
}

inline RowStatus parse_status(const std::string& s) {
  if (s == "ok") return RowStatus::ok;
  if (s == "exact") return RowStatus::exact;
  if (s == "blow-up") return RowStatus::blow_up;
  throw std::runtime_error("unknown row status '" + s + "'");
}

/// One sweep entry; err is NaN for blown-up runs.
struct SweepRow {
  ConvergenceRow row;
  RowStatus status = RowStatus::ok;
  std::optional<std::int64_t> blow_up_step;
};

struct SnapshotRecord {
  double time = 0.0;
  std::string path;
};

struct ReferenceSummary {
  Scheme scheme = Scheme::slri2;
  Scheme cross_check = Scheme::lri2;
  double tau = 0.0;
  std::int64_t steps = 0;
  double distance = 0.0;  // err_metric(cross_check, reference)
  double seconds = 0.0;
};

struct SchemeResult {
  Scheme scheme = Scheme::slri2;
  std::vector<SweepRow> rows;
  std::optional<OrderFit> fit;
  std::vector<std::string> warnings;
  std::vector<EnergySample> energy;
  std::optional<DriftSummary> drift;        // over drift_window
  std::optional<DriftSummary> trend_drift;  // over trend_window
  std::optional<std::int64_t> blow_up_step;
  std::vector<SnapshotRecord> snapshots;
  double seconds = 0.0;

  bool blew_up() const {
    if (blow_up_step) return true;
    for (const auto& r : rows) {
      if (r.status == RowStatus::blow_up) return true;
    }
    return false;
  }

  /// Rows that enter the order fit.
  std::vector<ConvergenceRow> fit_rows() const {
    std::vector<ConvergenceRow> out;
    for (const auto& r : rows) {
      if (r.status == RowStatus::ok) out.push_back(r.row);
    }
    return out;
  }
};

struct RunReport {
  std::string code_version = kVersion;
  ExperimentConfig config;
  int threads = 1;
  std::optional<ReferenceSummary> reference;
  std::vector<SchemeResult> schemes;
  double total_seconds = 0.0;

  bool blew_up() const {
    for (const auto& s : schemes) {
      if (s.blew_up()) return true;
    }
    return false;
  }

  const SchemeResult& result(Scheme s) const {
    for (const auto& r : schemes) {
      if (r.scheme == s) return r;
    }
    throw std::out_of_range("scheme " + std::string(scheme_name(s)) + " not in report");
  }
};

namespace detail {

// Non-finite numbers become null.
inline nlohmann::json number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

inline double number_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline nlohmann::json drift_json(const DriftSummary& d) {
  return {{"max_abs_relative_error", number(d.max_abs_relative_error)}, {"trend", number(d.trend)}, {"samples", d.samples}};
}

inline DriftSummary drift_from(const nlohmann::json& j) {
  return {number_from(j.at("max_abs_relative_error")), number_from(j.at("trend")), j.at("samples").get<std::size_t>()};
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json report_to_json(const RunReport& r) {
  using detail::number;
  nlohmann::json j;
  j["code_version"] = r.code_version;
  j["config"] = config_to_json(r.config);
  if (const auto* rough = std::get_if<RoughDatumSpec>(&r.config.datum)) {
    j["seed"] = rough->seed;
  } else {
    j["seed"] = nullptr;
  }
  j["threads"] = r.threads;
  if (r.reference) {
    const auto& ref = *r.reference;
    j["reference"] = {{"scheme", std::string(scheme_name(ref.scheme))},
                      {"cross_check", std::string(scheme_name(ref.cross_check))},
                      {"tau", ref.tau},
                      {"steps", ref.steps},
                      {"distance", number(ref.distance)},
                      {"seconds", ref.seconds}};
  } else {
    j["reference"] = nullptr;
  }
  j["schemes"] = nlohmann::json::array();
  for (const auto& s : r.schemes) {
    nlohmann::json js;
    js["scheme"] = std::string(scheme_name(s.scheme));
    js["rows"] = nlohmann::json::array();
    for (const auto& row : s.rows) {
      js["rows"].push_back({{"tau", row.row.tau},
                            {"err", number(row.row.err)},
                            {"seconds", row.row.wall_clock_seconds},
                            {"status", status_name(row.status)},
                            {"blow_up_step", detail::optional_json(row.blow_up_step)}});
    }
    if (s.fit) {
      js["fit"] = {{"slope", number(s.fit->slope)},
                   {"pairwise", s.fit->pairwise},
                   {"used_taus", s.fit->used_taus},
                   {"warnings", s.fit->warnings}};
    } else {
      js["fit"] = nullptr;
    }
    js["warnings"] = s.warnings;
    js["energy"] = nlohmann::json::array();
    for (const auto& e : s.energy) {
      js["energy"].push_back({{"time", e.time}, {"energy", number(e.energy)}, {"rel_err", number(e.relative_error)}});
    }
    js["drift"] = s.drift ? detail::drift_json(*s.drift) : nlohmann::json(nullptr);
    js["trend_drift"] = s.trend_drift ? detail::drift_json(*s.trend_drift) : nlohmann::json(nullptr);
    js["blow_up_step"] = detail::optional_json(s.blow_up_step);
    js["snapshots"] = nlohmann::json::array();
    for (const auto& snap : s.snapshots) js["snapshots"].push_back({{"time", snap.time}, {"path", snap.path}});
    js["seconds"] = s.seconds;
    j["schemes"].push_back(std::move(js));
  }
  j["total_seconds"] = r.total_seconds;
  return j;
}

inline RunReport report_from_json(const nlohmann::json& j) {
  using detail::number_from;
  RunReport r;
  r.code_version = j.at("code_version").get<std::string>();
  r.config = config_from_json(j.at("config"));
  r.threads = j.at("threads").get<int>();
  if (!j.at("reference").is_null()) {
    const auto& jr = j.at("reference");
    r.reference = ReferenceSummary{parse_scheme(jr.at("scheme").get<std::string>()),
                                   parse_scheme(jr.at("cross_check").get<std::string>()),
                                   jr.at("tau").get<double>(),
                                   jr.at("steps").get<std::int64_t>(),
                                   number_from(jr.at("distance")),
                                   jr.at("seconds").get<double>()};
  }
  for (const auto& js : j.at("schemes")) {
    SchemeResult s;
    s.scheme = parse_scheme(js.at("scheme").get<std::string>());
    for (const auto& row : js.at("rows")) {
      SweepRow sr;
      sr.row = {row.at("tau").get<double>(), number_from(row.at("err")), row.at("seconds").get<double>()};
      sr.status = parse_status(row.at("status").get<std::string>());
      if (!row.at("blow_up_step").is_null()) sr.blow_up_step = row.at("blow_up_step").get<std::int64_t>();
      s.rows.push_back(sr);
    }
    if (!js.at("fit").is_null()) {
      const auto& jf = js.at("fit");
      s.fit = OrderFit{number_from(jf.at("slope")), jf.at("pairwise").get<std::vector<double>>(),
                       jf.at("used_taus").get<std::vector<double>>(), jf.at("warnings").get<std::vector<std::string>>()};
    }
    s.warnings = js.at("warnings").get<std::vector<std::string>>();
    for (const auto& e : js.at("energy")) {
      s.energy.push_back({e.at("time").get<double>(), number_from(e.at("energy")), number_from(e.at("rel_err"))});
    }
    if (!js.at("drift").is_null()) s.drift = detail::drift_from(js.at("drift"));
    if (!js.at("trend_drift").is_null()) s.trend_drift = detail::drift_from(js.at("trend_drift"));
    if (!js.at("blow_up_step").is_null()) s.blow_up_step = js.at("blow_up_step").get<std::int64_t>();
    for (const auto& snap : js.at("snapshots")) {
      s.snapshots.push_back({snap.at("time").get<double>(), snap.at("path").get<std::string>()});
    }
    s.seconds = js.at("seconds").get<double>();
    r.schemes.push_back(std::move(s));
  }
  r.total_seconds = j.at("total_seconds").get<double>();
  return r;
}

inline std::string csv_path(const std::filesystem::path& dir, const RunReport& r, Scheme s) {
  return (dir / (experiment_name(r.config.kind) + "_" + std::string(scheme_name(s)) + ".csv")).string();
}

inline std::string json_path(const std::filesystem::path& dir, const RunReport& r) {
  return (dir / (experiment_name(r.config.kind) + "_report.json")).string();
}

/// Sweep rows as "tau,err,seconds" or energy samples as "time,energy,rel_err".
inline std::string scheme_csv(const RunReport& r, const SchemeResult& s) {
  std::string out;
  const bool sweep = r.config.kind == ExperimentKind::convergence || r.config.kind == ExperimentKind::efficiency;
  if (sweep) {
    out += "tau,err,seconds\n";
    for (const auto& row : s.rows) {
      out += format_double(row.row.tau) + ',' + format_double(row.row.err) + ',' +
             format_double(row.row.wall_clock_seconds) + '\n';
    }
  } else {
    out += "time,energy,rel_err\n";
    for (const auto& e : s.energy) {
      out += format_double(e.time) + ',' + format_double(e.energy) + ',' + format_double(e.relative_error) + '\n';
    }
  }
  return out;
}

/// Writes one CSV per scheme and the JSON report into `dir`; returns the paths written.
inline std::vector<std::string> write_outputs(const RunReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  for (const auto& s : r.schemes) {
    const auto path = csv_path(dir, r, s.scheme);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << scheme_csv(r, s);
    paths.push_back(path);
  }
  const auto path = json_path(dir, r);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << report_to_json(r).dump(2) << '\n';
  paths.push_back(path);
  return paths;
}

inline RunReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report '" + path + "'");
  nlohmann::json j;
  in >> j;
  return report_from_json(j);
}

}  // namespace kgsym
