#pragma once

// Experiment runners. Independent simulations fan out over a worker pool;
// results are stored by task index, so output order never depends on scheduling.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "kgsym/config.hpp"
#include "kgsym/diagnostics.hpp"
#include "kgsym/integrators.hpp"
#include "kgsym/report.hpp"
#include "kgsym/snapshot.hpp"

namespace kgsym {

/// Runs task(i) for i in [0, count) on up to `threads` workers and returns the
/// results in index order. The first exception by index is rethrown.
template <typename R>
std::vector<R> parallel_map(std::size_t count, int threads, const std::function<R(std::size_t)>& task) {
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(task(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::clamp<std::int64_t>(threads, 1, static_cast<std::int64_t>(std::max<std::size_t>(count, 1))));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Problem {
  Grid grid;
  Nonlinearity nl;
  StateU initial;
};

inline Problem make_problem(const ExperimentConfig& c) {
  Grid grid(c.grid_n, c.dealias);
  auto nl = nonlinearity_by_name(c.nonlinearity);
  auto initial = make_initial_state(c, grid);
  return {grid, std::move(nl), std::move(initial)};
}

inline std::optional<DriftSummary> try_drift(const std::vector<EnergySample>& samples,
                                             const std::optional<std::pair<double, double>>& window, double t_end) {
  const auto [lo, hi] = window.value_or(std::pair{0.0, t_end});
  try {
    return drift_series(samples, lo, hi);
  } catch (const std::range_error&) {
    return std::nullopt;
  }
}

inline void check_kind(const ExperimentConfig& c, std::initializer_list<ExperimentKind> allowed) {
  for (auto k : allowed) {
    if (c.kind == k) return;
  }
  throw ConfigError("config describes a '" + experiment_name(c.kind) + "' experiment");
}

// Convergence and efficiency share the sweep.
inline RunReport run_sweep(const ExperimentConfig& config, int threads) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const auto problem = make_problem(config);

  RunReport report;
  report.config = config;
  report.threads = threads;

  // Certify the reference before any sweep.
  const double tau_ref = config.taus.back() / config.reference.refinement;
  const std::int64_t n_ref = whole_steps(config.t_end, tau_ref);
  const std::vector<Scheme> ref_schemes{config.reference.scheme, config.reference.cross_check};
  const auto ref_start = std::chrono::steady_clock::now();
  std::vector<StateU> refs;
  try {
    refs = parallel_map<StateU>(ref_schemes.size(), threads, [&](std::size_t i) {
      return evolve(problem.initial, ref_schemes[i], tau_ref, n_ref, problem.nl).state;
    });
  } catch (const BlowUpError& e) {
    throw ReferenceCertificationError(std::string("reference run blew up: ") + e.what());
  }
  const double distance = err_metric(refs[1], refs[0]);
  report.reference = ReferenceSummary{config.reference.scheme, config.reference.cross_check, tau_ref, n_ref, distance,
                                      seconds_since(ref_start)};
  if (!(distance <= config.reference.tolerance)) {
    throw ReferenceCertificationError("reference schemes disagree: distance " + format_double(distance) +
                                      " exceeds tolerance " + format_double(config.reference.tolerance));
  }
  const StateU& reference = refs[0];

  const std::size_t n_tau = config.taus.size();
  const auto rows = parallel_map<SweepRow>(config.schemes.size() * n_tau, threads, [&](std::size_t i) {
    const Scheme s = config.schemes[i / n_tau];
    const double tau = config.taus[i % n_tau];
    SweepRow row;
    row.row.tau = tau;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto result = evolve(problem.initial, s, tau, whole_steps(config.t_end, tau), problem.nl);
      row.row.wall_clock_seconds = seconds_since(t0);
      row.row.err = err_metric(result.state, reference);
      row.status = row.row.err <= config.exact_floor ? RowStatus::exact : RowStatus::ok;
    } catch (const BlowUpError& e) {
      row.row.wall_clock_seconds = seconds_since(t0);
      row.row.err = std::numeric_limits<double>::quiet_NaN();
      row.status = RowStatus::blow_up;
      row.blow_up_step = e.step();
    }
    return row;
  });

  for (std::size_t k = 0; k < config.schemes.size(); ++k) {
    SchemeResult res;
    res.scheme = config.schemes[k];
    res.rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(k * n_tau),
                    rows.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_tau));
    for (const auto& r : res.rows) {
      res.seconds += r.row.wall_clock_seconds;
      if (r.status == RowStatus::exact) {
        res.warnings.push_back("exact solution at tau=" + format_double(r.row.tau) + "; row excluded from fit");
      } else if (r.status == RowStatus::blow_up) {
        res.warnings.push_back("blow-up at tau=" + format_double(r.row.tau) + " after step " +
                               std::to_string(*r.blow_up_step));
      }
    }
    try {
      res.fit = fit_order(res.fit_rows());
    } catch (const ParameterError&) {
      res.warnings.push_back("fewer than two usable rows; no order fitted");
    }
    report.schemes.push_back(std::move(res));
  }
  report.total_seconds = seconds_since(start);
  return report;
}

}  // namespace detail

inline RunReport run_convergence(const ExperimentConfig& config, int threads = 1) {
  detail::check_kind(config, {ExperimentKind::convergence});
  return detail::run_sweep(config, threads);
}

inline RunReport run_efficiency(const ExperimentConfig& config, int threads = 1) {
  detail::check_kind(config, {ExperimentKind::efficiency});
  return detail::run_sweep(config, threads);
}

/// Energy series at the sampling stride; a blow-up ends that scheme's run with the step recorded.
inline RunReport run_energy_drift(const ExperimentConfig& config, int threads = 1) {
  detail::check_kind(config, {ExperimentKind::energy_drift});
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const auto problem = detail::make_problem(config);
  const std::int64_t n_steps = whole_steps(config.t_end, config.h);
  const double h0 = energy(problem.initial, problem.nl);

  RunReport report;
  report.config = config;
  report.threads = threads;
  report.schemes = parallel_map<SchemeResult>(config.schemes.size(), threads, [&](std::size_t i) {
    SchemeResult res;
    res.scheme = config.schemes[i];
    const auto t0 = std::chrono::steady_clock::now();
    EvolveOptions opts;
    opts.stride = config.sample_stride;
    opts.observer = [&](std::int64_t, double t, const StateU& w) {
      const double e = energy(w, problem.nl);
      res.energy.push_back({t, e, (e - h0) / h0});
    };
    try {
      evolve(problem.initial, res.scheme, config.h, n_steps, problem.nl, opts);
    } catch (const BlowUpError& e) {
      res.blow_up_step = e.step();
      res.warnings.push_back("blow-up after step " + std::to_string(e.step()));
    }
    res.seconds = detail::seconds_since(t0);
    res.drift = detail::try_drift(res.energy, config.drift_window, config.t_end);
    res.trend_drift = detail::try_drift(res.energy, config.trend_window, config.t_end);
    return res;
  });
  report.total_seconds = detail::seconds_since(start);
  return report;
}

/// Single runs per scheme with optional snapshots at the configured times; the
/// final state is always written. Snapshot files go to config.output_dir.
inline RunReport run_simulate(const ExperimentConfig& config, int threads = 1) {
  detail::check_kind(config, {ExperimentKind::simulate});
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const auto problem = detail::make_problem(config);
  const std::int64_t n_steps = whole_steps(config.t_end, config.h);
  const double h0 = energy(problem.initial, problem.nl);
  std::set<std::int64_t> snapshot_steps;
  for (double t : config.snapshot_times) snapshot_steps.insert(whole_steps(t, config.h));
  std::filesystem::create_directories(config.output_dir);
  const std::string ext = config.snapshot_format == "csv" ? ".csv" : ".bin";

  RunReport report;
  report.config = config;
  report.threads = threads;
  report.schemes = parallel_map<SchemeResult>(config.schemes.size(), threads, [&](std::size_t i) {
    SchemeResult res;
    res.scheme = config.schemes[i];
    const std::string stem = "simulate_" + std::string(scheme_name(res.scheme));
    const auto save = [&](const std::string& tag, double t, const StateU& w) {
      const auto path = (std::filesystem::path(config.output_dir) / (stem + "_" + tag + ext)).string();
      write_snapshot(path, t, w, config.snapshot_format);
      res.snapshots.push_back({t, path});
    };
    const auto t0 = std::chrono::steady_clock::now();
    EvolveOptions opts;
    opts.observer = [&](std::int64_t n, double t, const StateU& w) {
      if (n % config.sample_stride == 0 || n == n_steps) {
        const double e = energy(w, problem.nl);
        res.energy.push_back({t, e, (e - h0) / h0});
      }
      if (snapshot_steps.contains(n)) save("step" + std::to_string(n), t, w);
    };
    try {
      const auto result = evolve(problem.initial, res.scheme, config.h, n_steps, problem.nl, opts);
      save("final", static_cast<double>(n_steps) * config.h, result.state);
    } catch (const BlowUpError& e) {
      res.blow_up_step = e.step();
      res.warnings.push_back("blow-up after step " + std::to_string(e.step()));
    }
    res.seconds = detail::seconds_since(t0);
    res.drift = detail::try_drift(res.energy, config.drift_window, config.t_end);
    return res;
  });
  report.total_seconds = detail::seconds_since(start);
  return report;
}

inline RunReport run_experiment(const ExperimentConfig& config, int threads = 1) {
  switch (config.kind) {
    case ExperimentKind::convergence: return run_convergence(config, threads);
    case ExperimentKind::efficiency: return run_efficiency(config, threads);
    case ExperimentKind::energy_drift: return run_energy_drift(config, threads);
    case ExperimentKind::simulate: return run_simulate(config, threads);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace kgsym
