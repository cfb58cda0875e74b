#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "kgsym/errors.hpp"
#include "kgsym/grid.hpp"
#include "kgsym/nonlinearity.hpp"

namespace kgsym {

struct EnergySample {
  double time = 0.0;
  double energy = 0.0;
  double relative_error = 0.0;  // (H(t) - H(0)) / H(0)

  friend bool operator==(const EnergySample&, const EnergySample&) = default;
};

struct ConvergenceRow {
  double tau = 0.0;
  double err = 0.0;
  double wall_clock_seconds = 0.0;

  friend bool operator==(const ConvergenceRow&, const ConvergenceRow&) = default;
};

/// H = int (v^2/2 + u_x^2/2 + V(u)) dx by the trapezoidal rule, which is exact
/// for trigonometric polynomials of degree below the grid size.
inline double energy(const StateU& w, const Nonlinearity& nl) {
  const std::vector<double> u = to_physical(w.u);
  const std::vector<double> v = to_physical(w.v);
  const std::vector<double> ux = to_physical(spectral_derivative(w.u));
  double sum = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) sum += 0.5 * v[j] * v[j] + 0.5 * ux[j] * ux[j] + nl.potential(u[j]);
  return w.grid().spacing() * sum;
}

/// ||a - b||_{H^s} without forming the difference field.
inline double sobolev_distance(const SpectralField& a, const SpectralField& b, double s) {
  require_same_grid(a.grid(), b.grid());
  const int n = a.grid().half_points();
  double sum = 0.0;
  for (int l = -n; l < n; ++l) sum += std::pow(bracket(l), 2.0 * s) * std::norm(a(l) - b(l));
  return std::sqrt(sum);
}

/// ||u - u_ref||_{H^1} / ||u_ref||_{H^1} + ||v - v_ref||_{L^2} / ||v_ref||_{L^2}.
/// The reference supplies the denominators, so the gauge is not symmetric.
inline double err_metric(const StateU& numerical, const StateU& reference) {
  const double nu = sobolev_norm(reference.u, 1.0);
  const double nv = sobolev_norm(reference.v, 0.0);
  if (nu == 0.0 || nv == 0.0) throw DegenerateReferenceError("reference solution has a zero component norm");
  return sobolev_distance(numerical.u, reference.u, 1.0) / nu + sobolev_distance(numerical.v, reference.v, 0.0) / nv;
}

struct OrderFit {
  double slope = 0.0;             // least squares slope of log err against log tau
  std::vector<double> pairwise;   // between consecutive retained rows
  std::vector<double> used_taus;  // rows entering the fit, in input order
  std::vector<std::string> warnings;
};

/// Convergence order from error rows. Rows with err == 0 are dropped with an
/// exact-solution warning; at least two rows with distinct tau must remain.
inline OrderFit fit_order(const std::vector<ConvergenceRow>& rows) {
  OrderFit fit;
  std::vector<double> x, y;
  for (const auto& r : rows) {
    if (!(r.tau > 0.0) || r.err < 0.0 || std::isnan(r.err)) {
      throw ParameterError("convergence rows need tau > 0 and err >= 0");
    }
    if (r.err == 0.0) {
      fit.warnings.push_back("exact solution at tau=" + std::to_string(r.tau) + "; row excluded");
      continue;
    }
    x.push_back(std::log(r.tau));
    y.push_back(std::log(r.err));
    fit.used_taus.push_back(r.tau);
  }
  if (x.size() < 2) throw ParameterError("order fit needs at least two rows with err > 0");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ParameterError("order fit needs distinct tau values");
  fit.slope = sxy / sxx;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) fit.pairwise.push_back((y[i] - y[i + 1]) / (x[i] - x[i + 1]));
  return fit;
}

struct DriftSummary {
  double max_abs_relative_error = 0.0;
  double trend = 0.0;  // least squares slope of |relative error| against time
  std::size_t samples = 0;

  friend bool operator==(const DriftSummary&, const DriftSummary&) = default;
};

/// Statistics of |relative energy error| over samples with t_lo <= t <= t_hi.
inline DriftSummary drift_series(const std::vector<EnergySample>& samples, double t_lo, double t_hi) {
  std::vector<double> t, e;
  for (const auto& s : samples) {
    if (s.time >= t_lo && s.time <= t_hi) {
      t.push_back(s.time);
      e.push_back(std::abs(s.relative_error));
    }
  }
  if (t.empty()) throw std::range_error("no energy samples in the requested window");
  DriftSummary out;
  out.samples = t.size();
  for (double v : e) out.max_abs_relative_error = std::max(out.max_abs_relative_error, v);
  if (t.size() < 2) return out;
  const double n = static_cast<double>(t.size());
  const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double me = std::accumulate(e.begin(), e.end(), 0.0) / n;
  double stt = 0.0, ste = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    ste += (t[i] - mt) * (e[i] - me);
  }
  out.trend = stt > 0.0 ? ste / stt : 0.0;
  return out;
}

}  // namespace kgsym
