#pragma once

// Explicit low-regularity exponential integrators for U' = L U + F(U).
//
//   lri1   U+ = e^{tL} U + t e^{tL} F(U)                              (Lie splitting)
//   lri2   U+ = lri1 + t^2 e^{tL} phi2(-2tL) H(U)                    (corrected Lie splitting)
//   slri1  U+ = e^{2tL} U- + 2t e^{tL} F(U)                           (symmetric, two-step)
//   slri2  U+ = e^{2tL} U- + 2t e^{tL} F(U) + t^2 e^{tL} phi(-2tL) H(U)
//
// with F(U) = (0, f(u)) and H(U) = (-f(u), f'(u) v). The symmetric schemes take
// their first step with the matching one-step scheme. `symmetrize` builds the
// two-step scheme U+ = e^{2tL} U- + Psi_t(U) - e^{2tL} Psi_{-t}(U) from any
// correction Psi of a one-step scheme U+ = e^{tL} U + Psi_t(U).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "kgsym/errors.hpp"
#include "kgsym/grid.hpp"
#include "kgsym/nonlinearity.hpp"
#include "kgsym/propagators.hpp"

namespace kgsym {

enum class Scheme { lri1, slri1, lri2, slri2 };

inline std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::lri1: return "lri1";
    case Scheme::slri1: return "slri1";
    case Scheme::lri2: return "lri2";
    case Scheme::slri2: return "slri2";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view name) {
  if (name == "lri1") return Scheme::lri1;
  if (name == "slri1") return Scheme::slri1;
  if (name == "lri2") return Scheme::lri2;
  if (name == "slri2") return Scheme::slri2;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (expected lri1, slri1, lri2 or slri2)");
}

inline bool is_two_step(Scheme s) { return s == Scheme::slri1 || s == Scheme::slri2; }

/// (U^{n-1}, U^n) of a two-step scheme.
struct TwoStepState {
  StateU prev;
  StateU curr;
  std::int64_t step_index = 1;
  double tau = 0.0;
};

namespace detail {

// out = A x + B (0, p) + C (q, r), mode by mode; C may be null.
inline StateU combine(std::span<const ModeMatrix> a, const StateU& x, std::span<const ModeMatrix> b,
                      const SpectralField& p, std::span<const ModeMatrix> c, const SpectralField* q,
                      const SpectralField* r, double p_scale) {
  const int n = x.grid().half_points();
  StateU out(x.grid());
  for (int l = -n; l < n; ++l) {
    const auto k = static_cast<std::size_t>(std::abs(l));
    const ModeMatrix& ma = a[k];
    const ModeMatrix& mb = b[k];
    const Complex xu = x.u(l), xv = x.v(l);
    const Complex pv = p_scale * p(l);
    Complex ou = ma.a11 * xu + ma.a12 * xv + mb.a12 * pv;
    Complex ov = ma.a21 * xu + ma.a22 * xv + mb.a22 * pv;
    if (q != nullptr) {
      const ModeMatrix& mc = c[k];
      const Complex hq = (*q)(l), hr = (*r)(l);
      ou += mc.a11 * hq + mc.a12 * hr;
      ov += mc.a21 * hq + mc.a22 * hr;
    }
    out.u(l) = ou;
    out.v(l) = ov;
  }
  return out;
}

inline void check_tables(const PropagatorTable& table, const StateU& w) { require_same_grid(table.grid(), w.grid()); }

}  // namespace detail

inline StateU step_lri1(const StateU& w, const PropagatorTable& table, const Nonlinearity& nl) {
  detail::check_tables(table, w);
  const auto terms = evaluate_terms(w, nl, false);
  const auto e = table.column(Operator::exp_tau);
  return detail::combine(e, w, e, terms.f_of_u, {}, nullptr, nullptr, table.tau());
}

inline StateU step_lri2(const StateU& w, const PropagatorTable& table, const Nonlinearity& nl) {
  detail::check_tables(table, w);
  auto terms = evaluate_terms(w, nl, true);
  const auto e = table.column(Operator::exp_tau);
  SpectralField minus_f = terms.f_of_u;
  minus_f *= -1.0;
  return detail::combine(e, w, e, terms.f_of_u, table.column(Operator::phi2_filter), &minus_f,
                         &terms.fprime_u_times_v, table.tau());
}

inline TwoStepState step_slri1(const TwoStepState& ts, const PropagatorTable& table, const Nonlinearity& nl) {
  detail::check_tables(table, ts.curr);
  require_same_grid(ts.prev.grid(), ts.curr.grid());
  const auto terms = evaluate_terms(ts.curr, nl, false);
  StateU next = detail::combine(table.column(Operator::exp_2tau), ts.prev, table.column(Operator::exp_tau),
                                terms.f_of_u, {}, nullptr, nullptr, 2.0 * table.tau());
  return {ts.curr, std::move(next), ts.step_index + 1, table.tau()};
}

inline TwoStepState step_slri2(const TwoStepState& ts, const PropagatorTable& table, const Nonlinearity& nl) {
  detail::check_tables(table, ts.curr);
  require_same_grid(ts.prev.grid(), ts.curr.grid());
  auto terms = evaluate_terms(ts.curr, nl, true);
  SpectralField minus_f = terms.f_of_u;
  minus_f *= -1.0;
  StateU next = detail::combine(table.column(Operator::exp_2tau), ts.prev, table.column(Operator::exp_tau),
                                terms.f_of_u, table.column(Operator::sym_filter), &minus_f,
                                &terms.fprime_u_times_v, 2.0 * table.tau());
  return {ts.curr, std::move(next), ts.step_index + 1, table.tau()};
}

/// One step of a one-step scheme, or the starting step of a two-step scheme.
inline StateU starting_step(Scheme s, const StateU& w, const PropagatorTable& table, const Nonlinearity& nl) {
  return (s == Scheme::lri1 || s == Scheme::slri1) ? step_lri1(w, table, nl) : step_lri2(w, table, nl);
}

/// Two-step update of slri1 or slri2.
inline TwoStepState two_step(Scheme s, const TwoStepState& ts, const PropagatorTable& table,
                             const Nonlinearity& nl) {
  if (s == Scheme::slri1) return step_slri1(ts, table, nl);
  if (s == Scheme::slri2) return step_slri2(ts, table, nl);
  throw ParameterError(std::string(scheme_name(s)) + " is not a two-step scheme");
}

/// Correction map Psi of a one-step exponential integrator U+ = e^{tL} U + Psi_t(U).
/// The table passed in carries the (possibly negative) step size t.
struct OneStepScheme {
  std::string name;
  std::function<StateU(const StateU&, const PropagatorTable&, const Nonlinearity&)> correction;
};

/// Psi_t(U) = t e^{tL} F(U)
inline OneStepScheme lri1_scheme() {
  return {"lri1", [](const StateU& w, const PropagatorTable& t, const Nonlinearity& nl) {
            return t.tau() * apply(Operator::exp_tau, t, eval_F(w, nl));
          }};
}

/// Psi_t(U) = t e^{tL} F(U) + t^2 e^{tL} phi2(-2tL) H(U)
inline OneStepScheme lri2_scheme() {
  return {"lri2", [](const StateU& w, const PropagatorTable& t, const Nonlinearity& nl) {
            return t.tau() * apply(Operator::exp_tau, t, eval_F(w, nl)) +
                   apply(Operator::phi2_filter, t, eval_H(w, nl));
          }};
}

/// Psi identically zero: the pure two-step propagator.
inline OneStepScheme free_flow_scheme() {
  return {"free", [](const StateU& w, const PropagatorTable&, const Nonlinearity&) { return StateU(w.grid()); }};
}

/// Two-step symmetric scheme generated from a one-step correction.
class SymmetrizedScheme {
 public:
  SymmetrizedScheme(OneStepScheme base, const Grid& grid, double tau)
      : base_(std::move(base)), forward_(grid, tau), backward_(grid, -tau) {}

  const OneStepScheme& base() const { return base_; }
  double tau() const { return forward_.tau(); }

  /// U^1 = e^{tL} U^0 + Psi_t(U^0)
  StateU start(const StateU& u0, const Nonlinearity& nl) const {
    return apply(Operator::exp_tau, forward_, u0) + base_.correction(u0, forward_, nl);
  }

  TwoStepState begin(const StateU& u0, const Nonlinearity& nl) const { return {u0, start(u0, nl), 1, tau()}; }

  /// U^{n+1} = e^{2tL} U^{n-1} + Psi_t(U^n) - e^{2tL} Psi_{-t}(U^n)
  TwoStepState step(const TwoStepState& ts, const Nonlinearity& nl) const {
    StateU next = apply(Operator::exp_2tau, forward_, ts.prev) + base_.correction(ts.curr, forward_, nl) -
                  apply(Operator::exp_2tau, forward_, base_.correction(ts.curr, backward_, nl));
    return {ts.curr, std::move(next), ts.step_index + 1, tau()};
  }

 private:
  OneStepScheme base_;
  PropagatorTable forward_;
  PropagatorTable backward_;
};

inline SymmetrizedScheme symmetrize(OneStepScheme base, const Grid& grid, double tau) {
  return SymmetrizedScheme(std::move(base), grid, tau);
}

/// Receives (step, time, state) every `stride` steps, starting at step 0.
using StepObserver = std::function<void(std::int64_t, double, const StateU&)>;

struct EvolveOptions {
  StepObserver observer;
  std::int64_t stride = 1;
};

struct EvolveResult {
  StateU state;
  std::optional<StateU> previous;  // U^{n-1}, two-step schemes only
  std::int64_t steps = 0;
};

/// Advances `initial` by n_steps steps of size tau.
inline EvolveResult evolve(const StateU& initial, Scheme scheme, double tau, std::int64_t n_steps,
                           const Nonlinearity& nl, const EvolveOptions& options = {}) {
  if (n_steps < 0) throw ParameterError("negative step count");
  if (options.stride < 1) throw ParameterError("observer stride must be positive");
  const auto notify = [&](std::int64_t n, const StateU& w) {
    if (options.observer && n % options.stride == 0) options.observer(n, n * tau, w);
  };
  notify(0, initial);
  if (n_steps == 0) return {initial, std::nullopt, 0};

  const PropagatorTable table(initial.grid(), tau);
  StateU first = starting_step(scheme, initial, table, nl);
  if (!all_finite(first)) throw BlowUpError(1);
  notify(1, first);

  if (!is_two_step(scheme)) {
    StateU w = std::move(first);
    for (std::int64_t n = 2; n <= n_steps; ++n) {
      w = scheme == Scheme::lri1 ? step_lri1(w, table, nl) : step_lri2(w, table, nl);
      if (!all_finite(w)) throw BlowUpError(n);
      notify(n, w);
    }
    return {std::move(w), std::nullopt, n_steps};
  }

  TwoStepState ts{initial, std::move(first), 1, tau};
  for (std::int64_t n = 2; n <= n_steps; ++n) {
    ts = two_step(scheme, ts, table, nl);
    if (!all_finite(ts.curr)) throw BlowUpError(n);
    notify(n, ts.curr);
  }
  return {std::move(ts.curr), std::move(ts.prev), n_steps};
}

}  // namespace kgsym
