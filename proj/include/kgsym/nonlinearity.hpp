#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kgsym/errors.hpp"
#include "kgsym/grid.hpp"

namespace kgsym {

/// Nonlinear term f = -V' of u_tt - u_xx = f(u), with its derivative.
struct Nonlinearity {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> fprime;
  std::function<double(double)> potential;
  // Whether sup |f'|, |f''| < infinity, the setting the convergence theory covers.
  bool lipschitz_certified = false;
  // Optional fused evaluation of (f(u), f'(u)).
  std::function<void(double, double&, double&)> f_and_fprime;
};

inline Nonlinearity sine_nonlinearity() {
  return {"sine", [](double u) { return std::sin(u); }, [](double u) { return std::cos(u); },
          [](double u) { return std::cos(u); }, true, [](double u, double& f, double& fp) { ::sincos(u, &f, &fp); }};
}

inline Nonlinearity cubic_nonlinearity() {
  return {"cubic", [](double u) { return u * u * u; }, [](double u) { return 3.0 * u * u; },
          [](double u) { return -0.25 * u * u * u * u; }, false, {}};
}

/// f = f' = V = 0: every scheme reduces to the exact linear flow.
inline Nonlinearity zero_nonlinearity() {
  auto zero = [](double) { return 0.0; };
  return {"zero", zero, zero, zero, true, {}};
}

inline Nonlinearity nonlinearity_by_name(const std::string& name) {
  if (name == "sine") return sine_nonlinearity();
  if (name == "cubic") return cubic_nonlinearity();
  if (name == "zero") return zero_nonlinearity();
  throw ConfigError("unknown nonlinearity '" + name + "' (expected sine, cubic or zero)");
}

/// Spectra of f(u) and, when requested, f'(u) v, evaluated pointwise on the grid.
struct NonlinearTerms {
  SpectralField f_of_u;
  SpectralField fprime_u_times_v;
};

inline NonlinearTerms evaluate_terms(const StateU& w, const Nonlinearity& nl, bool with_fprime_v) {
  const Grid& g = w.grid();
  const std::vector<double> u = to_physical(w.u);
  std::vector<double> fu(u.size());
  NonlinearTerms out{SpectralField(g), SpectralField(g)};
  if (!with_fprime_v) {
    for (std::size_t j = 0; j < u.size(); ++j) fu[j] = nl.f(u[j]);
    out.f_of_u = to_spectral(g, fu);
  } else {
    std::vector<double> gv = to_physical(w.v);
    for (std::size_t j = 0; j < u.size(); ++j) {
      double fp = 0.0;
      if (nl.f_and_fprime) {
        nl.f_and_fprime(u[j], fu[j], fp);
      } else {
        fu[j] = nl.f(u[j]);
        fp = nl.fprime(u[j]);
      }
      gv[j] *= fp;
    }
    out.f_of_u = to_spectral(g, fu);
    out.fprime_u_times_v = to_spectral(g, gv);
  }
  if (g.dealias()) {
    truncate_two_thirds(out.f_of_u);
    truncate_two_thirds(out.fprime_u_times_v);
  }
  return out;
}

/// F(U) = (0, f(u)).
inline StateU eval_F(const StateU& w, const Nonlinearity& nl) {
  auto terms = evaluate_terms(w, nl, false);
  return StateU(SpectralField(w.grid()), std::move(terms.f_of_u));
}

/// H(U) = (-f(u), f'(u) v).
inline StateU eval_H(const StateU& w, const Nonlinearity& nl) {
  auto terms = evaluate_terms(w, nl, true);
  for (auto& c : terms.f_of_u.coeffs()) c = -c;
  return StateU(std::move(terms.f_of_u), std::move(terms.fprime_u_times_v));
}

}  // namespace kgsym
