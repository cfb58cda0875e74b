#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "kgsym/kgsym.hpp"

namespace oracle {

using kgsym::Complex;
using LD = long double;

// Direct summation u(x_j) = sum_l c_l e^{i l x_j}, x_j = j pi / N.
inline std::vector<double> synthesize(int n, const std::vector<Complex>& coeffs) {
  std::vector<double> out(static_cast<std::size_t>(2 * n));
  for (int j = -n; j < n; ++j) {
    std::complex<LD> acc = 0;
    for (int l = -n; l < n; ++l) {
      const LD arg = static_cast<LD>(l) * j * std::numbers::pi_v<LD> / n;
      acc += std::complex<LD>(coeffs[static_cast<std::size_t>(l + n)]) * std::complex<LD>(std::cos(arg), std::sin(arg));
    }
    out[static_cast<std::size_t>(j + n)] = static_cast<double>(acc.real());
  }
  return out;
}

inline std::vector<double> synthesize(const kgsym::SpectralField& f) {
  return synthesize(f.grid().half_points(), std::vector<Complex>(f.coeffs().begin(), f.coeffs().end()));
}

// Direct DFT c_l = (1/2N) sum_j u_j e^{-i l x_j}.
inline std::vector<Complex> analyze(int n, const std::vector<double>& values) {
  std::vector<Complex> out(static_cast<std::size_t>(2 * n));
  for (int l = -n; l < n; ++l) {
    std::complex<LD> acc = 0;
    for (int j = -n; j < n; ++j) {
      const LD arg = -static_cast<LD>(l) * j * std::numbers::pi_v<LD> / n;
      acc += static_cast<LD>(values[static_cast<std::size_t>(j + n)]) * std::complex<LD>(std::cos(arg), std::sin(arg));
    }
    out[static_cast<std::size_t>(l + n)] = Complex(acc / static_cast<LD>(2 * n));
  }
  return out;
}

// Dense long double matrix.
struct Mat {
  int n = 0;
  std::vector<LD> a;

  explicit Mat(int n_) : n(n_), a(static_cast<std::size_t>(n_ * n_), 0.0L) {}
  LD& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  LD operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }

  static Mat identity(int n) {
    Mat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0L;
    return m;
  }
};

inline Mat operator*(const Mat& x, const Mat& y) {
  Mat z(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k)
      for (int j = 0; j < x.n; ++j) z(i, j) += x(i, k) * y(k, j);
  return z;
}

inline LD inf_norm(const Mat& m) {
  LD best = 0;
  for (int i = 0; i < m.n; ++i) {
    LD row = 0;
    for (int j = 0; j < m.n; ++j) row += std::abs(m(i, j));
    best = std::max(best, row);
  }
  return best;
}

// Power series with `terms` terms after scaling ||M|| below 1/2, then repeated squaring.
inline Mat expm(Mat m, int terms = 30) {
  int squarings = 0;
  const LD norm = inf_norm(m);
  while (std::ldexp(norm, -squarings) > 0.5L) ++squarings;
  for (auto& x : m.a) x = std::ldexp(x, -squarings);
  Mat sum = Mat::identity(m.n);
  Mat term = Mat::identity(m.n);
  for (int k = 1; k < terms; ++k) {
    term = term * m;
    for (auto& x : term.a) x /= k;
    for (std::size_t i = 0; i < sum.a.size(); ++i) sum.a[i] += term.a[i];
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// 2x2 blocks in the basis D = diag(<l>, 1), where L_l becomes [[0, k], [-k, 0]]
// (or [[0, 1], [0, 0]] at l = 0) and all entries are O(1).
inline Mat scaled_generator(int l) {
  Mat b(2);
  const LD k = std::abs(static_cast<LD>(l));
  if (l == 0) {
    b(0, 1) = 1;
  } else {
    b(0, 1) = k;
    b(1, 0) = -k;
  }
  return b;
}

inline Mat scaled(const Mat& b, LD s) {
  Mat out = b;
  for (auto& x : out.a) x *= s;
  return out;
}

inline Mat exp_mode(int l, LD t) { return expm(scaled(scaled_generator(l), t)); }

// phi2(A) as the top-right block of exp([[A, I, 0], [0, 0, I], [0, 0, 0]]).
inline Mat phi2(const Mat& a) {
  Mat big(6);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) big(i, j) = a(i, j);
    big(i, i + 2) = 1;
    big(i + 2, i + 4) = 1;
  }
  const Mat e = expm(big);
  Mat out(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(i, j) = e(i, j + 4);
  return out;
}

inline Mat phi2_mode(int l, LD tau) { return phi2(scaled(scaled_generator(l), -2 * tau)); }

// phi(A) = 2 A^{-2}(sinh A - A) = phi2(A) - phi2(-A)
inline Mat phi_sym_mode(int l, LD tau) {
  const Mat p = phi2(scaled(scaled_generator(l), -2 * tau));
  const Mat m = phi2(scaled(scaled_generator(l), 2 * tau));
  Mat out(2);
  for (std::size_t i = 0; i < 4; ++i) out.a[i] = p.a[i] - m.a[i];
  return out;
}

inline Mat phi2_filter_mode(int l, LD tau) { return scaled(exp_mode(l, tau) * phi2_mode(l, tau), tau * tau); }
inline Mat sym_filter_mode(int l, LD tau) { return scaled(exp_mode(l, tau) * phi_sym_mode(l, tau), tau * tau); }

// A library ModeMatrix expressed in the same scaled basis.
inline Mat to_scaled(const kgsym::ModeMatrix& m, int l) {
  const LD d = l == 0 ? 1.0L : std::abs(static_cast<LD>(l));
  Mat out(2);
  out(0, 0) = m.a11;
  out(0, 1) = m.a12 * d;
  out(1, 0) = m.a21 / d;
  out(1, 1) = m.a22;
  return out;
}

// max |x - y| / max(1, max |y|)
inline double scaled_distance(const Mat& x, const Mat& y) {
  LD diff = 0, size = 1;
  for (std::size_t i = 0; i < x.a.size(); ++i) {
    diff = std::max(diff, std::abs(x.a[i] - y.a[i]));
    size = std::max(size, std::abs(y.a[i]));
  }
  return static_cast<double>(diff / size);
}

// Classical RK4 on the full spectral system u' = v, v' = -l^2 u + P f(u),
// with f evaluated through the direct DFT above.
struct OdeState {
  std::vector<Complex> u, v;
};

inline OdeState to_ode(const kgsym::StateU& w) {
  return {std::vector<Complex>(w.u.coeffs().begin(), w.u.coeffs().end()),
          std::vector<Complex>(w.v.coeffs().begin(), w.v.coeffs().end())};
}

inline kgsym::StateU from_ode(const kgsym::Grid& g, const OdeState& s) {
  return kgsym::StateU(kgsym::SpectralField(g, s.u), kgsym::SpectralField(g, s.v));
}

inline OdeState ode_rhs(int n, const OdeState& s, const std::function<double(double)>& f) {
  auto values = synthesize(n, s.u);
  for (auto& x : values) x = f(x);
  const auto fu = analyze(n, values);
  OdeState d{s.v, fu};
  for (int l = -n; l < n; ++l) d.v[static_cast<std::size_t>(l + n)] -= static_cast<double>(l) * l * s.u[static_cast<std::size_t>(l + n)];
  return d;
}

inline OdeState axpy(const OdeState& x, double a, const OdeState& y) {
  OdeState z = x;
  for (std::size_t i = 0; i < z.u.size(); ++i) {
    z.u[i] += a * y.u[i];
    z.v[i] += a * y.v[i];
  }
  return z;
}

inline kgsym::StateU rk4_flow(const kgsym::StateU& w0, double t, int substeps, const std::function<double(double)>& f) {
  const int n = w0.grid().half_points();
  const double h = t / substeps;
  OdeState s = to_ode(w0);
  for (int i = 0; i < substeps; ++i) {
    const auto k1 = ode_rhs(n, s, f);
    const auto k2 = ode_rhs(n, axpy(s, h / 2, k1), f);
    const auto k3 = ode_rhs(n, axpy(s, h / 2, k2), f);
    const auto k4 = ode_rhs(n, axpy(s, h, k3), f);
    s = axpy(s, h / 6, k1);
    s = axpy(s, h / 3, k2);
    s = axpy(s, h / 3, k3);
    s = axpy(s, h / 6, k4);
  }
  return from_ode(w0.grid(), s);
}

// Random real field with coefficients of size up to `amp` on every mode.
inline kgsym::SpectralField random_field(const kgsym::Grid& g, std::mt19937_64& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> d(-amp, amp);
  const int n = g.half_points();
  kgsym::SpectralField f(g);
  f(0) = d(rng);
  f(-n) = d(rng);
  for (int l = 1; l < n; ++l) {
    f(l) = Complex(d(rng), d(rng));
    f(-l) = std::conj(f(l));
  }
  return f;
}

inline kgsym::StateU random_state(const kgsym::Grid& g, std::mt19937_64& rng, double amp = 1.0) {
  return kgsym::StateU(random_field(g, rng, amp), random_field(g, rng, amp));
}

// Random real field with coefficients decaying like <l>^{-decay}.
inline kgsym::StateU smooth_random_state(const kgsym::Grid& g, std::mt19937_64& rng, double amp, double decay) {
  auto w = random_state(g, rng, amp);
  const int n = g.half_points();
  for (int l = -n; l < n; ++l) {
    const double s = std::pow(kgsym::bracket(l), -decay);
    w.u(l) *= s;
    w.v(l) *= s;
  }
  return w;
}

inline double max_abs_diff(const kgsym::StateU& a, const kgsym::StateU& b) {
  double m = 0;
  const int n = a.grid().half_points();
  for (int l = -n; l < n; ++l) m = std::max({m, std::abs(a.u(l) - b.u(l)), std::abs(a.v(l) - b.v(l))});
  return m;
}

inline double max_abs(const kgsym::StateU& a) {
  double m = 0;
  const int n = a.grid().half_points();
  for (int l = -n; l < n; ++l) m = std::max({m, std::abs(a.u(l)), std::abs(a.v(l))});
  return m;
}

}  // namespace oracle
