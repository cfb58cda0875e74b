#pragma once

// Functions of the wave generator L = [[0, I], [Delta, 0]] acting mode by mode.
//
// On Fourier mode l the generator is the real 2x2 block L_l = [[0, 1], [-l^2, 0]],
// so every operator used by the integrators is a real 2x2 matrix per mode,
// depending on |l| only. With k = |l| and theta = 2 tau k:
//
//   exp(t L_l)          = [[cos kt, sin(kt)/k], [-k sin kt, cos kt]]
//   phi2(-2 tau L_l)    = c(theta) I - 2 tau g(theta) L_l
//   phi(-2 tau L_l)     = -4 tau g(theta) L_l
//
// where c(theta) = (1 - cos theta)/theta^2 and g(theta) = (theta - sin theta)/theta^3.
// Both are even, entire, and equal 1/2 and 1/6 at theta = 0, which also covers
// the nilpotent l = 0 block without a separate branch.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "kgsym/grid.hpp"

namespace kgsym {

/// Real 2x2 matrix acting on the per-mode pair (u_l, v_l).
struct ModeMatrix {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

  static constexpr ModeMatrix identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr ModeMatrix zero() { return {0.0, 0.0, 0.0, 0.0}; }

  friend constexpr ModeMatrix operator*(const ModeMatrix& a, const ModeMatrix& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend constexpr ModeMatrix operator+(const ModeMatrix& a, const ModeMatrix& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
  }
  friend constexpr ModeMatrix operator-(const ModeMatrix& a, const ModeMatrix& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
  }
  friend constexpr ModeMatrix operator*(double s, const ModeMatrix& a) {
    return {s * a.a11, s * a.a12, s * a.a21, s * a.a22};
  }
  friend constexpr bool operator==(const ModeMatrix&, const ModeMatrix&) = default;
};

namespace detail {

// Below this |theta| the even coefficient functions are summed as series;
// the closed forms lose digits to cancellation in theta - sin(theta).
inline constexpr double kSeriesThreshold = 1.0;

/// (1 - cos theta) / theta^2
inline double one_minus_cos_ratio(double theta) {
  const double t2 = theta * theta;
  if (std::abs(theta) < kSeriesThreshold) {
    // sum_m (-1)^m theta^{2m} / (2m+2)!
    double term = 0.5, sum = 0.5;
    for (int m = 1; m < 12; ++m) {
      term *= -t2 / ((2.0 * m + 1.0) * (2.0 * m + 2.0));
      sum += term;
    }
    return sum;
  }
  const double s = std::sin(0.5 * theta);
  return 2.0 * s * s / t2;
}

/// (theta - sin theta) / theta^3
inline double theta_minus_sin_ratio(double theta) {
  const double t2 = theta * theta;
  if (std::abs(theta) < kSeriesThreshold) {
    // sum_m (-1)^m theta^{2m} / (2m+3)!
    double term = 1.0 / 6.0, sum = 1.0 / 6.0;
    for (int m = 1; m < 12; ++m) {
      term *= -t2 / ((2.0 * m + 2.0) * (2.0 * m + 3.0));
      sum += term;
    }
    return sum;
  }
  return (theta - std::sin(theta)) / (t2 * theta);
}

inline constexpr ModeMatrix generator(int l) {
  return {0.0, 1.0, -static_cast<double>(l) * l, 0.0};
}

}  // namespace detail

/// exp(t L_l).
inline ModeMatrix exp_mode(int l, double t) {
  if (l == 0) return {1.0, t, 0.0, 1.0};
  const double k = std::abs(static_cast<double>(l));
  const double c = std::cos(k * t);
  const double s = std::sin(k * t);
  return {c, s / k, -k * s, c};
}

/// phi2(-2 tau L_l) with phi2(A) = A^{-2}(e^A - A - I).
inline ModeMatrix phi2_mode(int l, double tau) {
  const double theta = 2.0 * tau * std::abs(static_cast<double>(l));
  const double c = detail::one_minus_cos_ratio(theta);
  const double g = detail::theta_minus_sin_ratio(theta);
  return ModeMatrix{c, 0.0, 0.0, c} + (-2.0 * tau * g) * detail::generator(l);
}

/// phi(-2 tau L_l) with phi(A) = 2 A^{-2}(sinh A - A).
inline ModeMatrix phi_sym_mode(int l, double tau) {
  const double theta = 2.0 * tau * std::abs(static_cast<double>(l));
  return (-4.0 * tau * detail::theta_minus_sin_ratio(theta)) * detail::generator(l);
}

/// tau^2 exp(tau L_l) phi2(-2 tau L_l): the low-regularity correction filter.
inline ModeMatrix phi2_filter_mode(int l, double tau) {
  return (tau * tau) * (exp_mode(l, tau) * phi2_mode(l, tau));
}

/// tau^2 exp(tau L_l) phi(-2 tau L_l): the filter of the symmetric second-order scheme.
inline ModeMatrix sym_filter_mode(int l, double tau) {
  return (tau * tau) * (exp_mode(l, tau) * phi_sym_mode(l, tau));
}

/// Operators tabulated by PropagatorTable.
enum class Operator : std::size_t {
  identity,
  exp_tau,       // exp(tau L)
  exp_2tau,      // exp(2 tau L)
  exp_neg_tau,   // exp(-tau L)
  phi2_filter,   // tau^2 exp(tau L) phi2(-2 tau L)
  sym_filter,    // tau^2 exp(tau L) phi(-2 tau L)
};

inline constexpr std::size_t kOperatorCount = 6;

/// Per-mode matrices for one step size. Entries depend on |l| only and are
/// stored for k = 0..N.
class PropagatorTable {
 public:
  PropagatorTable(Grid grid, double tau) : grid_(std::move(grid)), tau_(tau) {
    if (std::isnan(tau)) throw ParameterError("step size is NaN");
    const int n = grid_.half_points();
    for (auto& column : entries_) column.resize(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) {
      entries_[index(Operator::identity)][k] = ModeMatrix::identity();
      entries_[index(Operator::exp_tau)][k] = exp_mode(k, tau);
      entries_[index(Operator::exp_2tau)][k] = exp_mode(k, 2.0 * tau);
      entries_[index(Operator::exp_neg_tau)][k] = exp_mode(k, -tau);
      entries_[index(Operator::phi2_filter)][k] = phi2_filter_mode(k, tau);
      entries_[index(Operator::sym_filter)][k] = sym_filter_mode(k, tau);
    }
  }

  const Grid& grid() const { return grid_; }
  double tau() const { return tau_; }

  const ModeMatrix& at(Operator op, int l) const {
    return entries_[index(op)][static_cast<std::size_t>(std::abs(l))];
  }

  /// Matrices for k = |l| = 0..N.
  std::span<const ModeMatrix> column(Operator op) const { return entries_[index(op)]; }

 private:
  static constexpr std::size_t index(Operator op) { return static_cast<std::size_t>(op); }

  Grid grid_;
  double tau_;
  std::array<std::vector<ModeMatrix>, kOperatorCount> entries_;
};

inline PropagatorTable build_table(const Grid& grid, double tau) { return PropagatorTable(grid, tau); }

/// Applies one real 2x2 matrix per mode to (u_l, v_l).
inline StateU apply(std::span<const ModeMatrix> by_abs_mode, const StateU& w) {
  const Grid& g = w.grid();
  const int n = g.half_points();
  if (by_abs_mode.size() != static_cast<std::size_t>(n + 1)) {
    throw DimensionError("operator table does not match the state grid");
  }
  StateU out(g);
  for (int l = -n; l < n; ++l) {
    const ModeMatrix& m = by_abs_mode[static_cast<std::size_t>(std::abs(l))];
    const Complex u = w.u(l);
    const Complex v = w.v(l);
    out.u(l) = m.a11 * u + m.a12 * v;
    out.v(l) = m.a21 * u + m.a22 * v;
  }
  return out;
}

inline StateU apply(Operator op, const PropagatorTable& table, const StateU& w) {
  require_same_grid(table.grid(), w.grid());
  return apply(table.column(op), w);
}

}  // namespace kgsym
