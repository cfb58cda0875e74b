#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kgsym/errors.hpp"
#include "kgsym/grid.hpp"

namespace kgsym {

/// Random H^theta x H^{theta-1} datum.
struct RoughDatumSpec {
  double theta = 1.5;
  std::uint64_t seed = 0;
  int max_frequency = 0;  // modes |l| < max_frequency are populated
  double scale = 1.0;     // applied after normalization
};

/// Soliton-type smooth datum; u0(0) = scale * sqrt(2a/b).
struct SolitonDatumSpec {
  double a = 0.3;
  double b = 1.0;
  double c = 0.25;
  double scale = 0.1;
};

namespace detail {

// Uniform [0,1) from the top 53 bits; independent of the standard library's
// distribution implementation.
inline double unit_uniform(std::mt19937_64& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Unnormalized phi_1, phi_2: coefficient xi_l <l>^{-theta-1/2} (resp. zeta_l <l>^{-theta+1/2})
/// at modes +-l for 0 <= l < max_frequency, xi and zeta uniform on [0,1).
inline StateU rough_profiles(const RoughDatumSpec& spec, const Grid& grid) {
  if (spec.max_frequency < 1 || spec.max_frequency > grid.half_points()) {
    throw ParameterError("rough datum max_frequency must lie in [1, N], got " + std::to_string(spec.max_frequency));
  }
  if (!(spec.theta > 0.5)) throw ParameterError("rough datum needs theta > 1/2");
  std::mt19937_64 engine(spec.seed);
  const int m = spec.max_frequency;
  std::vector<double> xi(static_cast<std::size_t>(m)), zeta(static_cast<std::size_t>(m));
  for (auto& x : xi) x = detail::unit_uniform(engine);
  for (auto& z : zeta) z = detail::unit_uniform(engine);

  StateU w(grid);
  for (int l = 0; l < m; ++l) {
    const double cu = xi[l] * std::pow(bracket(l), -spec.theta - 0.5);
    const double cv = zeta[l] * std::pow(bracket(l), -spec.theta + 0.5);
    w.u(l) = cu;
    w.v(l) = cv;
    if (l > 0) {
      w.u(-l) = cu;
      w.v(-l) = cv;
    }
  }
  return w;
}

/// u0 = phi_1 / ||phi_1||_{H^1}, v0 = phi_2 / ||phi_2||_{L^2}, both times spec.scale.
inline StateU make_rough(const RoughDatumSpec& spec, const Grid& grid) {
  StateU w = rough_profiles(spec, grid);
  w.u *= spec.scale / sobolev_norm(w.u, 1.0);
  w.v *= spec.scale / sobolev_norm(w.v, 0.0);
  return w;
}

inline double soliton_rate(const SolitonDatumSpec& s) {
  if (!(s.a > 0.0) || !(s.b > 0.0)) throw ParameterError("soliton datum needs a > 0 and b > 0");
  if (!(s.a * s.a > s.c * s.c)) throw ParameterError("soliton datum needs a^2 > c^2");
  return std::sqrt(s.a / (s.a * s.a - s.c * s.c));
}

/// u0 = scale sqrt(2a/b) sech(r x), v0 = c scale sqrt(2a/b) r sech(r x) tanh(r x).
inline StateU make_soliton(const SolitonDatumSpec& spec, const Grid& grid) {
  const double r = soliton_rate(spec);
  const double amp = spec.scale * std::sqrt(2.0 * spec.a / spec.b);
  const int n = grid.half_points();
  std::vector<double> u(static_cast<std::size_t>(2 * n)), v(u.size());
  for (int j = -n; j < n; ++j) {
    const double x = grid.point(j);
    const double sech = 1.0 / std::cosh(r * x);
    u[static_cast<std::size_t>(j + n)] = amp * sech;
    v[static_cast<std::size_t>(j + n)] = spec.c * amp * r * sech * std::tanh(r * x);
  }
  return StateU(to_spectral(grid, u), to_spectral(grid, v));
}

}  // namespace kgsym
