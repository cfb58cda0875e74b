#pragma once

// Periodic 1-D grid on [-pi, pi), spectral fields and their norms.
//
// Coefficients follow u(x) = sum_l c_l exp(i l x) over the modes
// l = -N, ..., N-1 of a 2N-point grid x_j = j pi / N, j = -N, ..., N-1.
// The forward transform divides by 2N. Physical arrays are stored in the
// natural order of j, so entry m holds u(x_{m-N}).

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "kgsym/errors.hpp"

namespace kgsym {

using Complex = std::complex<double>;

namespace detail {

// FFTW's planner is not thread-safe; execution on fresh arrays is. Arrays
// passed to execution must be allocated with fftw_malloc (SIMD alignment).
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlans {
 public:
  explicit FftPlans(int points) : points_(points) {
    std::lock_guard lock(fftw_planner_mutex());
    auto* real = fftw_alloc_real(static_cast<std::size_t>(points));
    auto* spec = fftw_alloc_complex(static_cast<std::size_t>(points / 2 + 1));
    // FFTW_ESTIMATE keeps the plan, and hence every rounding, identical across runs.
    constexpr unsigned flags = FFTW_ESTIMATE;
    forward_ = fftw_plan_dft_r2c_1d(points, real, spec, flags);
    backward_ = fftw_plan_dft_c2r_1d(points, spec, real, flags | FFTW_DESTROY_INPUT);
    fftw_free(real);
    fftw_free(spec);
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  ~FftPlans() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  void forward(double* in, Complex* out) const {
    fftw_execute_dft_r2c(forward_, in, reinterpret_cast<fftw_complex*>(out));
  }

  void backward(Complex* in, double* out) const {
    fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(in), out);
  }

  int points() const { return points_; }

 private:
  int points_;
  fftw_plan forward_{};
  fftw_plan backward_{};
};

}  // namespace detail

/// Uniform periodic grid with 2N points. Copies share one set of FFT plans.
class Grid {
 public:
  /// `half_points` is N; the grid has 2N >= 8 points.
  /// `dealias` enables 2/3-rule truncation of nonlinear terms.
  explicit Grid(int half_points, bool dealias = false) : n_(half_points), dealias_(dealias) {
    if (half_points < 4) {
      throw DimensionError("grid needs at least 8 points, got N=" + std::to_string(half_points));
    }
    plans_ = std::make_shared<const detail::FftPlans>(2 * half_points);
  }

  int half_points() const { return n_; }
  int num_points() const { return 2 * n_; }
  int min_mode() const { return -n_; }
  int max_mode() const { return n_ - 1; }
  double spacing() const { return std::numbers::pi / n_; }
  double point(int j) const { return j * std::numbers::pi / n_; }
  bool dealias() const { return dealias_; }

  /// Storage slot of mode l.
  std::size_t slot(int l) const { return static_cast<std::size_t>(l + n_); }

  const detail::FftPlans& plans() const { return *plans_; }

  friend bool operator==(const Grid& a, const Grid& b) { return a.n_ == b.n_; }

 private:
  int n_;
  bool dealias_;
  std::shared_ptr<const detail::FftPlans> plans_;
};

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    throw DimensionError("grid mismatch: N=" + std::to_string(a.half_points()) + " vs N=" +
                         std::to_string(b.half_points()));
  }
}

/// Japanese bracket with <0> = 1.
inline double bracket(int l) { return l == 0 ? 1.0 : std::abs(static_cast<double>(l)); }

/// Fourier coefficients of a real periodic function.
class SpectralField {
 public:
  explicit SpectralField(Grid grid)
      : grid_(std::move(grid)), coeffs_(static_cast<std::size_t>(grid_.num_points())) {}

  SpectralField(Grid grid, std::vector<Complex> coeffs) : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != static_cast<std::size_t>(grid_.num_points())) {
      throw DimensionError("expected " + std::to_string(grid_.num_points()) + " coefficients, got " +
                           std::to_string(coeffs_.size()));
    }
  }

  const Grid& grid() const { return grid_; }

  Complex& operator()(int l) { return coeffs_[grid_.slot(l)]; }
  const Complex& operator()(int l) const { return coeffs_[grid_.slot(l)]; }

  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  friend bool operator==(const SpectralField& a, const SpectralField& b) {
    return a.grid_ == b.grid_ && a.coeffs_ == b.coeffs_;
  }

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

/// U = (u, v = du/dt) in spectral form.
struct StateU {
  SpectralField u;
  SpectralField v;

  explicit StateU(const Grid& grid) : u(grid), v(grid) {}
  StateU(SpectralField u_, SpectralField v_) : u(std::move(u_)), v(std::move(v_)) {
    require_same_grid(u.grid(), v.grid());
  }

  const Grid& grid() const { return u.grid(); }

  friend bool operator==(const StateU&, const StateU&) = default;
};

inline SpectralField& operator+=(SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid(), b.grid());
  auto ac = a.coeffs();
  auto bc = b.coeffs();
  for (std::size_t i = 0; i < ac.size(); ++i) ac[i] += bc[i];
  return a;
}

inline SpectralField& operator*=(SpectralField& a, double s) {
  for (auto& c : a.coeffs()) c *= s;
  return a;
}

inline StateU& operator+=(StateU& a, const StateU& b) {
  a.u += b.u;
  a.v += b.v;
  return a;
}

inline StateU& operator*=(StateU& a, double s) {
  a.u *= s;
  a.v *= s;
  return a;
}

inline StateU operator+(StateU a, const StateU& b) { return a += b; }
inline StateU operator*(double s, StateU a) { return a *= s; }
inline StateU operator-(StateU a, const StateU& b) {
  StateU nb = -1.0 * b;
  return a += nb;
}

/// True when every coefficient of both components is finite.
inline bool all_finite(const StateU& w) {
  for (const auto* f : {&w.u, &w.v}) {
    for (const auto& c : f->coeffs()) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
  }
  return true;
}

inline constexpr double kHermitianTolerance = 1e-12;

/// Largest violation of c(-l) = conj(c(l)), relative to the largest coefficient.
inline double hermitian_defect(const SpectralField& f) {
  const int n = f.grid().half_points();
  double scale2 = 0.0;
  for (const auto& c : f.coeffs()) scale2 = std::max(scale2, std::norm(c));
  if (scale2 == 0.0) return 0.0;
  double worst2 = std::max(f(0).imag() * f(0).imag(), f(-n).imag() * f(-n).imag());
  for (int l = 1; l < n; ++l) worst2 = std::max(worst2, std::norm(f(-l) - std::conj(f(l))));
  return std::sqrt(worst2 / scale2);
}

namespace detail {

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

// SIMD-aligned scratch for the transforms.
template <typename T>
using AlignedBuffer = std::unique_ptr<T[], FftwDeleter>;

inline AlignedBuffer<double> real_buffer(int n) { return AlignedBuffer<double>(fftw_alloc_real(static_cast<std::size_t>(n))); }

inline AlignedBuffer<Complex> complex_buffer(int n) {
  return AlignedBuffer<Complex>(reinterpret_cast<Complex*>(fftw_alloc_complex(static_cast<std::size_t>(n))));
}

}  // namespace detail

/// Pointwise values u(x_j), j = -N..N-1.
inline std::vector<double> to_physical(const SpectralField& f) {
  const Grid& g = f.grid();
  const int n = g.half_points();
  if (const double d = hermitian_defect(f); d > kHermitianTolerance) {
    throw SymmetryError("spectrum is not Hermitian (relative defect " + std::to_string(d) + ")");
  }
  // Shifting the sample origin from x=0 to x=-pi multiplies mode l by (-1)^l.
  auto half = detail::complex_buffer(n + 1);
  for (int l = 0; l < n; ++l) half[l] = (l % 2 == 0) ? f(l) : -f(l);
  half[n] = Complex((n % 2 == 0) ? f(-n).real() : -f(-n).real(), 0.0);
  half[0].imag(0.0);
  auto out = detail::real_buffer(2 * n);
  g.plans().backward(half.get(), out.get());
  return std::vector<double>(out.get(), out.get() + 2 * n);
}

/// Spectral coefficients of 2N real samples; Hermitian by construction.
inline SpectralField to_spectral(const Grid& g, std::span<const double> values) {
  const int n = g.half_points();
  if (values.size() != static_cast<std::size_t>(2 * n)) {
    throw DimensionError("expected " + std::to_string(2 * n) + " samples, got " + std::to_string(values.size()));
  }
  auto in = detail::real_buffer(2 * n);
  std::copy(values.begin(), values.end(), in.get());
  auto half = detail::complex_buffer(n + 1);
  g.plans().forward(in.get(), half.get());
  const double inv = 1.0 / (2 * n);
  SpectralField f(g);
  f(0) = Complex(half[0].real() * inv, 0.0);
  for (int l = 1; l < n; ++l) {
    const Complex c = ((l % 2 == 0) ? half[l] : -half[l]) * inv;
    f(l) = c;
    f(-l) = std::conj(c);
  }
  f(-n) = Complex(((n % 2 == 0) ? half[n].real() : -half[n].real()) * inv, 0.0);
  return f;
}

/// Zeroes every mode with |l| > 2N/3.
inline void truncate_two_thirds(SpectralField& f) {
  const int n = f.grid().half_points();
  const int cutoff = (2 * n) / 3;
  for (int l = -n; l < n; ++l) {
    if (std::abs(l) > cutoff) f(l) = 0.0;
  }
}

/// (sum_l <l>^{2s} |c_l|^2)^{1/2}; the 2*pi measure factor is dropped.
inline double sobolev_norm(const SpectralField& f, double s) {
  const int n = f.grid().half_points();
  double sum = 0.0;
  for (int l = -n; l < n; ++l) sum += std::pow(bracket(l), 2.0 * s) * std::norm(f(l));
  return std::sqrt(sum);
}

/// Homogeneous seminorm: weights |l|^{2s}, so the zero mode never counts for s > 0.
inline double homogeneous_sobolev_norm(const SpectralField& f, double s) {
  const int n = f.grid().half_points();
  double sum = 0.0;
  for (int l = -n; l < n; ++l) {
    if (l == 0) {
      if (s == 0.0) sum += std::norm(f(0));
      continue;
    }
    sum += std::pow(std::abs(static_cast<double>(l)), 2.0 * s) * std::norm(f(l));
  }
  return std::sqrt(sum);
}

/// |W|_alpha (homogeneous) or ||W||_alpha: u measured in (dot-)H^alpha, v in H^{alpha-1}.
inline double state_norm(const StateU& w, double alpha, bool homogeneous) {
  const double nu = homogeneous ? homogeneous_sobolev_norm(w.u, alpha) : sobolev_norm(w.u, alpha);
  const double nv = sobolev_norm(w.v, alpha - 1.0);
  return std::sqrt(nu * nu + nv * nv);
}

/// Multiplies mode l by i*l. The Nyquist mode has no partner and is zeroed.
inline SpectralField spectral_derivative(const SpectralField& f) {
  const int n = f.grid().half_points();
  SpectralField d(f.grid());
  for (int l = -n + 1; l < n; ++l) d(l) = Complex(0.0, static_cast<double>(l)) * f(l);
  return d;
}

}  // namespace kgsym
