#pragma once

// Filter functions: the compactly supported polynomial (1 - w^2)^3, the
// smooth partition-of-unity bumps F(center, radius, width, w), window grids
// and the constant c0 = integral |t f(t)| dt of the polynomial's inverse
// Fourier transform.

namespace cpair {

/// (1 - w^2)^3 on [-1, 1], zero outside.
double poly_filter(double omega);

/// f(t) = (1/2pi) \int_{-1}^{1} (1 - w^2)^3 cos(w t) dw, evaluated with
/// Gauss-Legendre panels, one panel per oscillation period.
double poly_filter_inverse_fourier(double t);

/// Smooth step from 0 (s <= 0) to 1 (s >= 1): th(s) / (th(s) + th(1 - s)),
/// th(s) = exp(-1/s).
double smooth_step(double s);

struct FilterSpec {
  double center = 0.0;
  double flat_radius = 0.0;
  double rolloff_width = 1.0;
};

/// Equal to 1 for |w - center| <= r, to 0 for |w - center| >= r + width,
/// smooth and monotone in between. Throws InvalidFilter for width <= 0 or
/// negative radius.
double smooth_filter(const FilterSpec& spec, double omega);

/// n_win equally spaced windows w(i) = -h + i kappa on [-h, h] with
/// kappa = 2h / (n_win - 1). The filters F(w(i), 0, kappa, .) sum to one on
/// [-h, h]. The half range h defaults to 1.
class WindowGrid {
 public:
  WindowGrid(int n_win, double half_range = 1.0);

  int n_win() const { return n_win_; }
  double kappa() const { return kappa_; }
  double half_range() const { return half_range_; }
  double omega(int i) const { return -half_range_ + i * kappa_; }

  FilterSpec window(int i) const { return {omega(i), 0.0, kappa_}; }
  double value(int i, double omega_) const { return smooth_filter(window(i), omega_); }
  /// Single filter equal to the sum of windows i..j (inclusive).
  FilterSpec merged(int i, int j) const;

 private:
  int n_win_;
  double half_range_;
  double kappa_;
};

/// max |sum_i F(w(i), 0, kappa, w) - 1| over `grid_points` equally spaced
/// points of [-1, 1]. Throws InvalidFilter for n_win < 2.
double partition_check(int n_win, int grid_points = 100001);

/// Result of one c0 quadrature at a fixed resolution.
struct C0Estimate {
  double value = 0.0;
  double cutoff = 0.0;      // T: integration range [0, T] before the tail correction
  double step = 0.0;        // grid step used to bracket the zeros of f
  double tail = 0.0;        // asymptotic contribution of [T, inf)
};

/// 2 \int_0^T t |f(t)| dt plus the asymptotic tail 96 / (pi^2 T^2).
C0Estimate c0_at_resolution(double cutoff, double step);

struct C0Result {
  double value = 0.0;
  double previous = 0.0;    // estimate at the preceding resolution
  double rel_change = 0.0;
  int refinements = 0;
};

/// Refines (T, h) -> (2T, h/2) until two successive estimates agree to 1e-6
/// relative; throws QuadratureError otherwise. Computed once and cached.
const C0Result& compute_c0();

}  // namespace cpair
