#pragma once

// Grid verification of the bound G_m < 2.1 on the even-index diagonal
// inverse entries of a unit-diagonal tridiagonal matrix shifted by lambda,
// whose off-diagonal couplings obey the saturated row constraints.

#include <cstddef>
#include <string>

namespace cpair {

struct RecursionParams {
  double lambda = 0.02;
  double grid_spacing = 1e-4;
  double g_low = 1.9;
  double g_high = 2.1;
  double y_cut = 0.54;
  // Stronger bound checked on the grid by the first simulation.
  double g_low_strong = 1.89;
  unsigned threads = 0;

  /// Throws InvalidParameter unless lambda in [0, 0.05], grid spacing in
  /// (0, 1e-2] and the thresholds are ordered.
  void validate() const;
};

/// One two-coupling step of the recursion:
///   1/c + x^2 G y^2 / c^2 / (1 - x^2 G / c),  c = 1 - lambda - y^2.
/// Throws DenominatorNonpositive if c <= 0 or 1 - x^2 G / c <= 0.
double g_step(double G_prev, double x, double y, double lambda);

/// The same two steps done by exact Schur complements of M - lambda I:
/// 1 / (d - y^2 / (d - x^2 G)), d = 1 - lambda. Agrees with g_step at
/// lambda = 0. Throws DenominatorNonpositive.
double g_step_schur(double G_prev, double x, double y, double lambda);

struct GridPoint {
  double b = 0.0;
  double x = 0.0;
  double G_in = 0.0;
  double G_out = 0.0;
};

struct Certificate {
  std::string simulation;  // "first", "second" or "third"
  bool pass = false;
  double max_G = 0.0;
  GridPoint argmax;
  // Maximum over points with y <= y_cut (first and second simulations).
  double max_G_low_region = 0.0;
  GridPoint argmax_low_region;
  double low_threshold = 0.0;
  double high_threshold = 0.0;
  // min(threshold - observed) over the claims; positive when all hold.
  double margin = 0.0;
  // Largest |G difference| / spacing between neighbouring feasible points.
  double lipschitz = 0.0;
  std::size_t points = 0;
  std::size_t skipped = 0;
  std::size_t denominator_failures = 0;
};

/// b, x swept over {0, h, ..., 1}; a^2 = 1/2 - b^2, y^2 = 1/2 - x^2/(1 - b^2);
/// G_n = g(g(1.9, a, b), x, y). Claims: G_n <= 1.89 where y <= 0.54, and
/// G_n <= 2.1 everywhere.
Certificate run_first_simulation(const RecursionParams& p = {});
/// As the first simulation with b > 0.54 and G_{n-4} = 2.1. Claims G_n <= 1.9
/// where y <= 0.54 and G_n <= 2.1 everywhere.
Certificate run_second_simulation(const RecursionParams& p = {});
/// One step from G = 1.9 over grid (x, y) with x^2 + y^2 <= 1/2. Claim G < 2.1.
/// The `b` field of grid points holds y.
Certificate run_third_simulation(const RecursionParams& p = {});

struct InductionReport {
  double G0_unit = 1.0;
  double G0_shifted = 0.0;  // 1 / (1 - lambda)
  bool base_unit = false;
  bool base_shifted = false;
  bool large_coupling_step = false;  // second simulation carries * to m+2
  bool small_coupling_step = false;  // third and first carry * to m+4
  bool conclusion_unit = false;
  bool conclusion_shifted = false;
  // Largest even index reached by the replay over all branch choices.
  int horizon = 0;
};

/// Replays the induction: property * at m (G_m <= 2.1, and G_m > 1.9 only if
/// the coupling at m exceeds 0.54) implies * at m+2 or m+4 while every even
/// index in between stays below 2.1. Run from both base values.
InductionReport induction_check(const Certificate& first, const Certificate& second, const Certificate& third,
                                const RecursionParams& p = {}, int horizon = 64);

}  // namespace cpair
