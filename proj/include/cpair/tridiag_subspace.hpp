#pragma once

// Subspace W for a tridiagonal J: scalar window weights, the greedy marking
// of window sequences and the merged-window vectors y_a.

#include <vector>

#include "cpair/matrix.hpp"
#include "cpair/subspace_types.hpp"

namespace cpair {

/// rho_i = |F(w(i), 0, kappa, J) v_1|^2 on the grid of n_win windows over
/// [-h, h].
std::vector<double> window_weights(const HermitianMatrix& J, int n_win, double half_range = 1.0);

MarkingState run_marking(const std::vector<double>& weights, double lambda_min);

/// Requires J elementwise tridiagonal (InvalidMatrix otherwise). L = dim(J) unless
/// overridden. Throws IntervalTooSmall for L < 4.
SubspaceResult build_W_tridiag(const HermitianMatrix& J, const SubspaceParams& params = {});

/// max |J_rc| over |r - c| > 1.
double tridiagonal_defect(const CMatrix& J);

}  // namespace cpair
