#pragma once

// Types shared by the block and tridiagonal subspace constructions: the
// schedule knobs and the per-interval audit record.

#include <string>
#include <vector>

#include "cpair/matrix.hpp"

namespace cpair {

/// Schedules for the window count and the near-kernel thresholds.
///   F(L)    = max(2, floor(ln(L)^window_exponent))
///   G(l_b)  = g_scale * ln(l_b + e)^g_exponent
///   lambda0 = exp(-lambda0_scale * sqrt(l_b))
struct SubspaceParams {
  double window_exponent = 3.0;
  double g_exponent = 2.0;
  double g_scale = 0.1;
  double lambda0_scale = 1.0;
  double eta = 0.01;
  int n_win_override = 0;   // > 0 replaces L / F(L)
};

double window_schedule(int L, const SubspaceParams& p);
/// L / F(L) rounded down to an even integer, at least 2.
int choose_n_win(int L, const SubspaceParams& p);
/// 1 + ceil(log_{10/9}(2 / lambda_min)).
int sequence_length_bound(double lambda_min);

/// One run of the 5-step marking algorithm. labels[i] == 0 means unmarked.
struct MarkedSequence {
  int label = 0;
  int first = 0;
  int last = 0;
  int length() const { return last - first + 1; }
};

struct MarkingState {
  int n_win = 0;
  double lambda_min = 0.0;
  std::vector<double> weights;
  std::vector<int> labels;
  std::vector<MarkedSequence> sequences;
};

struct SubspaceAudit {
  std::string method;         // block | tridiag | fallback | empty
  Index dim = 0;              // dimension of the interval subspace
  int L = 0;
  int n_win = 0;
  double kappa = 0.0;
  double half_range = 1.0;
  double lambda_min = 0.0;
  double F_L = 0.0;
  Index v1_dim = 0;
  Index vL_dim = 0;
  Index w_dim = 0;

  // Measured subspace claims.
  double eps3 = 0.0;          // ||(1-P) restricted to V_1||
  double eps4 = 0.0;          // ||(1-P) J P||
  double eps5 = 0.0;          // ||P restricted to V_L||

  // Block construction.
  int l_b = 0;
  int n_sb = 0;
  double G = 0.0;
  double lambda0 = 0.0;
  double eta = 0.0;
  std::vector<Index> x_dims, n_dims, nprime_dims;
  Index u_dim = 0;
  double max_window_residual = 0.0;   // max ||(J - w(i)) v|| over unit v in X_i
  double window_orthogonality = 0.0;  // max |(x_i, x_j)| for |i - j| > 1
  double chain_residual_sq = 0.0;     // ||S - sum tau_i (1 - Z_i)||^2
  double rho_min_eig = 0.0;
  double rho_max_eig = 0.0;
  double min_eig_rho_U = 0.0;         // compression of rho to U (NaN when U = 0)
  double max_near_kernel_energy = 0.0; // max (v, rho v) over unit v in N_i
  double approx_ratio = 0.0;          // ||(1-P) FrameMap||

  // Tridiagonal construction.
  int n_seq = 0;
  int max_sequence_length = 0;
  int sequence_bound = 0;
  double max_adjacent_overlap = 0.0;  // (y_a, y_a+1) / (|y_a| |y_a+1|)
  double y_gram_min_eig = 0.0;        // normalized Gram of the y_a
  double claim1_residual_sq = 0.0;    // |P v_1 - v_1|^2
  double max_eigvec_residual = 0.0;   // max |(J - w_a) y_a| / |y_a|
  double eigvec_bound = 0.0;          // (2 + ceil(log_{10/9}(2/lambda_min))) / n_win
};

struct SubspaceResult {
  SubspaceFrame W;
  SubspaceAudit audit;
  MarkingState marking;       // filled by the tridiagonal path only
};

/// Measures eps3, eps4, eps5 for a subspace W of an interval whose first
/// block is columns [0, v1_dim) and last block is the final vL_dim columns.
void measure_claims(const CMatrix& J, const SubspaceFrame& W, Index v1_dim, Index vL_dim,
                    SubspaceAudit& audit);

/// W = whole interval, used when L is too small to split.
SubspaceResult fallback_subspace(const HermitianMatrix& J, Index v1_dim, Index vL_dim);

}  // namespace cpair
