#pragma once

// Construction of the subspace W for a block-tridiagonal J restricted to one
// interval: spectral windows, the Gram matrix of the window bases,
// near-kernel spaces and the pruning sweep.

#include <vector>

#include "cpair/matrix.hpp"
#include "cpair/subspace_types.hpp"

namespace cpair {

struct WindowFamily {
  int n_win = 0;
  double kappa = 0.0;
  double half_range = 1.0;
  double lambda_min = 0.0;
  std::vector<SubspaceFrame> frames;   // X_i, in the interval coordinates
  std::vector<RVector> retained;       // retained eigenvalues of tau_i^dagger tau_i
  std::vector<CMatrix> retained_vectors; // d1 x r_i, eigenvectors of tau_i^dagger tau_i
  std::vector<CMatrix> tau;            // D x d1
};

/// Throws IntervalTooSmall for L < 4.
WindowFamily build_windows(const HermitianMatrix& J, const SubspaceFrame& S, int L,
                           const SubspaceParams& params = {});

struct GramSystem {
  HermitianMatrix rho;
  CMatrix frame_map;                  // D x R, columns are the window basis vectors
  std::vector<Index> block_dims;      // rank of X_i
  std::vector<Index> block_offsets;   // first column of window i in R
  int n_win = 0;
  int l_b = 0;
  int n_sb = 0;

  Index dim_R() const { return frame_map.cols(); }
  /// Columns of R belonging to windows [first, last] (clipped to the grid).
  std::vector<Index> columns_of_windows(int first, int last) const;
  /// Superblock i: windows [i l_b, (i+1) l_b - 1]. Empty outside [0, n_sb).
  std::vector<Index> superblock_columns(int i) const;
  /// Windows j with (i - 1/2) l_b <= j < (i + 1/2) l_b.
  std::vector<Index> centered_columns(int i) const;
};

/// Throws NumericalError subclasses never; a non-PSD Gram matrix is reported
/// through rho_min_eig by the caller.
GramSystem build_gram(const WindowFamily& windows);

double near_kernel_G(int l_b, const SubspaceParams& params);
double near_kernel_lambda0(int l_b, const SubspaceParams& params);

/// O0 = g0(rho) with g0(l) = F(0, G/l_b, G/l_b, sqrt(l)).
CMatrix near_kernel_operator(const GramSystem& g, double G);

/// N_i for i = 0..n_sb-1, frames in R.
std::vector<SubspaceFrame> build_near_kernel_spaces(const GramSystem& g, double G, double lambda0);

/// Eigenvectors of the compression of Q to range(N) with eigenvalue at most
/// 1/2 + eta.
SubspaceFrame jordan_prune(const SubspaceFrame& N, const SubspaceFrame& Q, double eta);

/// First block of J is columns [0, v1_dim), last block the final vL_dim
/// columns. Throws IntervalTooSmall for L < 4.
SubspaceResult build_W(const HermitianMatrix& J, Index v1_dim, Index vL_dim, int L,
                       const SubspaceParams& params = {});

}  // namespace cpair
