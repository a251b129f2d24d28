#pragma once

// Reduction of an almost-commuting pair (A, B) to a finite-range H and a
// grid-valued X = Q(B), plus the Lieb-Robinson leakage check.

#include <vector>

#include "cpair/matrix.hpp"

namespace cpair {

/// Eigenbasis of X grouped into blocks of equal grid value. Block j has value
/// grid_index[j] * delta; consecutive blocks differ by exactly one grid step
/// (empty blocks are kept so the chain has no gaps).
struct BlockPartition {
  CMatrix unitary_to_X_basis;        // columns: eigenvectors of B, block by block
  RVector b_values;                  // B eigenvalue of each column
  std::vector<long> grid_index;      // k with block value k * delta
  std::vector<double> block_values;
  std::vector<Index> block_begin;    // first column of each block
  std::vector<Index> block_size;
  double delta = 0.0;

  Index dim() const { return unitary_to_X_basis.rows(); }
  Index num_blocks() const { return static_cast<Index>(block_size.size()); }
  /// Block containing column `col` of the X basis.
  Index block_of(Index col) const;
  /// Columns of the X basis spanning blocks [first, last].
  SubspaceFrame block_frame(Index first, Index last) const;
};

struct ReductionOutput {
  HermitianMatrix H;
  HermitianMatrix X;
  CMatrix H_in_X_basis;   // U^dagger H U computed without roundoff across blocks
  BlockPartition partition;
  double delta = 0.0;
  double err_H = 0.0;     // ||H - A||
  double err_X = 0.0;     // ||X - B||
};

/// Q(x) = delta * floor(x / delta + 1/2), as the integer multiple k.
long grid_round_index(double x, double delta);
double grid_round(double x, double delta);

/// H_jk = A_jk * (1 - ((x_j - x_k)/delta)^2)^3 in the eigenbasis of B,
/// entries with |x_j - x_k| >= delta are exactly zero.
HermitianMatrix construct_H(const HermitianMatrix& A, const HermitianMatrix& B, double delta);

/// Same multiplier, returned in the eigenbasis of B (columns ordered as
/// eig(B)).
CMatrix construct_H_in_B_basis(const HermitianMatrix& A, const HermitianMatrix& B, double delta);

struct SmoothingCheck {
  double commutator_HB = 0.0;
  double commutator_AB = 0.0;
  double max_off_range = 0.0;
  double err_H = 0.0;
  double bound = 0.0;     // c0 * delta_AB / Delta
  bool commutator_ok = false;
  bool range_ok = false;
  bool bound_ok = false;
  bool all() const { return commutator_ok && range_ok && bound_ok; }
};

SmoothingCheck check_smoothing(const HermitianMatrix& A, const HermitianMatrix& B,
                         const HermitianMatrix& H, double delta);

struct GridRounding {
  HermitianMatrix X;
  BlockPartition partition;
};

GridRounding construct_X(const HermitianMatrix& B, double delta);

/// Runs construct_H and construct_X on the same eigenbasis of B.
ReductionOutput reduce(const HermitianMatrix& A, const HermitianMatrix& B, double delta);

/// Tridiagonal setting: H = A unchanged, X = Q(B). Used when A is already
/// tridiagonal in the (nondegenerate) eigenbasis of B.
ReductionOutput reduce_tridiagonal(const HermitianMatrix& A, const HermitianMatrix& B, double delta);

/// Smallest gap between consecutive eigenvalues of B (infinity for dim 1).
double min_eigenvalue_gap(const HermitianMatrix& B);

/// True when B is nondegenerate and A is elementwise tridiagonal in the
/// ascending eigenbasis of B.
bool is_tridiagonal_pair(const HermitianMatrix& A, const HermitianMatrix& B);

/// Smallest |value_j - value_k| between blocks of two sets (in B units).
double block_distance(const BlockPartition& p, const std::vector<Index>& s1,
                      const std::vector<Index>& s2);

/// |P(S2) exp(-iHt) v| for v supported on the blocks of S1. Throws
/// InvalidSupport when v has weight outside S1 above 1e-10 |v|.
double lr_leakage(const HermitianMatrix& H, const BlockPartition& p, const CVector& v,
                  const std::vector<Index>& s1, const std::vector<Index>& s2, double t);

/// Worst case of lr_leakage over unit v supported on S1:
/// ||P(S2) exp(-iHt) P(S1)||.
double lr_leakage_norm(const HermitianMatrix& H, const BlockPartition& p,
                       const std::vector<Index>& s1, const std::vector<Index>& s2, double t);

/// exp(-dist / range), the amplitude bound valid for |t| <= dist / (e^2 range).
double lr_bound(double dist, double range);
double lr_time_limit(double dist, double range);

}  // namespace cpair
