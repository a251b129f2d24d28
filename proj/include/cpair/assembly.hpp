#pragma once

// Interval scheme, new block basis and the top-level solver producing an
// exactly commuting pair (A', B') near (A, B).

#include <string>
#include <vector>

#include "cpair/matrix.hpp"
#include "cpair/reduction.hpp"
#include "cpair/subspace_types.hpp"

namespace cpair {

enum class Mode { Auto, Block, Tridiag };

Mode parse_mode(const std::string& s);
std::string to_string(Mode m);

struct SolveOptions {
  Mode mode = Mode::Auto;
  double delta_floor = 1e-6;
  SubspaceParams subspace;
  unsigned threads = 0;
  double Delta_override = 0.0;  // > 0 replaces delta^{4/5}
  int n_cut_override = 0;       // > 0 replaces the mode's n_cut rule
};

/// Intervals I_i = [-1 + 2(i-1)/n_cut, -1 + 2i/n_cut), the last one closed.
/// Grid values outside [-1, 1] join the first or last interval.
struct IntervalScheme {
  int n_cut = 0;
  int L = 0;                       // floor(2 / (n_cut Delta) - 1)
  std::vector<Index> first_block;  // partition block range per interval, -1 when empty
  std::vector<Index> last_block;
  std::vector<Index> col_begin;    // column range in the X basis
  std::vector<Index> col_size;

  int num_intervals() const { return n_cut; }
};

IntervalScheme make_intervals(const BlockPartition& p, int n_cut);

/// n_cut + 1 orthonormal blocks in X-basis coordinates; block 0 = W_1,
/// block i = W_{i+1} + W_i^perp, block n_cut = W_{n_cut}^perp.
struct NewBasis {
  CMatrix V;
  std::vector<Index> block_begin;
  std::vector<Index> block_size;
};

/// W[i] is a frame in the coordinates of interval i. Throws AssemblyRankError
/// when the blocks fail to form a unitary.
NewBasis assemble_new_basis(const IntervalScheme& scheme, const std::vector<SubspaceFrame>& W,
                            Index dim);

struct CommutingPairResult {
  CMatrix V;            // common eigenbasis, columns in the input basis
  RVector a_prime;
  RVector b_prime;
  std::string mode;     // block | tridiag | trivial
  double delta = 0.0;
  double Delta = 0.0;
  int n_cut = 0;
  int L = 0;
  double scale_factor = 1.0;
  double err_A = 0.0;
  double err_B = 0.0;
  double err_H = 0.0;
  double err_X = 0.0;
  double offdiag_norm = 0.0;
  double predicted_offdiag = 0.0;
  double commutator_residual = 0.0;
  double max_eps3 = 0.0, max_eps4 = 0.0, max_eps5 = 0.0;
  double h_norm = 0.0;
  std::vector<Index> new_block_dims;
  std::vector<SubspaceAudit> intervals;
  double runtime_seconds = 0.0;

  CMatrix A_prime() const;
  CMatrix B_prime() const;
};

/// B' value -1 + 2i/n_cut of new block i.
std::vector<double> block_identity_values(int n_cut);

/// A' from the per-block eigendecompositions of H, B' equal to
/// block_values[i] on block i. H_X is H in the X basis, U the X basis itself.
CommutingPairResult finalize(const HermitianMatrix& A, const HermitianMatrix& B,
                             const CMatrix& U, const CMatrix& H_X, const NewBasis& basis,
                             const std::vector<double>& block_values);

CommutingPairResult solve(const HermitianMatrix& A, const HermitianMatrix& B,
                          const SolveOptions& opts = {});

}  // namespace cpair
