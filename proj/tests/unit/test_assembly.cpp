#include <gtest/gtest.h>

#include <cmath>

#include "cpair/assembly.hpp"
#include "cpair/errors.hpp"
#include "cpair/instances.hpp"

using namespace cpair;

namespace {

BlockPartition eight_blocks() {
  RVector b(16);
  for (Index k = 0; k < 16; ++k) b(k) = -1.0 + 0.25 * static_cast<double>(k / 2);
  return construct_X(HermitianMatrix::diagonal(b), 0.25).partition;
}

void expect_result_invariants(const CommutingPairResult& r, const HermitianMatrix& A) {
  const Index dim = A.dim();
  EXPECT_LE(r.commutator_residual, 1e-10 * dim);
  EXPECT_LE((r.V.adjoint() * r.V - CMatrix::Identity(dim, dim)).norm(), 1e-9);
  for (Index k = 0; k < dim; ++k) {
    EXPECT_GE(r.b_prime(k), -1.0 - 1e-12);
    EXPECT_LE(r.b_prime(k), 1.0 + 1e-12);
  }
  if (r.mode != "trivial") EXPECT_LE(r.err_B, 2.0 / r.n_cut + r.Delta / 2 + 1e-9);
}

}  // namespace

TEST(Mode, ParseRoundTrip) {
  for (const char* s : {"auto", "block", "tridiag"}) EXPECT_EQ(to_string(parse_mode(s)), s);
  EXPECT_THROW(parse_mode("fast"), InvalidParameter);
}

TEST(Intervals, EightBlocksTwoCuts) {
  const BlockPartition p = eight_blocks();
  ASSERT_EQ(p.num_blocks(), 8);
  const IntervalScheme s = make_intervals(p, 2);
  EXPECT_EQ(s.first_block, (std::vector<Index>{0, 4}));
  EXPECT_EQ(s.last_block, (std::vector<Index>{3, 7}));
  EXPECT_EQ(s.col_begin, (std::vector<Index>{0, 8}));
  EXPECT_EQ(s.col_size, (std::vector<Index>{8, 8}));
  EXPECT_THROW(make_intervals(p, 0), InvalidParameter);
}

TEST(Intervals, EmptyIntervalsAndClamping) {
  RVector b(4);
  b << -1.0, -0.95, 0.9, 1.0;
  const BlockPartition p = construct_X(HermitianMatrix::diagonal(b), 0.05).partition;
  const IntervalScheme s = make_intervals(p, 4);
  EXPECT_EQ(s.col_size[0], 2);
  EXPECT_EQ(s.col_size[1], 0);
  EXPECT_EQ(s.col_size[2], 0);
  EXPECT_EQ(s.col_size[3], 2);  // 1.0 closes the last interval
}

TEST(NewBasis, SingleCut) {
  const BlockPartition p = eight_blocks();
  const IntervalScheme s = make_intervals(p, 1);
  const SubspaceFrame w = SubspaceFrame::coordinate(16, 0, 5);
  const NewBasis nb = assemble_new_basis(s, {w}, 16);
  EXPECT_EQ(nb.block_size, (std::vector<Index>{5, 11}));
}

TEST(NewBasis, FullWShiftsIntervals) {
  const BlockPartition p = eight_blocks();
  const IntervalScheme s = make_intervals(p, 2);
  const NewBasis nb = assemble_new_basis(s, {SubspaceFrame::full(8), SubspaceFrame::full(8)}, 16);
  // Block 0 = W_1 = B_1, block 1 = W_2 + 0, block 2 = W_2^perp = 0.
  EXPECT_EQ(nb.block_size, (std::vector<Index>{8, 8, 0}));
  EXPECT_LE((nb.V - CMatrix::Identity(16, 16)).norm(), 1e-15);
}

TEST(NewBasis, ThreeBlocksForTwoCuts) {
  const BlockPartition p = eight_blocks();
  const IntervalScheme s = make_intervals(p, 2);
  const NewBasis nb = assemble_new_basis(s, {SubspaceFrame::coordinate(8, 0, 3), SubspaceFrame::coordinate(8, 0, 2)}, 16);
  ASSERT_EQ(nb.block_size.size(), 3u);
  // W_1 | W_2 + W_1^perp | W_2^perp
  EXPECT_EQ(nb.block_size, (std::vector<Index>{3, 2 + 5, 6}));
}

TEST(NewBasis, MismatchedFrames) {
  const BlockPartition p = eight_blocks();
  const IntervalScheme s = make_intervals(p, 2);
  EXPECT_THROW(assemble_new_basis(s, {SubspaceFrame::full(8)}, 16), InvalidParameter);
  EXPECT_THROW(assemble_new_basis(s, {SubspaceFrame::full(7), SubspaceFrame::full(8)}, 16), InvalidParameter);
}

TEST(Finalize, BlockDiagonalHasNoOffDiagonal) {
  RVector a(4), b(4);
  a << 0.1, -0.3, 0.6, 0.2;
  b << -0.9, -0.8, 0.5, 0.95;
  const HermitianMatrix A = HermitianMatrix::diagonal(a), B = HermitianMatrix::diagonal(b);
  NewBasis nb;
  nb.V = CMatrix::Identity(4, 4);
  nb.block_begin = {0, 2, 4};
  nb.block_size = {2, 2, 0};
  const CommutingPairResult r = finalize(A, B, CMatrix::Identity(4, 4), A.entries(), nb, block_identity_values(2));
  EXPECT_EQ(r.offdiag_norm, 0.0);
  EXPECT_LE(r.err_A, 1e-15);
  EXPECT_LE(r.commutator_residual, 1e-15);
  EXPECT_NEAR(r.err_B, 0.95, 1e-15);  // 0.5 and 0.95 both sent to 0
}

TEST(Solve, CommutingInputs) {
  RVector a(6), b(6);
  a << 0.3, -0.1, 0.7, 0.2, -0.8, 0.0;
  b << -0.5, -0.49, 0.1, 0.33, 0.8, 0.81;
  const HermitianMatrix A = HermitianMatrix::diagonal(a), B = HermitianMatrix::diagonal(b);
  const CommutingPairResult r = solve(A, B);
  EXPECT_EQ(r.mode, "trivial");
  EXPECT_LE(r.err_A, 1e-10);
  EXPECT_LE(r.err_B, r.Delta / 2 + 1e-12);
  EXPECT_LE(r.commutator_residual, 1e-14);
  expect_result_invariants(r, A);
}

TEST(Solve, ForcedTridiagOnBlockInstance) {
  const Instance in = random_pair(16, 2);
  SolveOptions o;
  o.mode = Mode::Tridiag;
  EXPECT_THROW(solve(in.A(), in.B(), o), ModeMismatch);
}

TEST(Solve, InputValidation) {
  EXPECT_THROW(solve(HermitianMatrix::zero(3), HermitianMatrix::zero(4)), InvalidMatrix);
  SolveOptions o;
  o.delta_floor = 0.0;
  EXPECT_THROW(solve(HermitianMatrix::zero(3), HermitianMatrix::zero(3), o), InvalidParameter);
}

TEST(Solve, UniformChain256OffDiagonalPrediction) {
  const Instance in = uniform_chain(256);
  const CommutingPairResult r = solve(in.A(), in.B());
  EXPECT_EQ(r.mode, "tridiag");
  EXPECT_EQ(r.n_cut, 17);
  EXPECT_LE(r.offdiag_norm, r.predicted_offdiag + 1e-9);
  EXPECT_LE(r.err_A, r.err_H + r.offdiag_norm + 1e-9);
  expect_result_invariants(r, in.A());
}

TEST(Solve, UniformChain512) {
  const Instance in = uniform_chain(512);
  const CommutingPairResult r = solve(in.A(), in.B());
  EXPECT_LE(r.err_A, 1.0);
  EXPECT_LE(r.err_B, 1.0);
  EXPECT_LE(r.commutator_residual, 1e-10);
  expect_result_invariants(r, in.A());
}

TEST(Solve, SpinPair20BlockMode) {
  const Instance in = spin_pair(20);
  SolveOptions o;
  o.mode = Mode::Block;
  const CommutingPairResult r = solve(in.A(), in.B(), o);
  EXPECT_EQ(r.mode, "block");
  EXPECT_LE(r.commutator_residual, 1e-10);
  EXPECT_NEAR(r.delta, 1.0 / 20, 1e-12);
  for (const SubspaceAudit& a : r.intervals)
    if (a.method == "block") EXPECT_LE(a.max_window_residual, a.kappa + 1e-10);
  expect_result_invariants(r, in.A());
}

TEST(Solve, RandomPairsInvariants) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Instance in = random_pair(40, seed, 0.05, 4);
    const CommutingPairResult r = solve(in.A(), in.B());
    EXPECT_EQ(r.mode, "block");
    expect_result_invariants(r, in.A());
    // a' lies in the spectral range of H widened by the off-diagonal norm.
    const ReductionOutput red = reduce(in.A(), in.B(), r.Delta);
    const RVector& hv = red.H.spectrum().values;
    for (Index k = 0; k < r.a_prime.size(); ++k) {
      EXPECT_GE(r.a_prime(k), hv(0) - r.offdiag_norm - 1e-10);
      EXPECT_LE(r.a_prime(k), hv(hv.size() - 1) + r.offdiag_norm + 1e-10);
    }
  }
}

TEST(Solve, SmallRandomPairs) {
  // some of these produce an interval whose first block is empty
  for (Index dim : {4, 6, 8, 10, 16})
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const Instance in = random_pair(dim, seed);
      const CommutingPairResult r = solve(in.A(), in.B());
      expect_result_invariants(r, in.A());
    }
}

TEST(Solve, ThreadCountDoesNotChangeResult) {
  const Instance in = random_block_tridiag(12, 4, 5);
  SolveOptions o1, o4;
  o1.threads = 1;
  o4.threads = 4;
  const CommutingPairResult r1 = solve(in.A(), in.B(), o1), r4 = solve(in.A(), in.B(), o4);
  EXPECT_EQ(r1.a_prime, r4.a_prime);
  EXPECT_EQ(r1.b_prime, r4.b_prime);
  EXPECT_EQ(r1.V, r4.V);
}

TEST(Solve, RescalesLargeInputs) {
  const Instance in = random_pair(12, 9);
  const HermitianMatrix A3(CMatrix(3.0 * in.A().entries())), B3(CMatrix(2.0 * in.B().entries()));
  const CommutingPairResult r = solve(A3, B3);
  EXPECT_NEAR(r.scale_factor, 3.0 * op_norm(in.A()), 1e-12);
  for (Index k = 0; k < r.b_prime.size(); ++k) EXPECT_LE(std::abs(r.b_prime(k)), 1.0 + 1e-12);
}

TEST(Solve, OverridesRespected) {
  const Instance in = random_pair(24, 4);
  SolveOptions o;
  o.Delta_override = 0.1;
  o.n_cut_override = 3;
  const CommutingPairResult r = solve(in.A(), in.B(), o);
  EXPECT_DOUBLE_EQ(r.Delta, 0.1);
  EXPECT_EQ(r.n_cut, 3);
  EXPECT_EQ(r.new_block_dims.size(), 4u);
  expect_result_invariants(r, in.A());
}
