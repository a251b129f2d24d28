#include "cpair/assembly.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "cpair/block_subspace.hpp"
#include "cpair/errors.hpp"
#include "cpair/parallel.hpp"
#include "cpair/tridiag_subspace.hpp"

namespace cpair {

namespace {

constexpr double kTrivialDelta = 1e-14;

int clamp_n_cut(double raw, Index dim) {
  const double c = std::ceil(raw - 1e-12);
  return static_cast<int>(std::clamp(c, 1.0, static_cast<double>(dim)));
}

CMatrix from_diagonal(const CMatrix& V, const RVector& d) {
  return V * d.cast<cplx>().asDiagonal() * V.adjoint();
}

}  // namespace

Mode parse_mode(const std::string& s) {
  if (s == "auto") return Mode::Auto;
  if (s == "block") return Mode::Block;
  if (s == "tridiag") return Mode::Tridiag;
  throw InvalidParameter("unknown mode '" + s + "' (expected auto, block or tridiag)");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Auto: return "auto";
    case Mode::Block: return "block";
    case Mode::Tridiag: return "tridiag";
  }
  return "auto";
}

CMatrix CommutingPairResult::A_prime() const { return from_diagonal(V, a_prime); }
CMatrix CommutingPairResult::B_prime() const { return from_diagonal(V, b_prime); }

IntervalScheme make_intervals(const BlockPartition& p, int n_cut) {
  if (n_cut < 1) throw InvalidParameter("n_cut must be >= 1");
  IntervalScheme s;
  s.n_cut = n_cut;
  s.first_block.assign(static_cast<std::size_t>(n_cut), -1);
  s.last_block.assign(static_cast<std::size_t>(n_cut), -1);
  for (Index b = 0; b < p.num_blocks(); ++b) {
    const double v = p.block_values[static_cast<std::size_t>(b)];
    const int i = std::clamp(static_cast<int>(std::floor((v + 1.0) * n_cut / 2.0)), 0, n_cut - 1);
    const auto ui = static_cast<std::size_t>(i);
    if (s.first_block[ui] < 0) s.first_block[ui] = b;
    s.last_block[ui] = b;
  }
  Index at = 0;
  for (int i = 0; i < n_cut; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    Index size = 0;
    if (s.first_block[ui] >= 0) {
      const auto f = static_cast<std::size_t>(s.first_block[ui]);
      const auto l = static_cast<std::size_t>(s.last_block[ui]);
      at = p.block_begin[f];
      size = p.block_begin[l] + p.block_size[l] - at;
    }
    s.col_begin.push_back(at);
    s.col_size.push_back(size);
    at += size;
  }
  return s;
}

NewBasis assemble_new_basis(const IntervalScheme& scheme, const std::vector<SubspaceFrame>& W,
                            Index dim) {
  const int n = scheme.n_cut;
  if (static_cast<int>(W.size()) != n) throw InvalidParameter("one W frame per interval expected");
  std::vector<CMatrix> w(static_cast<std::size_t>(n)), wp(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Index b = scheme.col_begin[ui], sz = scheme.col_size[ui];
    if (W[ui].ambient_dim() != sz) throw InvalidParameter("W frame does not match interval size");
    w[ui] = CMatrix::Zero(dim, W[ui].rank());
    wp[ui] = CMatrix::Zero(dim, sz - W[ui].rank());
    if (sz == 0) continue;
    w[ui].middleRows(b, sz) = W[ui].columns();
    const SubspaceFrame perp = orthogonal_complement(W[ui]);
    if (perp.rank() > 0) wp[ui].middleRows(b, sz) = perp.columns();
  }
  NewBasis nb;
  nb.V.resize(dim, dim);
  Index at = 0;
  auto push = [&](const CMatrix& m) {
    if (at + m.cols() > dim) throw AssemblyRankError("new basis has more columns than the dimension");
    nb.V.middleCols(at, m.cols()) = m;
    at += m.cols();
  };
  for (int k = 0; k <= n; ++k) {
    nb.block_begin.push_back(at);
    if (k < n) push(w[static_cast<std::size_t>(k)]);
    if (k > 0) push(wp[static_cast<std::size_t>(k - 1)]);
    nb.block_size.push_back(at - nb.block_begin.back());
  }
  if (at != dim) throw AssemblyRankError("new basis spans " + std::to_string(at) + " of " + std::to_string(dim) + " dimensions");
  const double dev = (nb.V.adjoint() * nb.V - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (dev > 1e-8) throw AssemblyRankError("new basis is not orthonormal (deviation " + std::to_string(dev) + ")");
  return nb;
}

std::vector<double> block_identity_values(int n_cut) {
  std::vector<double> v;
  for (int k = 0; k <= n_cut; ++k) v.push_back(-1.0 + 2.0 * k / n_cut);
  return v;
}

CommutingPairResult finalize(const HermitianMatrix& A, const HermitianMatrix& B,
                             const CMatrix& U, const CMatrix& H_X, const NewBasis& basis,
                             const std::vector<double>& block_values) {
  const Index dim = H_X.rows();
  if (block_values.size() != basis.block_size.size())
    throw InvalidParameter("one B' value per new block expected");
  CMatrix hn = basis.V.adjoint() * H_X * basis.V;
  hn = (0.5 * (hn + hn.adjoint())).eval();
  CMatrix off = hn;
  CMatrix rot = CMatrix::Zero(dim, dim);
  CommutingPairResult r;
  r.a_prime.resize(dim);
  r.b_prime.resize(dim);
  for (std::size_t k = 0; k < basis.block_size.size(); ++k) {
    const Index b = basis.block_begin[k], s = basis.block_size[k];
    r.new_block_dims.push_back(s);
    if (s == 0) continue;
    off.block(b, b, s, s).setZero();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hn.block(b, b, s, s));
    rot.block(b, b, s, s) = es.eigenvectors();
    r.a_prime.segment(b, s) = es.eigenvalues();
    r.b_prime.segment(b, s).setConstant(block_values[k]);
  }
  r.offdiag_norm = hermitian_norm(off);
  r.V = U * (basis.V * rot);
  const CMatrix ap = r.A_prime(), bp = r.B_prime();
  r.err_A = hermitian_norm(A.entries() - ap);
  r.err_B = hermitian_norm(B.entries() - bp);
  r.commutator_residual = commutator_norm(ap, bp);
  return r;
}

namespace {

CommutingPairResult solve_trivial(const HermitianMatrix& a, const HermitianMatrix& b, double delta,
                                  double Delta) {
  GridRounding g = construct_X(b, Delta);
  const BlockPartition& p = g.partition;
  const CMatrix& U = p.unitary_to_X_basis;
  NewBasis nb;
  nb.V = CMatrix::Identity(p.dim(), p.dim());
  nb.block_begin = p.block_begin;
  nb.block_size = p.block_size;
  CommutingPairResult r = finalize(a, b, U, CMatrix(U.adjoint() * a.entries() * U), nb, p.block_values);
  r.mode = "trivial";
  r.delta = delta;
  r.Delta = Delta;
  r.n_cut = static_cast<int>(p.num_blocks()) - 1;
  r.err_X = hermitian_norm(g.X.entries() - b.entries());
  r.h_norm = op_norm(a);
  return r;
}

}  // namespace

CommutingPairResult solve(const HermitianMatrix& A, const HermitianMatrix& B, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (A.dim() != B.dim()) throw InvalidMatrix("A and B have different dimensions");
  if (A.dim() == 0) throw InvalidMatrix("empty matrix");
  if (!(opts.delta_floor > 0.0) || opts.delta_floor > 1.0) throw InvalidParameter("delta floor must lie in (0, 1]");
  const Index dim = A.dim();

  const double scale = std::max(op_norm(A), op_norm(B));
  const bool rescale = scale > 1.0 + 1e-12;
  const HermitianMatrix a = rescale ? HermitianMatrix((1.0 / scale) * A.entries()) : A;
  const HermitianMatrix b = rescale ? HermitianMatrix((1.0 / scale) * B.entries()) : B;
  const double delta = commutator_norm(a, b);

  CommutingPairResult res;
  if (delta < kTrivialDelta) {
    const double Delta = opts.Delta_override > 0 ? opts.Delta_override : opts.delta_floor;
    res = solve_trivial(a, b, delta, Delta);
  } else {
    Mode mode = opts.mode;
    const bool tridiagonal = is_tridiagonal_pair(a, b);
    if (mode == Mode::Auto) mode = tridiagonal ? Mode::Tridiag : Mode::Block;
    if (mode == Mode::Tridiag && !tridiagonal)
      throw ModeMismatch("A is not tridiagonal in a nondegenerate eigenbasis of B; use block mode");

    // Tridiagonal pairs already have H = A and a grid just below the
    // smallest eigenvalue gap of B, so each X block is a single vector.
    double Delta = opts.Delta_override;
    if (!(Delta > 0))
      Delta = mode == Mode::Tridiag
                  ? std::clamp(min_eigenvalue_gap(b) * (1.0 - 1e-9), opts.delta_floor, 1.0)
                  : std::clamp(std::pow(delta, 0.8), opts.delta_floor, 1.0);
    const ReductionOutput red = mode == Mode::Tridiag ? reduce_tridiagonal(a, b, Delta) : reduce(a, b, Delta);
    const BlockPartition& p = red.partition;
    const CMatrix& hx = red.H_in_X_basis;
    const double hnorm = hermitian_norm(hx);
    if (mode == Mode::Tridiag && tridiagonal_defect(hx) > 1e-12 * std::max(1.0, hnorm))
      throw ModeMismatch("H is not tridiagonal in the X basis; use block mode");

    const int n_cut = opts.n_cut_override > 0
                          ? std::min<int>(opts.n_cut_override, static_cast<int>(dim))
                          : clamp_n_cut(mode == Mode::Tridiag ? std::pow(Delta, -0.5) : std::pow(Delta, -0.25), dim);
    IntervalScheme scheme = make_intervals(p, n_cut);
    scheme.L = static_cast<int>(std::floor(2.0 / (n_cut * Delta) - 1.0 + 1e-12));

    auto one = [&](std::size_t i) -> SubspaceResult {
      const Index cb = scheme.col_begin[i], sz = scheme.col_size[i];
      if (sz == 0) return fallback_subspace(HermitianMatrix(CMatrix(0, 0)), 0, 0);
      const HermitianMatrix J(CMatrix(hx.block(cb, cb, sz, sz)));
      const Index v1 = p.block_size[static_cast<std::size_t>(scheme.first_block[i])];
      const Index vL = p.block_size[static_cast<std::size_t>(scheme.last_block[i])];
      try {
        if (mode == Mode::Tridiag) return build_W_tridiag(J, opts.subspace);
        return build_W(J, v1, vL, scheme.L, opts.subspace);
      } catch (const IntervalTooSmall&) {
        return mode == Mode::Tridiag ? fallback_subspace(J, 1, 1) : fallback_subspace(J, v1, vL);
      }
    };
    std::vector<SubspaceResult> parts = parallel_map(static_cast<std::size_t>(n_cut), one, opts.threads);

    std::vector<SubspaceFrame> W;
    for (SubspaceResult& o : parts) {
      W.push_back(o.W);
      res.intervals.push_back(o.audit);
    }
    const NewBasis nb = assemble_new_basis(scheme, W, dim);
    CommutingPairResult fin = finalize(a, b, p.unitary_to_X_basis, hx, nb, block_identity_values(n_cut));
    fin.intervals = std::move(res.intervals);
    res = std::move(fin);
    res.mode = to_string(mode);
    res.delta = delta;
    res.Delta = Delta;
    res.n_cut = n_cut;
    res.L = scheme.L;
    res.err_H = red.err_H;
    res.err_X = red.err_X;
    res.h_norm = hnorm;
    for (const SubspaceAudit& au : res.intervals) {
      res.max_eps3 = std::max(res.max_eps3, au.eps3);
      res.max_eps4 = std::max(res.max_eps4, au.eps4);
      res.max_eps5 = std::max(res.max_eps5, au.eps5);
    }
    res.predicted_offdiag = 2.0 * (res.max_eps3 + res.max_eps4 + res.max_eps5) * std::max(1.0, hnorm);
  }
  res.scale_factor = rescale ? scale : 1.0;
  res.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace cpair
