#include "cpair/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cpair/errors.hpp"
#include "cpair/filters.hpp"

namespace cpair {

namespace {

void require_positive_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw InvalidParameter("grid spacing Delta must be positive, got " + std::to_string(delta));
}

void require_same_dim(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidMatrix("A and B have different dimensions");
  if (a.dim() == 0) throw InvalidMatrix("empty matrix");
}

BlockPartition partition_from_spectrum(const Spectrum& sb, double delta) {
  BlockPartition p;
  p.delta = delta;
  p.unitary_to_X_basis = sb.vectors;
  p.b_values = sb.values;
  const Index n = sb.values.size();
  std::vector<long> k(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) k[static_cast<std::size_t>(j)] = grid_round_index(sb.values(j), delta);
  const long kmin = k.front();
  const long kmax = k.back();
  Index at = 0;
  for (long g = kmin; g <= kmax; ++g) {
    Index count = 0;
    while (at + count < n && k[static_cast<std::size_t>(at + count)] == g) ++count;
    p.grid_index.push_back(g);
    p.block_values.push_back(static_cast<double>(g) * delta);
    p.block_begin.push_back(at);
    p.block_size.push_back(count);
    at += count;
  }
  return p;
}

CMatrix projector_columns(const BlockPartition& p, const std::vector<Index>& blocks) {
  Index total = 0;
  for (Index b : blocks) {
    if (b < 0 || b >= p.num_blocks()) throw InvalidParameter("block index out of range");
    total += p.block_size[static_cast<std::size_t>(b)];
  }
  CMatrix cols(p.dim(), total);
  Index at = 0;
  for (Index b : blocks) {
    const Index s = p.block_size[static_cast<std::size_t>(b)];
    cols.middleCols(at, s) = p.unitary_to_X_basis.middleCols(p.block_begin[static_cast<std::size_t>(b)], s);
    at += s;
  }
  return cols;
}

CMatrix evolve(const HermitianMatrix& H, const CMatrix& x, double t) {
  if (t == 0.0) return x;
  const Spectrum& s = H.spectrum();
  CMatrix y = s.vectors.adjoint() * x;
  for (Index k = 0; k < y.rows(); ++k) y.row(k) *= std::exp(cplx(0.0, -s.values(k) * t));
  return s.vectors * y;
}

}  // namespace

Index BlockPartition::block_of(Index col) const {
  auto it = std::upper_bound(block_begin.begin(), block_begin.end(), col);
  Index b = static_cast<Index>(it - block_begin.begin()) - 1;
  // Skip empty blocks sharing the same begin.
  while (b > 0 && block_size[static_cast<std::size_t>(b)] == 0) --b;
  return b;
}

SubspaceFrame BlockPartition::block_frame(Index first, Index last) const {
  if (first > last) return SubspaceFrame(dim());
  const Index begin = block_begin[static_cast<std::size_t>(first)];
  const Index end = block_begin[static_cast<std::size_t>(last)] + block_size[static_cast<std::size_t>(last)];
  return SubspaceFrame::from_orthonormal(unitary_to_X_basis.middleCols(begin, end - begin));
}

long grid_round_index(double x, double delta) {
  require_positive_delta(delta);
  return static_cast<long>(std::floor(x / delta + 0.5));
}

double grid_round(double x, double delta) {
  return static_cast<double>(grid_round_index(x, delta)) * delta;
}

CMatrix construct_H_in_B_basis(const HermitianMatrix& A, const HermitianMatrix& B, double delta) {
  require_positive_delta(delta);
  require_same_dim(A, B);
  const Spectrum& sb = B.spectrum();
  CMatrix h = sb.vectors.adjoint() * A.entries() * sb.vectors;
  const Index n = h.rows();
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r) h(r, c) *= poly_filter((sb.values(r) - sb.values(c)) / delta);
  return 0.5 * (h + h.adjoint());
}

HermitianMatrix construct_H(const HermitianMatrix& A, const HermitianMatrix& B, double delta) {
  const CMatrix hb = construct_H_in_B_basis(A, B, delta);
  const CMatrix& v = B.spectrum().vectors;
  return HermitianMatrix(v * hb * v.adjoint());
}

SmoothingCheck check_smoothing(const HermitianMatrix& A, const HermitianMatrix& B,
                         const HermitianMatrix& H, double delta) {
  require_positive_delta(delta);
  SmoothingCheck c;
  c.commutator_AB = commutator_norm(A, B);
  c.commutator_HB = commutator_norm(H, B);
  const Spectrum& sb = B.spectrum();
  const CMatrix hb = sb.vectors.adjoint() * H.entries() * sb.vectors;
  for (Index col = 0; col < hb.cols(); ++col)
    for (Index r = 0; r < hb.rows(); ++r)
      if (std::abs(sb.values(r) - sb.values(col)) >= delta)
        c.max_off_range = std::max(c.max_off_range, std::abs(hb(r, col)));
  c.err_H = op_norm(CMatrix(H.entries() - A.entries()));
  c.bound = compute_c0().value * c.commutator_AB / delta;
  c.commutator_ok = c.commutator_HB <= c.commutator_AB + 1e-10;
  c.range_ok = c.max_off_range <= 1e-10;
  c.bound_ok = c.err_H <= c.bound + 1e-9;
  return c;
}

GridRounding construct_X(const HermitianMatrix& B, double delta) {
  require_positive_delta(delta);
  if (B.dim() == 0) throw InvalidMatrix("empty matrix");
  const Spectrum& sb = B.spectrum();
  GridRounding g;
  g.partition = partition_from_spectrum(sb, delta);
  RVector xv(sb.values.size());
  for (Index j = 0; j < xv.size(); ++j) xv(j) = grid_round(sb.values(j), delta);
  g.X = HermitianMatrix::from_spectrum(xv, sb.vectors);
  return g;
}

ReductionOutput reduce(const HermitianMatrix& A, const HermitianMatrix& B, double delta) {
  ReductionOutput out;
  GridRounding g = construct_X(B, delta);
  out.X = g.X;
  out.partition = std::move(g.partition);
  out.H_in_X_basis = construct_H_in_B_basis(A, B, delta);
  const CMatrix& v = out.partition.unitary_to_X_basis;
  out.H = HermitianMatrix(v * out.H_in_X_basis * v.adjoint());
  out.delta = delta;
  out.err_H = op_norm(CMatrix(out.H.entries() - A.entries()));
  out.err_X = hermitian_norm(out.X.entries() - B.entries());
  return out;
}

ReductionOutput reduce_tridiagonal(const HermitianMatrix& A, const HermitianMatrix& B, double delta) {
  require_same_dim(A, B);
  ReductionOutput out;
  GridRounding g = construct_X(B, delta);
  out.X = g.X;
  out.partition = std::move(g.partition);
  const CMatrix& v = out.partition.unitary_to_X_basis;
  const CMatrix h = v.adjoint() * A.entries() * v;
  out.H_in_X_basis = 0.5 * (h + h.adjoint());
  out.H = A;
  out.delta = delta;
  out.err_H = 0.0;
  out.err_X = hermitian_norm(out.X.entries() - B.entries());
  return out;
}

double min_eigenvalue_gap(const HermitianMatrix& B) {
  const RVector& x = B.spectrum().values;
  double gap = std::numeric_limits<double>::infinity();
  for (Index j = 0; j + 1 < x.size(); ++j) gap = std::min(gap, x(j + 1) - x(j));
  return gap;
}

bool is_tridiagonal_pair(const HermitianMatrix& A, const HermitianMatrix& B) {
  require_same_dim(A, B);
  if (!(min_eigenvalue_gap(B) > 1e-12)) return false;
  const CMatrix& v = B.spectrum().vectors;
  const CMatrix h = v.adjoint() * A.entries() * v;
  const double tol = 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff());
  for (Index c = 0; c < h.cols(); ++c)
    for (Index r = 0; r < h.rows(); ++r)
      if (std::abs(r - c) > 1 && std::abs(h(r, c)) > tol) return false;
  return true;
}

double block_distance(const BlockPartition& p, const std::vector<Index>& s1,
                      const std::vector<Index>& s2) {
  double d = std::numeric_limits<double>::infinity();
  for (Index a : s1)
    for (Index b : s2)
      d = std::min(d, std::abs(p.block_values[static_cast<std::size_t>(a)] -
                               p.block_values[static_cast<std::size_t>(b)]));
  return d;
}

double lr_leakage(const HermitianMatrix& H, const BlockPartition& p, const CVector& v,
                  const std::vector<Index>& s1, const std::vector<Index>& s2, double t) {
  if (v.size() != p.dim() || H.dim() != p.dim()) throw InvalidParameter("dimension mismatch");
  const CMatrix p1 = projector_columns(p, s1);
  const double vn = v.norm();
  const double outside = (v - p1 * (p1.adjoint() * v)).norm();
  if (outside > 1e-10 * std::max(vn, 1e-300))
    throw InvalidSupport("vector has weight " + std::to_string(outside) + " outside S1");
  if (s2.empty() || vn == 0.0) return 0.0;
  const CMatrix p2 = projector_columns(p, s2);
  const CMatrix w = evolve(H, v, t);
  return (p2.adjoint() * w).norm();
}

double lr_leakage_norm(const HermitianMatrix& H, const BlockPartition& p,
                       const std::vector<Index>& s1, const std::vector<Index>& s2, double t) {
  if (H.dim() != p.dim()) throw InvalidParameter("dimension mismatch");
  const CMatrix p1 = projector_columns(p, s1);
  const CMatrix p2 = projector_columns(p, s2);
  if (p1.cols() == 0 || p2.cols() == 0) return 0.0;
  return op_norm(CMatrix(p2.adjoint() * evolve(H, p1, t)));
}

double lr_bound(double dist, double range) { return std::exp(-dist / range); }

double lr_time_limit(double dist, double range) {
  return dist / (std::numbers::e * std::numbers::e * range);
}

}  // namespace cpair
