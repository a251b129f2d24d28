#include "cpair/block_subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cpair/errors.hpp"
#include "cpair/filters.hpp"

namespace cpair {

namespace {

CMatrix select_columns(const CMatrix& m, const std::vector<Index>& cols) {
  CMatrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = m.col(cols[k]);
  return out;
}

CMatrix concat(const std::vector<const SubspaceFrame*>& frames, Index rows) {
  Index cols = 0;
  for (const SubspaceFrame* f : frames) cols += f->rank();
  CMatrix out(rows, cols);
  Index at = 0;
  for (const SubspaceFrame* f : frames) {
    if (f->rank() == 0) continue;
    out.middleCols(at, f->rank()) = f->columns();
    at += f->rank();
  }
  return out;
}

double max_eig(const CMatrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double min_eig(const CMatrix& h) {
  if (h.rows() == 0) return std::numeric_limits<double>::quiet_NaN();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

WindowFamily build_windows(const HermitianMatrix& J, const SubspaceFrame& S, int L,
                           const SubspaceParams& params) {
  if (L < 4) throw IntervalTooSmall("interval has L = " + std::to_string(L) + " < 4 blocks");
  if (S.ambient_dim() != J.dim()) throw InvalidParameter("build_windows: frame dimension mismatch");
  WindowFamily w;
  w.n_win = choose_n_win(L, params);
  w.lambda_min = 1.0 / (w.n_win * static_cast<double>(L) * L);
  w.half_range = std::max(1.0, op_norm(J));
  const WindowGrid grid(w.n_win, w.half_range);
  w.kappa = grid.kappa();
  const Spectrum& s = J.spectrum();
  for (int i = 0; i < w.n_win; ++i) {
    RVector gv(s.values.size());
    for (Index k = 0; k < gv.size(); ++k) gv(k) = grid.value(i, s.values(k));
    CMatrix tau = spectral_apply(s, gv, S.columns());
    const CMatrix g = tau.adjoint() * tau;
    // empty first block: Eigen's solver does not accept 0 x 0 input
    Eigen::SelfAdjointEigenSolver<CMatrix> es;
    if (g.rows() > 0) es.compute(g);
    std::vector<Index> keep;
    for (Index a = 0; a < g.rows(); ++a)
      if (es.eigenvalues()(a) >= w.lambda_min) keep.push_back(a);
    RVector vals(static_cast<Index>(keep.size()));
    CMatrix vecs(g.rows(), static_cast<Index>(keep.size()));
    CMatrix y(J.dim(), static_cast<Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      const Index a = keep[k];
      const Index kk = static_cast<Index>(k);
      vals(kk) = es.eigenvalues()(a);
      vecs.col(kk) = es.eigenvectors().col(a);
      y.col(kk) = tau * vecs.col(kk) / std::sqrt(vals(kk));
    }
    w.frames.push_back(orthonormalize(y));
    w.retained.push_back(vals);
    w.retained_vectors.push_back(vecs);
    w.tau.push_back(std::move(tau));
  }
  return w;
}

std::vector<Index> GramSystem::columns_of_windows(int first, int last) const {
  std::vector<Index> cols;
  first = std::max(first, 0);
  last = std::min(last, n_win - 1);
  for (int i = first; i <= last; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (Index c = 0; c < block_dims[ui]; ++c) cols.push_back(block_offsets[ui] + c);
  }
  return cols;
}

std::vector<Index> GramSystem::superblock_columns(int i) const {
  if (i < 0 || i >= n_sb) return {};
  return columns_of_windows(i * l_b, (i + 1) * l_b - 1);
}

std::vector<Index> GramSystem::centered_columns(int i) const {
  // j >= (i - 1/2) l_b and j < (i + 1/2) l_b, with 2j compared to (2i -+ 1) l_b.
  int first = 0;
  while (2 * first < (2 * i - 1) * l_b) ++first;
  int last = first;
  while (2 * last < (2 * i + 1) * l_b) ++last;
  return columns_of_windows(first, last - 1);
}

GramSystem build_gram(const WindowFamily& windows) {
  GramSystem g;
  g.n_win = windows.n_win;
  const Index D = windows.frames.empty() ? 0 : windows.frames.front().ambient_dim();
  Index total = 0;
  for (const SubspaceFrame& f : windows.frames) {
    g.block_offsets.push_back(total);
    g.block_dims.push_back(f.rank());
    total += f.rank();
  }
  g.frame_map.resize(D, total);
  for (std::size_t i = 0; i < windows.frames.size(); ++i)
    if (g.block_dims[i] > 0) g.frame_map.middleCols(g.block_offsets[i], g.block_dims[i]) = windows.frames[i].columns();
  g.rho = HermitianMatrix(CMatrix(g.frame_map.adjoint() * g.frame_map));
  g.l_b = std::max(1, static_cast<int>(std::floor(std::cbrt(static_cast<double>(g.n_win)) + 1e-12)));
  g.n_sb = (g.n_win + g.l_b - 1) / g.l_b;
  g.n_sb += g.n_sb % 2;
  return g;
}

double near_kernel_G(int l_b, const SubspaceParams& params) {
  return params.g_scale * std::pow(std::log(l_b + std::numbers::e), params.g_exponent);
}

double near_kernel_lambda0(int l_b, const SubspaceParams& params) {
  return std::exp(-params.lambda0_scale * std::sqrt(static_cast<double>(l_b)));
}

CMatrix near_kernel_operator(const GramSystem& g, double G) {
  if (g.dim_R() == 0) return CMatrix(0, 0);
  const double r = G / g.l_b;
  const FilterSpec spec{0.0, r, r};
  const Spectrum& s = g.rho.spectrum();
  RVector gv(s.values.size());
  for (Index k = 0; k < gv.size(); ++k) gv(k) = smooth_filter(spec, std::sqrt(std::max(0.0, s.values(k))));
  return spectral_matrix(s, gv);
}

std::vector<SubspaceFrame> build_near_kernel_spaces(const GramSystem& g, double G, double lambda0) {
  const Index R = g.dim_R();
  std::vector<SubspaceFrame> out;
  if (R == 0) {
    out.assign(static_cast<std::size_t>(g.n_sb), SubspaceFrame(0));
    return out;
  }
  const CMatrix O0 = near_kernel_operator(g, G);
  const CMatrix O0sq = O0 * O0;
  for (int i = 0; i < g.n_sb; ++i) {
    const std::vector<Index> a = g.centered_columns(i);
    if (a.empty()) {
      out.emplace_back(R);
      continue;
    }
    CMatrix c(static_cast<Index>(a.size()), static_cast<Index>(a.size()));
    for (std::size_t r = 0; r < a.size(); ++r)
      for (std::size_t k = 0; k < a.size(); ++k) c(static_cast<Index>(r), static_cast<Index>(k)) = O0sq(a[r], a[k]);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
    std::vector<Index> sel = g.superblock_columns(i - 1);
    const std::vector<Index> cur = g.superblock_columns(i);
    sel.insert(sel.end(), cur.begin(), cur.end());
    std::vector<CVector> vecs;
    for (Index k = 0; k < c.rows(); ++k) {
      if (es.eigenvalues()(k) < lambda0) continue;
      CVector x = CVector::Zero(R);
      for (std::size_t r = 0; r < a.size(); ++r) x(a[r]) = es.eigenvectors()(static_cast<Index>(r), k);
      const CVector ox = O0 * x;
      CVector y = CVector::Zero(R);
      for (Index idx : sel) y(idx) = ox(idx);
      vecs.push_back(y);
    }
    CMatrix m(R, static_cast<Index>(vecs.size()));
    for (std::size_t k = 0; k < vecs.size(); ++k) m.col(static_cast<Index>(k)) = vecs[k];
    out.push_back(orthonormalize(m));
  }
  return out;
}

SubspaceFrame jordan_prune(const SubspaceFrame& N, const SubspaceFrame& Q, double eta) {
  if (!(eta > 0.0) || eta > 0.05) throw InvalidParameter("eta must lie in (0, 0.05]");
  if (N.empty()) return N;
  if (Q.empty()) return N;
  const CMatrix qn = Q.columns().adjoint() * N.columns();
  const CMatrix c = qn.adjoint() * qn;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(c);
  std::vector<Index> keep;
  for (Index k = 0; k < c.rows(); ++k)
    if (es.eigenvalues()(k) <= 0.5 + eta) keep.push_back(k);
  CMatrix v = N.columns() * select_columns(es.eigenvectors(), keep);
  return orthonormalize(v);
}

SubspaceResult build_W(const HermitianMatrix& J, Index v1_dim, Index vL_dim, int L,
                       const SubspaceParams& params) {
  const Index D = J.dim();
  if (v1_dim < 0 || vL_dim < 0 || v1_dim > D || vL_dim > D)
    throw InvalidParameter("build_W: block dimensions out of range");
  SubspaceResult out;
  SubspaceAudit& au = out.audit;
  au.method = "block";
  au.dim = D;
  au.L = L;
  au.v1_dim = v1_dim;
  au.vL_dim = vL_dim;
  au.F_L = window_schedule(std::max(L, 1), params);
  au.eta = params.eta;

  const SubspaceFrame S = SubspaceFrame::coordinate(D, 0, v1_dim);
  const WindowFamily wf = build_windows(J, S, L, params);
  au.n_win = wf.n_win;
  au.kappa = wf.kappa;
  au.half_range = wf.half_range;
  au.lambda_min = wf.lambda_min;

  const CMatrix& je = J.entries();
  CMatrix chain = CMatrix::Zero(D, v1_dim);
  for (int i = 0; i < wf.n_win; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const SubspaceFrame& f = wf.frames[ui];
    au.x_dims.push_back(f.rank());
    if (f.rank() > 0) {
      const CMatrix r = je * f.columns() - WindowGrid(wf.n_win, wf.half_range).omega(i) * f.columns();
      au.max_window_residual = std::max(au.max_window_residual, op_norm(r));
    }
    const CMatrix& k = wf.retained_vectors[ui];
    if (k.cols() > 0) chain += wf.tau[ui] * (k * k.adjoint());
    for (int j = i + 2; j < wf.n_win; ++j) {
      const SubspaceFrame& h = wf.frames[static_cast<std::size_t>(j)];
      if (f.rank() > 0 && h.rank() > 0)
        au.window_orthogonality =
            std::max(au.window_orthogonality, (f.columns().adjoint() * h.columns()).cwiseAbs().maxCoeff());
    }
  }
  if (v1_dim > 0) {
    const double c = op_norm(CMatrix(CMatrix::Identity(D, v1_dim) - chain));
    au.chain_residual_sq = c * c;
  }

  const GramSystem g = build_gram(wf);
  au.l_b = g.l_b;
  au.n_sb = g.n_sb;
  au.G = near_kernel_G(g.l_b, params);
  au.lambda0 = near_kernel_lambda0(g.l_b, params);
  const Index R = g.dim_R();
  if (R == 0) {
    out.W = SubspaceFrame(D);
    au.min_eig_rho_U = std::numeric_limits<double>::quiet_NaN();
    measure_claims(je, out.W, v1_dim, vL_dim, au);
    return out;
  }
  au.rho_min_eig = g.rho.spectrum().values(0);
  au.rho_max_eig = g.rho.spectrum().values(R - 1);

  const std::vector<SubspaceFrame> N = build_near_kernel_spaces(g, au.G, au.lambda0);
  const CMatrix& rho = g.rho.entries();
  for (const SubspaceFrame& n : N) {
    au.n_dims.push_back(n.rank());
    if (n.rank() > 0)
      au.max_near_kernel_energy =
          std::max(au.max_near_kernel_energy, max_eig(n.columns().adjoint() * rho * n.columns()));
  }

  // Odd-i sweep in increasing i; N'_{-1} is empty and N_{n_sb} does not exist.
  std::vector<SubspaceFrame> Np(N.size(), SubspaceFrame(R));
  const SubspaceFrame none(R);
  for (int i = 1; i < g.n_sb; i += 2) {
    const auto ui = static_cast<std::size_t>(i);
    const SubspaceFrame& next = i + 1 < g.n_sb ? N[ui + 1] : none;
    const SubspaceFrame& prev = N[ui - 1];
    const SubspaceFrame& pprev = i >= 3 ? Np[ui - 2] : none;
    const SubspaceFrame Q = orthonormalize(concat({&next, &prev, &pprev}, R));
    Np[ui] = jordan_prune(N[ui], Q, params.eta);
  }
  std::vector<const SubspaceFrame*> perp;
  for (int i = 0; i < g.n_sb; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (i % 2 == 1) au.nprime_dims.push_back(Np[ui].rank());
    perp.push_back(i % 2 == 0 ? &N[ui] : &Np[ui]);
  }
  const SubspaceFrame Uperp = orthonormalize(concat(perp, R));
  const SubspaceFrame U = orthogonal_complement(Uperp);
  au.u_dim = U.rank();
  au.min_eig_rho_U = min_eig(U.columns().adjoint() * rho * U.columns());

  out.W = U.empty() ? SubspaceFrame(D) : orthonormalize(g.frame_map * U.columns());
  measure_claims(je, out.W, v1_dim, vL_dim, au);
  if (!out.W.empty()) {
    const CMatrix& w = out.W.columns();
    au.approx_ratio = op_norm(CMatrix(g.frame_map - w * (w.adjoint() * g.frame_map)));
  } else {
    au.approx_ratio = op_norm(g.frame_map);
  }
  return out;
}

}  // namespace cpair
