#include "cpair/tridiag_subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpair/errors.hpp"
#include "cpair/filters.hpp"

namespace cpair {

namespace {

// Coefficients of v_1 = e_0 in the eigenbasis of J.
CVector first_coordinate_coefficients(const Spectrum& s) {
  return s.vectors.row(0).adjoint();
}

CVector filtered_v1(const Spectrum& s, const CVector& c, const FilterSpec& spec) {
  CVector y = c;
  for (Index k = 0; k < y.size(); ++k) y(k) *= smooth_filter(spec, s.values(k));
  return s.vectors * y;
}

}  // namespace

double tridiagonal_defect(const CMatrix& J) {
  double worst = 0.0;
  for (Index c = 0; c < J.cols(); ++c)
    for (Index r = 0; r < J.rows(); ++r)
      if (std::abs(r - c) > 1) worst = std::max(worst, std::abs(J(r, c)));
  return worst;
}

std::vector<double> window_weights(const HermitianMatrix& J, int n_win, double half_range) {
  if (J.dim() == 0) throw InvalidMatrix("window_weights: empty matrix");
  const WindowGrid grid(n_win, half_range);
  const Spectrum& s = J.spectrum();
  const CVector c = first_coordinate_coefficients(s);
  std::vector<double> rho(static_cast<std::size_t>(n_win), 0.0);
  for (int i = 0; i < n_win; ++i) {
    double sum = 0.0;
    for (Index k = 0; k < c.size(); ++k) {
      const double f = grid.value(i, s.values(k));
      sum += f * f * std::norm(c(k));
    }
    rho[static_cast<std::size_t>(i)] = sum;
  }
  return rho;
}

MarkingState run_marking(const std::vector<double>& weights, double lambda_min) {
  MarkingState m;
  m.n_win = static_cast<int>(weights.size());
  m.lambda_min = lambda_min;
  m.weights = weights;
  m.labels.assign(weights.size(), 0);
  for (double w : weights)
    if (!std::isfinite(w) || w < 0.0) throw InvalidParameter("window weights must be finite and >= 0");
  const int n = m.n_win;
  if (n == 0) return m;

  int i = 0;
  int a = 1;
  double x = 0.0;
  auto rho = [&](int k) { return weights[static_cast<std::size_t>(k)]; };
  for (;;) {
    // step 2
    x = 0.0;
    bool done = false;
    while (rho(i) < lambda_min) {
      if (++i >= n) {
        done = true;
        break;
      }
    }
    if (done) break;
    // steps 3-4
    bool terminated = false;
    for (;;) {
      m.labels[static_cast<std::size_t>(i)] = a;
      x += rho(i);
      if (!(x < 9.0 * rho(i))) break;
      if (++i >= n) {
        terminated = true;
        break;
      }
    }
    if (terminated) break;
    // step 5
    ++a;
    if (++i >= n) break;
  }

  for (int k = 0; k < n; ++k) {
    const int label = m.labels[static_cast<std::size_t>(k)];
    if (label == 0) continue;
    if (!m.sequences.empty() && m.sequences.back().label == label)
      m.sequences.back().last = k;
    else
      m.sequences.push_back({label, k, k});
  }
  return m;
}

SubspaceResult build_W_tridiag(const HermitianMatrix& J, const SubspaceParams& params) {
  const Index D = J.dim();
  if (D < 4) throw IntervalTooSmall("tridiagonal interval of dimension " + std::to_string(D));
  const CMatrix& e = J.entries();
  const double jnorm = op_norm(J);
  if (tridiagonal_defect(e) > 1e-12 * std::max(1.0, jnorm))
    throw ModeMismatch("matrix is not tridiagonal");

  SubspaceResult out;
  SubspaceAudit& au = out.audit;
  au.method = "tridiag";
  au.dim = D;
  au.L = static_cast<int>(D);
  au.v1_dim = 1;
  au.vL_dim = 1;
  au.F_L = window_schedule(au.L, params);
  au.n_win = choose_n_win(au.L, params);
  au.half_range = std::max(1.0, jnorm);
  const WindowGrid grid(au.n_win, au.half_range);
  au.kappa = grid.kappa();
  au.lambda_min = 1.0 / (au.n_win * static_cast<double>(au.L) * au.L);
  au.sequence_bound = sequence_length_bound(au.lambda_min);
  au.eigvec_bound = au.half_range * (au.sequence_bound + 1) / au.n_win;

  out.marking = run_marking(window_weights(J, au.n_win, au.half_range), au.lambda_min);
  au.n_seq = static_cast<int>(out.marking.sequences.size());

  const Spectrum& s = J.spectrum();
  const CVector c = first_coordinate_coefficients(s);
  std::vector<CVector> ys;
  CVector ysum = CVector::Zero(D);
  for (const MarkedSequence& seq : out.marking.sequences) {
    au.max_sequence_length = std::max(au.max_sequence_length, seq.length());
    CVector y = filtered_v1(s, c, grid.merged(seq.first, seq.last));
    ysum += y;
    const double yn = y.norm();
    if (yn < 1e-13) continue;
    const double wa = 0.5 * (grid.omega(seq.first) + grid.omega(seq.last));
    au.max_eigvec_residual = std::max(au.max_eigvec_residual, (e * y - wa * y).norm() / yn);
    ys.push_back(y);
  }

  CMatrix Y(D, static_cast<Index>(ys.size()));
  for (std::size_t a = 0; a < ys.size(); ++a) Y.col(static_cast<Index>(a)) = ys[a] / ys[a].norm();
  if (Y.cols() > 0) {
    const CMatrix gram = Y.adjoint() * Y;
    for (Index a = 0; a + 1 < gram.rows(); ++a)
      au.max_adjacent_overlap = std::max(au.max_adjacent_overlap, std::abs(gram(a, a + 1)));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
    au.y_gram_min_eig = es.eigenvalues()(0);
  } else {
    au.y_gram_min_eig = std::numeric_limits<double>::quiet_NaN();
  }

  out.W = orthonormalize(Y);
  CVector v1 = CVector::Zero(D);
  v1(0) = 1.0;
  const CMatrix& w = out.W.columns();
  au.claim1_residual_sq = out.W.empty() ? 1.0 : (w * (w.adjoint() * v1) - v1).squaredNorm();
  measure_claims(e, out.W, 1, 1, au);
  return out;
}

}  // namespace cpair
