#include "cpair/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cpair/errors.hpp"

namespace cpair {

void require_finite(const CMatrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidMatrix(std::string(what) + ": non-finite entries");
}

HermitianMatrix::HermitianMatrix() : entries_(0, 0), cache_(std::make_shared<Cache>()) {}

HermitianMatrix::HermitianMatrix(const CMatrix& entries) : cache_(std::make_shared<Cache>()) {
  if (entries.rows() != entries.cols())
    throw InvalidMatrix("matrix is not square (" + std::to_string(entries.rows()) + "x" +
                        std::to_string(entries.cols()) + ")");
  require_finite(entries, "hermitian matrix");
  entries_ = 0.5 * (entries + entries.adjoint());
}

HermitianMatrix HermitianMatrix::from_spectrum(const RVector& values, const CMatrix& vectors) {
  const Index n = values.size();
  if (vectors.rows() != n || vectors.cols() != n)
    throw InvalidMatrix("spectrum and eigenvector shapes disagree");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) < values(b); });
  Spectrum s;
  s.values.resize(n);
  s.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    s.values(k) = values(order[static_cast<std::size_t>(k)]);
    s.vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  HermitianMatrix m(spectral_matrix(s, s.values));
  std::call_once(m.cache_->once, [&] {
    m.cache_->spectrum = std::move(s);
    m.cache_->ready = true;
  });
  return m;
}

HermitianMatrix HermitianMatrix::zero(Index n) { return HermitianMatrix(CMatrix::Zero(n, n)); }

HermitianMatrix HermitianMatrix::identity(Index n) {
  return from_spectrum(RVector::Ones(n), CMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::diagonal(const RVector& d) {
  return from_spectrum(d, CMatrix::Identity(d.size(), d.size()));
}

const Spectrum& HermitianMatrix::spectrum() const {
  std::call_once(cache_->once, [this] {
    Spectrum s;
    if (entries_.rows() > 0) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(entries_);
      if (es.info() != Eigen::Success) throw InvalidMatrix("eigensolver did not converge");
      s.values = es.eigenvalues();
      s.vectors = es.eigenvectors();
    }
    cache_->spectrum = std::move(s);
    cache_->ready = true;
  });
  return cache_->spectrum;
}

bool HermitianMatrix::has_cached_spectrum() const { return cache_->ready.load(); }

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
  return HermitianMatrix(a.entries() + b.entries());
}

HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
  return HermitianMatrix(a.entries() - b.entries());
}

HermitianMatrix operator*(double s, const HermitianMatrix& a) {
  return HermitianMatrix(s * a.entries());
}

const Spectrum& eig(const HermitianMatrix& m) { return m.spectrum(); }

HermitianMatrix checked_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols())
    throw InvalidMatrix("matrix is not square (" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
  require_finite(m, "hermitian matrix");
  if (m.size() > 0) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (defect > tol * scale)
      throw InvalidMatrix("matrix is not Hermitian (max |M - M^dagger| = " + std::to_string(defect) + ")");
  }
  return HermitianMatrix(m);
}

RVector spectral_values(const Spectrum& s, const std::function<double(double)>& g) {
  RVector out(s.values.size());
  for (Index k = 0; k < s.values.size(); ++k) {
    const double v = g(s.values(k));
    if (!std::isfinite(v))
      throw FunctionDomainError("function is not finite at eigenvalue " +
                                std::to_string(s.values(k)));
    out(k) = v;
  }
  return out;
}

CMatrix spectral_matrix(const Spectrum& s, const RVector& gv) {
  return s.vectors * gv.asDiagonal() * s.vectors.adjoint();
}

CMatrix spectral_apply(const Spectrum& s, const RVector& gv, const CMatrix& x) {
  CMatrix y = s.vectors.adjoint() * x;
  y = gv.asDiagonal() * y;
  return s.vectors * y;
}

HermitianMatrix apply_scalar_function(const HermitianMatrix& m,
                                      const std::function<double(double)>& g) {
  const Spectrum& s = m.spectrum();
  RVector gv = spectral_values(s, g);
  return HermitianMatrix::from_spectrum(gv, s.vectors);
}

double op_norm(const CMatrix& m) {
  require_finite(m, "op_norm");
  if (m.size() == 0) return 0.0;
  if (std::min(m.rows(), m.cols()) <= 32) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
  }
  // Largest eigenvalue of the smaller Gram matrix; relative accuracy of the
  // top singular value is unaffected by squaring.
  CMatrix g = m.rows() <= m.cols() ? CMatrix(m * m.adjoint()) : CMatrix(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double op_norm(const HermitianMatrix& m) {
  if (m.dim() == 0) return 0.0;
  const RVector& v = m.spectrum().values;
  return std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
}

double hermitian_norm(const CMatrix& m) {
  require_finite(m, "hermitian_norm");
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  const RVector& v = es.eigenvalues();
  return std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
}

double commutator_norm(const CMatrix& a, const CMatrix& b) {
  // For Hermitian a, b the commutator is anti-Hermitian; i[a,b] is Hermitian.
  CMatrix c = a * b - b * a;
  const bool hermitian_inputs =
      (a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()) &&
      (b - b.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + b.cwiseAbs().maxCoeff());
  if (hermitian_inputs && c.size() > 0) {
    CMatrix h = cplx(0, 1) * c;
    return hermitian_norm(0.5 * (h + h.adjoint()));
  }
  return op_norm(c);
}

double commutator_norm(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidMatrix("commutator_norm: dimension mismatch");
  return commutator_norm(a.entries(), b.entries());
}

SubspaceFrame::SubspaceFrame(Index ambient_dim)
    : ambient_dim_(ambient_dim), columns_(ambient_dim, 0) {}

SubspaceFrame SubspaceFrame::from_orthonormal(const CMatrix& columns) {
  require_finite(columns, "frame");
  const Index r = columns.cols();
  if (r > 0) {
    const double dev =
        (columns.adjoint() * columns - CMatrix::Identity(r, r)).cwiseAbs().maxCoeff();
    if (dev > 1e-10)
      throw InvalidMatrix("frame columns are not orthonormal (deviation " +
                          std::to_string(dev) + ")");
  }
  SubspaceFrame f(columns.rows());
  f.columns_ = columns;
  return f;
}

SubspaceFrame SubspaceFrame::coordinate(Index ambient_dim, Index begin, Index count) {
  if (begin < 0 || count < 0 || begin + count > ambient_dim)
    throw InvalidParameter("coordinate frame out of range");
  SubspaceFrame f(ambient_dim);
  f.columns_ = CMatrix::Zero(ambient_dim, count);
  for (Index k = 0; k < count; ++k) f.columns_(begin + k, k) = 1.0;
  return f;
}

SubspaceFrame SubspaceFrame::full(Index ambient_dim) {
  return coordinate(ambient_dim, 0, ambient_dim);
}

SubspaceFrame orthonormalize(const CMatrix& vectors, double rel_tol) {
  const Index n = vectors.rows();
  if (vectors.cols() == 0) return SubspaceFrame(n);
  require_finite(vectors, "orthonormalize");
  const double scale = vectors.colwise().norm().maxCoeff();
  if (scale == 0.0) return SubspaceFrame(n);

  Eigen::ColPivHouseholderQR<CMatrix> qr(vectors);
  const auto& r = qr.matrixR();
  const Index kmax = std::min(n, vectors.cols());
  Index rank = 0;
  while (rank < kmax && std::abs(r(rank, rank)) > rel_tol * scale) ++rank;

  CMatrix q = qr.householderQ() * CMatrix::Identity(n, rank);
  // Householder Q is orthonormal to roundoff; one re-orthogonalization pass
  // keeps downstream invariant checks well inside 1e-10.
  if (rank > 0) {
    Eigen::HouseholderQR<CMatrix> again(q);
    q = again.householderQ() * CMatrix::Identity(n, rank);
  }
  return SubspaceFrame::from_orthonormal(q);
}

SubspaceFrame span_of(const std::vector<const SubspaceFrame*>& frames, Index ambient_dim,
                      double rel_tol) {
  Index cols = 0;
  for (const SubspaceFrame* f : frames) {
    if (f->ambient_dim() != ambient_dim && f->rank() > 0)
      throw InvalidParameter("span_of: ambient dimension mismatch");
    cols += f->rank();
  }
  CMatrix all(ambient_dim, cols);
  Index at = 0;
  for (const SubspaceFrame* f : frames) {
    if (f->rank() == 0) continue;
    all.middleCols(at, f->rank()) = f->columns();
    at += f->rank();
  }
  return orthonormalize(all, rel_tol);
}

SubspaceFrame orthogonal_complement(const SubspaceFrame& f) {
  const Index n = f.ambient_dim();
  const Index r = f.rank();
  if (r == 0) return SubspaceFrame::full(n);
  if (r >= n) return SubspaceFrame(n);
  Eigen::HouseholderQR<CMatrix> qr(f.columns());
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  return SubspaceFrame::from_orthonormal(q.rightCols(n - r));
}

}  // namespace cpair
