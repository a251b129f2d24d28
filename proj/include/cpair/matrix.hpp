#pragma once

// Dense Hermitian matrix algebra: spectral decomposition, functions of
// matrices, operator norms and orthonormal frames.

#include <Eigen/Dense>

#include <atomic>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

namespace cpair {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Eigenvalues in ascending order together with a unitary whose columns are
/// the corresponding eigenvectors.
struct Spectrum {
  RVector values;
  CMatrix vectors;
};

/// Dense complex Hermitian matrix. Entries are symmetrized on construction
/// and the spectral decomposition is computed at most once, on first use.
/// Copies share the cached decomposition; the value itself is immutable.
class HermitianMatrix {
 public:
  HermitianMatrix();
  explicit HermitianMatrix(const CMatrix& entries);

  /// Builds V diag(values) V^dagger and seeds the spectral cache with the
  /// given decomposition (sorted ascending if needed).
  static HermitianMatrix from_spectrum(const RVector& values, const CMatrix& vectors);
  static HermitianMatrix zero(Index n);
  static HermitianMatrix identity(Index n);
  static HermitianMatrix diagonal(const RVector& d);

  Index dim() const { return entries_.rows(); }
  const CMatrix& entries() const { return entries_; }
  const Spectrum& spectrum() const;
  bool has_cached_spectrum() const;

  cplx operator()(Index r, Index c) const { return entries_(r, c); }

 private:
  struct Cache {
    std::once_flag once;
    Spectrum spectrum;
    std::atomic<bool> ready{false};
  };

  CMatrix entries_;
  std::shared_ptr<Cache> cache_;
};

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b);
HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b);
HermitianMatrix operator*(double s, const HermitianMatrix& a);

/// Ascending eigenvalues and unitary eigenvectors. Throws InvalidMatrix on
/// non-finite entries.
const Spectrum& eig(const HermitianMatrix& m);

/// V diag(g(lambda)) V^dagger. Throws FunctionDomainError if g is not finite
/// on some eigenvalue.
HermitianMatrix apply_scalar_function(const HermitianMatrix& m,
                                      const std::function<double(double)>& g);

/// Evaluates g on the spectrum; same error contract as apply_scalar_function.
RVector spectral_values(const Spectrum& s, const std::function<double(double)>& g);

/// V diag(gv) V^dagger without wrapping into a HermitianMatrix.
CMatrix spectral_matrix(const Spectrum& s, const RVector& gv);

/// g(M) * X computed as V (gv .* (V^dagger X)), O(n^2 k) for n-by-k X.
CMatrix spectral_apply(const Spectrum& s, const RVector& gv, const CMatrix& x);

/// Largest singular value of a general matrix.
double op_norm(const CMatrix& m);
/// Largest absolute eigenvalue.
double op_norm(const HermitianMatrix& m);
/// Operator norm of a matrix known to be Hermitian (eigenvalues only).
double hermitian_norm(const CMatrix& m);
/// ||AB - BA||.
double commutator_norm(const HermitianMatrix& a, const HermitianMatrix& b);
double commutator_norm(const CMatrix& a, const CMatrix& b);

/// Throws InvalidMatrix if any entry is NaN or infinite.
void require_finite(const CMatrix& m, const char* what);

/// Wraps m after checking max |m - m^dagger| <= tol * max(1, max |m_ij|).
/// Throws InvalidMatrix otherwise (also for non-square or non-finite m).
HermitianMatrix checked_hermitian(const CMatrix& m, double tol = 1e-10);

/// An isometry: its columns are an orthonormal basis of a subspace of an
/// ambient space of dimension ambient_dim().
class SubspaceFrame {
 public:
  SubspaceFrame() = default;
  explicit SubspaceFrame(Index ambient_dim);  // the zero subspace

  /// Wraps columns that are already orthonormal; validated to 1e-10.
  static SubspaceFrame from_orthonormal(const CMatrix& columns);
  /// Coordinate subspace spanned by e_begin .. e_{begin+count-1}.
  static SubspaceFrame coordinate(Index ambient_dim, Index begin, Index count);
  static SubspaceFrame full(Index ambient_dim);

  Index ambient_dim() const { return ambient_dim_; }
  Index rank() const { return columns_.cols(); }
  bool empty() const { return columns_.cols() == 0; }
  const CMatrix& columns() const { return columns_; }

  CMatrix projector() const { return columns_ * columns_.adjoint(); }
  CVector project(const CVector& v) const { return columns_ * (columns_.adjoint() * v); }

 private:
  Index ambient_dim_ = 0;
  CMatrix columns_;
};

/// Default relative drop tolerance for rank-revealing orthonormalization.
inline constexpr double kOrthDropTolerance = 1e-10;

/// Orthonormal basis of the column span of `vectors`. Uses column-pivoted
/// Householder QR; directions with |R_kk| below rel_tol * (largest column
/// norm) are dropped and the rank reduced accordingly.
SubspaceFrame orthonormalize(const CMatrix& vectors, double rel_tol = kOrthDropTolerance);

/// Orthonormal basis of the span of several frames sharing one ambient space.
SubspaceFrame span_of(const std::vector<const SubspaceFrame*>& frames, Index ambient_dim,
                      double rel_tol = kOrthDropTolerance);

/// Orthogonal complement of a frame in its ambient space.
SubspaceFrame orthogonal_complement(const SubspaceFrame& f);

/// Orthogonal projector P = F F^dagger onto a frame's range.
class Projector {
 public:
  Projector() = default;
  explicit Projector(SubspaceFrame frame) : frame_(std::move(frame)) {}

  Index ambient_dim() const { return frame_.ambient_dim(); }
  const SubspaceFrame& frame() const { return frame_; }
  CMatrix matrix() const { return frame_.projector(); }
  CMatrix apply(const CMatrix& x) const { return frame_.columns() * (frame_.columns().adjoint() * x); }
  /// (1 - P) x
  CMatrix apply_complement(const CMatrix& x) const { return x - apply(x); }

 private:
  SubspaceFrame frame_;
};

}  // namespace cpair
