#include "cpair/instances.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cpair/errors.hpp"
#include "cpair/json_io.hpp"

namespace cpair {

namespace {

CMatrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = cplx(g(rng), g(rng));
  return m;
}

// Divides by the norm when it exceeds one; records the divisor.
HermitianMatrix normalized(const CMatrix& m, std::vector<double>& factors) {
  HermitianMatrix h(m);
  const double n = op_norm(h);
  if (n > 1.0) {
    factors.push_back(n);
    return HermitianMatrix(h.entries() / n);
  }
  factors.push_back(1.0);
  return h;
}

}  // namespace

Instance uniform_chain(int N) {
  if (N < 1) throw InvalidParameter("uniform_chain needs N >= 1");
  CMatrix a = CMatrix::Zero(N, N);
  for (int j = 0; j + 1 < N; ++j) a(j, j + 1) = a(j + 1, j) = 0.5;
  RVector b(N);
  for (int j = 0; j < N; ++j) b(j) = static_cast<double>(j + 1) / N;
  Instance in;
  in.ops = {HermitianMatrix(a), HermitianMatrix::diagonal(b)};
  in.scale_factors = {1.0, 1.0};
  in.description = "uniform_chain N=" + std::to_string(N);
  return in;
}

std::vector<CMatrix> spin_matrices(double S) {
  const double twoS = 2.0 * S;
  if (!(S > 0) || std::abs(twoS - std::round(twoS)) > 1e-12)
    throw InvalidParameter("spin must be a positive integer or half-integer");
  const Index n = static_cast<Index>(std::lround(twoS)) + 1;
  CMatrix sp = CMatrix::Zero(n, n), sz = CMatrix::Zero(n, n);
  // Basis ordered m = S, S-1, ..., -S.
  for (Index k = 0; k < n; ++k) {
    const double m = S - static_cast<double>(k);
    sz(k, k) = m;
    if (k > 0) sp(k - 1, k) = std::sqrt(S * (S + 1) - m * (m + 1));
  }
  const CMatrix sm = sp.adjoint();
  const CMatrix sx = 0.5 * (sp + sm);
  const CMatrix sy = cplx(0, -0.5) * (sp - sm);
  return {sx, sy, sz};
}

Instance spin_pair(double S) {
  const std::vector<CMatrix> s = spin_matrices(S);
  Instance in;
  in.ops = {HermitianMatrix(s[0] / S), HermitianMatrix(s[1] / S)};
  in.scale_factors = {S, S};
  in.description = "spin_pair S=" + std::to_string(S);
  return in;
}

Instance spin_triple(double S) {
  const std::vector<CMatrix> s = spin_matrices(S);
  Instance in;
  in.ops = {HermitianMatrix(s[0] / S), HermitianMatrix(s[1] / S), HermitianMatrix(s[2] / S)};
  in.scale_factors = {S, S, S};
  in.description = "spin_triple S=" + std::to_string(S);
  return in;
}

CMatrix haar_unitary(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const CMatrix z = gaussian(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < n; ++k) {
    const cplx d = r(k, k);
    if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

CMatrix random_hermitian(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const CMatrix g = gaussian(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

Instance random_pair(Index dim, std::uint64_t seed, double epsilon, Index block_size) {
  if (dim < 1) throw InvalidParameter("random_pair needs dim >= 1");
  if (block_size < 1) throw InvalidParameter("block size must be >= 1");
  if (epsilon < 0) throw InvalidParameter("epsilon must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RVector a(dim), b(dim);
  for (Index k = 0; k < dim; ++k) {
    a(k) = u(rng);
    b(k) = u(rng);
  }
  std::sort(b.data(), b.data() + dim);
  CMatrix pa = CMatrix::Zero(dim, dim), pb = CMatrix::Zero(dim, dim);
  for (Index start = 0; start < dim; start += block_size) {
    const Index s = std::min(block_size, dim - start);
    for (CMatrix* p : {&pa, &pb}) {
      CMatrix g = random_hermitian(s, rng());
      const double n = hermitian_norm(g);
      if (n > 0) g /= n;
      p->block(start, start, s, s) = epsilon * g;
    }
  }
  const CMatrix q = haar_unitary(dim, rng());
  CMatrix A = q * (CMatrix(a.cast<cplx>().asDiagonal()) + pa) * q.adjoint();
  CMatrix B = q * (CMatrix(b.cast<cplx>().asDiagonal()) + pb) * q.adjoint();
  Instance in;
  in.ops = {normalized(A, in.scale_factors), normalized(B, in.scale_factors)};
  in.description = "random_pair dim=" + std::to_string(dim) + " seed=" + std::to_string(seed);
  return in;
}

Instance random_block_tridiag(int n_blocks, Index block_size, std::uint64_t seed) {
  if (n_blocks < 1 || block_size < 1) throw InvalidParameter("random_block_tridiag needs positive sizes");
  std::mt19937_64 rng(seed);
  const Index n = n_blocks * block_size;
  CMatrix h = CMatrix::Zero(n, n);
  for (int j = 0; j < n_blocks; ++j) {
    h.block(j * block_size, j * block_size, block_size, block_size) = gaussian(block_size, block_size, rng);
    if (j + 1 < n_blocks)
      h.block(j * block_size, (j + 1) * block_size, block_size, block_size) = gaussian(block_size, block_size, rng);
  }
  h = (0.5 * (h + h.adjoint())).eval();
  h /= hermitian_norm(h);
  RVector b(n);
  for (Index k = 0; k < n; ++k) b(k) = -1.0 + 2.0 * static_cast<double>(k / block_size) / n_blocks;
  Instance in;
  in.ops = {HermitianMatrix(h), HermitianMatrix::diagonal(b)};
  in.scale_factors = {1.0, 1.0};
  in.description = "random_block_tridiag blocks=" + std::to_string(n_blocks) + " size=" +
                   std::to_string(block_size) + " seed=" + std::to_string(seed);
  return in;
}

Instance generate(const InstanceSpec& spec) {
  if (spec.kind == "uniform_chain") return uniform_chain(spec.N);
  if (spec.kind == "spin_pair") return spin_pair(spec.S);
  if (spec.kind == "spin_triple") return spin_triple(spec.S);
  if (spec.kind == "random_pair") return random_pair(spec.dim, spec.seed, spec.epsilon, spec.block_size);
  if (spec.kind == "random_block_tridiag") return random_block_tridiag(spec.n_blocks, spec.block_size, spec.seed);
  if (spec.kind == "from_files") {
    if (spec.files.size() < 2) throw InvalidParameter("from_files needs at least two matrix files");
    Instance in;
    for (const std::string& f : spec.files) in.ops.push_back(normalized(read_matrix_file(f).entries(), in.scale_factors));
    in.description = "from_files";
    return in;
  }
  throw InvalidParameter("unknown instance kind '" + spec.kind + "'");
}

}  // namespace cpair
