#include "cpair/povm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "cpair/errors.hpp"
#include "cpair/filters.hpp"
#include "cpair/parallel.hpp"

namespace cpair {

namespace {

constexpr int kMaxWindows = 10000;

int clamp_windows(double n, int lo) {
  if (!(n < kMaxWindows)) return kMaxWindows;  // also catches inf from delta = 0
  return std::max(lo, static_cast<int>(n));
}

// tr(X Y) in O(n^2).
cplx trace_product(const CMatrix& x, const CMatrix& y) { return x.transpose().cwiseProduct(y).sum(); }

void guard(const PovmScheme& s) {
  if (s.outcome_count() > kMaxEnumeratedOutcomes)
    throw UseMonteCarlo("outcome count " + std::to_string(s.outcome_count()) + " exceeds the enumeration limit");
}

// Squared operators once per scheme evaluation.
struct ErrorTerms {
  std::vector<CMatrix> A, A2;
  explicit ErrorTerms(const PovmScheme& s) {
    for (int i = 0; i < s.num_operators(); ++i) {
      A.push_back(s.op(i).entries());
      A2.push_back(A.back() * A.back());
    }
  }
  // tr((A_i - w)^2 sigma) for unnormalized sigma.
  double value(int i, double w, const CMatrix& sigma) const {
    const double t2 = trace_product(A2[static_cast<std::size_t>(i)], sigma).real();
    const double t1 = trace_product(A[static_cast<std::size_t>(i)], sigma).real();
    const double t0 = sigma.trace().real();
    return t2 - 2.0 * w * t1 + w * w * t0;
  }
};

std::vector<CMatrix> kraus_list(const PovmScheme& s, int i) {
  std::vector<CMatrix> out;
  for (int n : s.active_windows(i)) out.push_back(s.kraus(i, n));
  return out;
}

// Depth-first walk over outcome tuples in measurement order A_N, ..., A_1.
// `leaf` receives the tuple (operator order) and the unnormalized state.
void walk_outcomes(const PovmScheme& s, const CMatrix& rho, const std::vector<std::vector<CMatrix>>& kraus,
                   const std::function<void(const std::vector<int>&, const CMatrix&)>& leaf, int first_branch = -1) {
  const int N = s.num_operators();
  std::vector<int> tuple(static_cast<std::size_t>(N), 0);
  std::function<void(int, const CMatrix&)> rec = [&](int k, const CMatrix& sigma) {
    if (k < 0) {
      leaf(tuple, sigma);
      return;
    }
    const std::vector<int>& act = s.active_windows(k);
    for (std::size_t a = 0; a < act.size(); ++a) {
      if (k == N - 1 && first_branch >= 0 && static_cast<int>(a) != first_branch) continue;
      const CMatrix& M = kraus[static_cast<std::size_t>(k)][a];
      const CMatrix next = M * sigma * M;
      if (next.trace().real() <= 0.0) continue;
      tuple[static_cast<std::size_t>(k)] = act[a];
      rec(k - 1, next);
    }
  };
  rec(N - 1, rho);
}

std::vector<std::vector<CMatrix>> all_kraus(const PovmScheme& s) {
  std::vector<std::vector<CMatrix>> out;
  for (int i = 0; i < s.num_operators(); ++i) out.push_back(kraus_list(s, i));
  return out;
}

}  // namespace

PovmScheme::PovmScheme(const std::vector<HermitianMatrix>& operators, std::optional<int> n_win_override) {
  if (operators.empty()) throw InvalidParameter("at least one operator is required");
  dim_ = operators.front().dim();
  for (const HermitianMatrix& a : operators) {
    if (a.dim() != dim_ || dim_ == 0) throw InvalidMatrix("operators must share a nonzero dimension");
    require_finite(a.entries(), "operator");
    const double nrm = op_norm(a);
    const double f = nrm > 1.0 ? nrm : 1.0;
    scale_.push_back(f);
    ops_.push_back(f == 1.0 ? a : HermitianMatrix(CMatrix(a.entries() / f)));
  }
  const int N = num_operators();
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) delta_ = std::max(delta_, commutator_norm(ops_[i], ops_[j]));

  if (n_win_override) {
    if (*n_win_override < 1 || *n_win_override > kMaxWindows) throw InvalidParameter("n_win must lie in [1, 1e4]");
    n_win_ = *n_win_override;
  } else if (N >= 2) {
    n_win_ = clamp_windows(std::ceil(1.0 / std::sqrt(delta_ * (N - 1))), 1);
  } else {
    n_win_ = clamp_windows(std::ceil(1.0 / std::sqrt(delta_)), 2);
  }
  kappa_ = n_win_ > 1 ? 2.0 / (n_win_ - 1) : 2.0;

  for (int i = 0; i < N; ++i) {
    OperatorKraus k;
    const Spectrum& sp = eig(ops_[static_cast<std::size_t>(i)]);
    k.sqrt_values = Eigen::MatrixXd::Zero(dim_, n_win_);
    if (n_win_ == 1) {
      k.sqrt_values.setOnes();
    } else {
      const WindowGrid grid(n_win_);
      for (Index r = 0; r < dim_; ++r) {
        // Only windows within kappa of the eigenvalue can be nonzero.
        const double l = sp.values(r);
        const int lo = std::max(0, static_cast<int>(std::floor((l + 1.0) / kappa_)) - 1);
        const int hi = std::min(n_win_ - 1, static_cast<int>(std::ceil((l + 1.0) / kappa_)) + 1);
        for (int n = lo; n <= hi; ++n) k.sqrt_values(r, n) = std::sqrt(std::max(0.0, grid.value(n, l)));
      }
    }
    for (int n = 0; n < n_win_; ++n) {
      if (k.sqrt_values.col(n).maxCoeff() <= 0.0) continue;
      k.active.push_back(n);
      k.factors.push_back(n_win_ == 1 ? CMatrix(CMatrix::Identity(dim_, dim_)) : spectral_matrix(sp, k.sqrt_values.col(n)));
    }
    kraus_.push_back(std::move(k));
  }
}

double PovmScheme::omega(int n) const {
  if (n < 0 || n >= n_win_) throw InvalidParameter("window index out of range");
  return n_win_ == 1 ? 0.0 : -1.0 + n * kappa_;
}

CMatrix PovmScheme::kraus(int i, int n) const {
  const OperatorKraus& k = kraus_.at(static_cast<std::size_t>(i));
  if (n < 0 || n >= n_win_) throw InvalidParameter("window index out of range");
  const auto it = std::find(k.active.begin(), k.active.end(), n);
  if (it == k.active.end()) return CMatrix::Zero(dim_, dim_);
  return k.factors[static_cast<std::size_t>(it - k.active.begin())];
}

double PovmScheme::completeness_residual() const {
  double worst = 0.0;
  for (const OperatorKraus& k : kraus_) {
    CMatrix sum = CMatrix::Zero(dim_, dim_);
    for (const CMatrix& m : k.factors) sum += m * m;
    worst = std::max(worst, op_norm(CMatrix(sum - CMatrix::Identity(dim_, dim_))));
  }
  return worst;
}

double PovmScheme::outcome_count() const {
  double c = 1.0;
  for (const OperatorKraus& k : kraus_) c *= static_cast<double>(k.active.size());
  return c;
}

void validate_density_matrix(const CMatrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw InvalidMatrix("density matrix must be square and nonempty");
  require_finite(rho, "density matrix");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw InvalidMatrix("density matrix is not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0, 0.0)) > 1e-10) throw InvalidMatrix("density matrix trace differs from 1");
  if (eig(HermitianMatrix(rho)).values(0) < -1e-10) throw InvalidMatrix("density matrix is not positive semidefinite");
}

ExactMeasurement exact_measurement(const PovmScheme& s, const CMatrix& rho, unsigned threads) {
  validate_density_matrix(rho);
  if (rho.rows() != s.dim()) throw InvalidMatrix("density matrix dimension mismatch");
  guard(s);
  const ErrorTerms terms(s);
  const auto kraus = all_kraus(s);
  const int N = s.num_operators();
  const std::size_t branches = s.active_windows(N - 1).size();
  const std::vector<ExactMeasurement> parts = parallel_map(
      branches,
      [&](std::size_t b) {
        ExactMeasurement e;
        e.ms_error.assign(static_cast<std::size_t>(N), 0.0);
        walk_outcomes(
            s, rho, kraus,
            [&](const std::vector<int>& tuple, const CMatrix& sigma) {
              ++e.outcomes;
              e.total_probability += sigma.trace().real();
              for (int i = 0; i < N; ++i)
                e.ms_error[static_cast<std::size_t>(i)] += terms.value(i, s.omega(tuple[static_cast<std::size_t>(i)]), sigma);
            },
            static_cast<int>(b));
        return e;
      },
      threads);
  ExactMeasurement total;
  total.ms_error.assign(static_cast<std::size_t>(N), 0.0);
  for (const ExactMeasurement& p : parts) {
    total.outcomes += p.outcomes;
    total.total_probability += p.total_probability;
    for (int i = 0; i < N; ++i) total.ms_error[static_cast<std::size_t>(i)] += p.ms_error[static_cast<std::size_t>(i)];
  }
  return total;
}

double exact_ms_error(const PovmScheme& s, const CMatrix& rho, int i) {
  if (i < 0 || i >= s.num_operators()) throw InvalidParameter("operator index out of range");
  return exact_measurement(s, rho).ms_error[static_cast<std::size_t>(i)];
}

std::vector<std::pair<std::vector<int>, double>> outcome_distribution(const PovmScheme& s, const CMatrix& rho) {
  validate_density_matrix(rho);
  if (rho.rows() != s.dim()) throw InvalidMatrix("density matrix dimension mismatch");
  guard(s);
  std::vector<std::pair<std::vector<int>, double>> out;
  walk_outcomes(s, rho, all_kraus(s), [&](const std::vector<int>& tuple, const CMatrix& sigma) {
    out.emplace_back(tuple, sigma.trace().real());
  });
  std::sort(out.begin(), out.end());
  return out;
}

PovmElementCheck check_elements(const PovmScheme& s, unsigned threads) {
  guard(s);
  const auto kraus = all_kraus(s);
  const int N = s.num_operators();
  const Index d = s.dim();
  struct Part {
    double min_eig = std::numeric_limits<double>::infinity();
    CMatrix sum;
  };
  // E = M(N) ... M(2) M(1)^2 M(2) ... M(N), built from operator 1 outward.
  const std::vector<Part> parts = parallel_map(
      kraus[0].size(),
      [&](std::size_t first) {
        Part p;
        p.sum = CMatrix::Zero(d, d);
        std::function<void(int, const CMatrix&)> rec = [&](int k, const CMatrix& x) {
          if (k == N) {
            p.min_eig = std::min(p.min_eig, eig(HermitianMatrix(x)).values(0));
            p.sum += x;
            return;
          }
          for (const CMatrix& m : kraus[static_cast<std::size_t>(k)]) rec(k + 1, m * x * m);
        };
        const CMatrix& m1 = kraus[0][first];
        rec(1, m1 * m1);
        return p;
      },
      threads);
  PovmElementCheck c;
  c.min_eigenvalue = std::numeric_limits<double>::infinity();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const Part& p : parts) {
    c.min_eigenvalue = std::min(c.min_eigenvalue, p.min_eig);
    sum += p.sum;
  }
  c.completeness_residual = op_norm(CMatrix(sum - CMatrix::Identity(d, d)));
  return c;
}

OutcomeRecord sample_outcome(const PovmScheme& s, const CMatrix& rho, std::uint64_t seed) {
  validate_density_matrix(rho);
  if (rho.rows() != s.dim()) throw InvalidMatrix("density matrix dimension mismatch");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int N = s.num_operators();
  OutcomeRecord rec;
  rec.windows.assign(static_cast<std::size_t>(N), 0);
  rec.omegas.assign(static_cast<std::size_t>(N), 0.0);
  rec.probability = 1.0;
  CMatrix sigma = rho;
  for (int k = N - 1; k >= 0; --k) {
    const std::vector<int>& act = s.active_windows(k);
    std::vector<CMatrix> branch;
    std::vector<double> p;
    for (int n : act) {
      const CMatrix m = s.kraus(k, n);
      branch.push_back(m * sigma * m);
      p.push_back(std::max(0.0, branch.back().trace().real()));
    }
    double total = 0.0;
    for (double v : p) total += v;
    if (!(total > 0.0)) throw NumericalError("measurement branch has zero total probability");
    double u = unif(rng) * total;
    std::size_t pick = 0;
    while (pick + 1 < p.size() && (u -= p[pick]) >= 0.0) ++pick;
    // Tiny probabilities can let u run past the last positive entry.
    while (p[pick] <= 0.0 && pick > 0) --pick;
    rec.windows[static_cast<std::size_t>(k)] = act[pick];
    rec.omegas[static_cast<std::size_t>(k)] = s.omega(act[pick]);
    rec.probability *= p[pick] / total;
    sigma = branch[pick] / p[pick];
  }
  rec.post_state = sigma;
  const ErrorTerms terms(s);
  for (int i = 0; i < N; ++i) rec.conditional_error.push_back(terms.value(i, rec.omegas[static_cast<std::size_t>(i)], sigma));
  return rec;
}

MonteCarloMeasurement monte_carlo_ms_error(const PovmScheme& s, const CMatrix& rho, int samples, std::uint64_t seed,
                                           unsigned threads) {
  if (samples < 2) throw InvalidParameter("at least two samples are required");
  validate_density_matrix(rho);
  if (rho.rows() != s.dim()) throw InvalidMatrix("density matrix dimension mismatch");
  // Unravel rho into its eigenvectors: drawing component k with probability
  // p_k and then measuring the pure state reproduces the outcome statistics
  // of rho at O(d^2) per Kraus application.
  const HermitianMatrix rho_h(rho);
  const Spectrum& sp = eig(rho_h);
  std::vector<double> weights(static_cast<std::size_t>(sp.values.size()));
  for (Index k = 0; k < sp.values.size(); ++k) weights[static_cast<std::size_t>(k)] = std::max(0.0, sp.values(k));
  const auto kraus = all_kraus(s);
  const int N = s.num_operators();
  std::vector<CMatrix> A2;
  for (int i = 0; i < N; ++i) A2.push_back(s.op(i).entries() * s.op(i).entries());

  const std::vector<std::vector<double>> errs = parallel_map(
      static_cast<std::size_t>(samples),
      [&](std::size_t k) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
        std::mt19937_64 rng(seq);
        std::discrete_distribution<Index> pick_component(weights.begin(), weights.end());
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        CVector psi = sp.vectors.col(pick_component(rng));
        std::vector<double> omegas(static_cast<std::size_t>(N), 0.0);
        for (int op = N - 1; op >= 0; --op) {
          const std::vector<int>& act = s.active_windows(op);
          std::vector<CVector> branch;
          std::vector<double> p;
          double total = 0.0;
          for (const CMatrix& m : kraus[static_cast<std::size_t>(op)]) {
            branch.push_back(m * psi);
            p.push_back(branch.back().squaredNorm());
            total += p.back();
          }
          double u = unif(rng) * total;
          std::size_t pick = 0;
          while (pick + 1 < p.size() && (u -= p[pick]) >= 0.0) ++pick;
          while (p[pick] <= 0.0 && pick > 0) --pick;
          omegas[static_cast<std::size_t>(op)] = s.omega(act[pick]);
          psi = branch[pick] / std::sqrt(p[pick]);
        }
        std::vector<double> e(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i) {
          const double w = omegas[static_cast<std::size_t>(i)];
          const double t2 = psi.dot(A2[static_cast<std::size_t>(i)] * psi).real();
          const double t1 = psi.dot(s.op(i).entries() * psi).real();
          e[static_cast<std::size_t>(i)] = t2 - 2.0 * w * t1 + w * w;
        }
        return e;
      },
      threads);
  MonteCarloMeasurement mc;
  mc.samples = samples;
  for (int i = 0; i < N; ++i) {
    double sum = 0.0, sum2 = 0.0;
    for (const auto& e : errs) {
      sum += e[static_cast<std::size_t>(i)];
      sum2 += e[static_cast<std::size_t>(i)] * e[static_cast<std::size_t>(i)];
    }
    const double mean = sum / samples;
    const double var = std::max(0.0, (sum2 - samples * mean * mean) / (samples - 1));
    mc.ms_error.push_back(mean);
    mc.std_error.push_back(std::sqrt(var / samples));
  }
  return mc;
}

CommutatorLemmaCheck check_commutator_lemmas(const PovmScheme& s, int i, int j) {
  const int N = s.num_operators();
  if (i < 0 || j < 0 || i >= N || j >= N) throw InvalidParameter("operator index out of range");
  if (i == j) throw InvalidParameter("commutator lemmas need two distinct operators");
  const Index d = s.dim();
  const CMatrix& A = s.op(i).entries();
  CommutatorLemmaCheck c;
  for (int n : s.active_windows(i)) {
    const CMatrix shifted = A - s.omega(n) * CMatrix::Identity(d, d);
    c.small_sum += op_norm(CMatrix(shifted * s.kraus(i, n)));
  }
  // [M, A - w] = [M, A] since w is a scalar.
  CMatrix comm = CMatrix::Zero(d, d), comm1 = CMatrix::Zero(d, d);
  for (int n : s.active_windows(j)) {
    const CMatrix m = s.kraus(j, n);
    const CMatrix cm = m * A - A * m;
    comm += cm * m;
    comm1 += cm * cm.adjoint();
  }
  c.comm_norm = op_norm(comm);
  c.comm1_norm = op_norm(comm1);
  c.small_ratio = c.small_sum / s.kappa();
  if (s.delta() > 0.0) {
    const double r = s.delta() / s.kappa();
    c.comm_ratio = c.comm_norm / r;
    c.comm1_ratio = c.comm1_norm / (r * r);
  }
  return c;
}

}  // namespace cpair
