#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "cpair/errors.hpp"
#include "cpair/instances.hpp"
#include "cpair/povm.hpp"

using namespace cpair;

namespace {

CMatrix mixed(Index d) { return CMatrix::Identity(d, d) / static_cast<double>(d); }

CMatrix pure(Index d, Index k) {
  CMatrix r = CMatrix::Zero(d, d);
  r(k, k) = 1.0;
  return r;
}

double max_error(const ExactMeasurement& e) { return *std::max_element(e.ms_error.begin(), e.ms_error.end()); }

}  // namespace

TEST(PovmScheme, SingleDiagonalOperator) {
  RVector a(4);
  a << -0.7, -0.1, 0.3, 0.95;
  const PovmScheme s({HermitianMatrix::diagonal(a)});
  EXPECT_EQ(s.n_win(), 10000);  // delta = 0, upper clamp
  EXPECT_LE(s.completeness_residual(), 1e-10);
  for (int n : s.active_windows(0)) {
    const CMatrix m = s.kraus(0, n);
    EXPECT_LE((m - CMatrix(m.diagonal().asDiagonal())).norm(), 1e-14);
  }
  EXPECT_LE(s.active_windows(0).size(), 8u);
}

TEST(PovmScheme, PauliPairDegenerates) {
  const Instance in = spin_pair(0.5);
  const PovmScheme s(in.ops);
  EXPECT_NEAR(s.delta(), 2.0, 1e-12);
  EXPECT_EQ(s.n_win(), 1);
  EXPECT_EQ(s.omega(0), 0.0);
  EXPECT_EQ(s.kraus(0, 0), CMatrix::Identity(2, 2));
  EXPECT_LE(s.completeness_residual(), 1e-15);
  // The only outcome is w = 0, so the error is tr(A^2 rho) = 1.
  const ExactMeasurement e = exact_measurement(s, pure(2, 0));
  EXPECT_NEAR(e.ms_error[0], 1.0, 1e-12);
  EXPECT_NEAR(e.ms_error[1], 1.0, 1e-12);
}

TEST(PovmScheme, SpinWindowCount) {
  const PovmScheme s(spin_pair(20).ops);
  EXPECT_NEAR(s.delta(), 1.0 / 20, 1e-12);
  EXPECT_EQ(s.n_win(), 5);
  EXPECT_DOUBLE_EQ(s.kappa(), 0.5);
  EXPECT_EQ(PovmScheme(spin_triple(20).ops).n_win(), 4);  // ceil(sqrt(10))
}

TEST(PovmScheme, RescalingAndValidation) {
  const Instance in = random_pair(6, 3);
  const HermitianMatrix big(CMatrix(3.0 * in.A().entries()));
  const PovmScheme s({big, in.B()});
  EXPECT_NEAR(s.scale_factors()[0], 3.0 * op_norm(in.A()), 1e-12);
  EXPECT_EQ(s.scale_factors()[1], 1.0);
  EXPECT_LE(op_norm(s.op(0)), 1.0 + 1e-12);
  EXPECT_THROW(PovmScheme({}), InvalidParameter);
  EXPECT_THROW(PovmScheme({in.A(), HermitianMatrix::zero(3)}), InvalidMatrix);
  EXPECT_THROW(PovmScheme({in.A()}, 0), InvalidParameter);
  EXPECT_EQ(PovmScheme({in.A()}, 7).n_win(), 7);
  EXPECT_THROW(s.omega(-1), InvalidParameter);
}

TEST(DensityMatrix, Validation) {
  EXPECT_NO_THROW(validate_density_matrix(mixed(3)));
  CMatrix r = mixed(3);
  r(0, 1) = 0.1;
  EXPECT_THROW(validate_density_matrix(r), InvalidMatrix);
  EXPECT_THROW(validate_density_matrix(CMatrix(2.0 * mixed(3))), InvalidMatrix);
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  EXPECT_THROW(validate_density_matrix(neg), InvalidMatrix);
  const PovmScheme s(spin_pair(2).ops);
  EXPECT_THROW(exact_measurement(s, mixed(4)), InvalidMatrix);
}

TEST(ExactMeasurement, EigenstateErrors) {
  // Eigenvalues on window centres are measured without error.
  const int n_win = 9;
  const double kappa = 2.0 / (n_win - 1);
  RVector grid_vals(3), generic(3);
  grid_vals << -1.0 + 2 * kappa, 0.0, 1.0 - kappa;
  generic << -0.33, 0.41, 0.9;
  for (Index k = 0; k < 3; ++k) {
    const PovmScheme on_grid({HermitianMatrix::diagonal(grid_vals)}, n_win);
    EXPECT_LE(exact_ms_error(on_grid, pure(3, k), 0), 1e-14);
    const PovmScheme off({HermitianMatrix::diagonal(generic)}, n_win);
    const double e = exact_ms_error(off, pure(3, k), 0);
    EXPECT_GT(e, 0.0);
    EXPECT_LE(e, kappa * kappa);
  }
}

TEST(ExactMeasurement, ProbabilitiesSumToOne) {
  const PovmScheme s(spin_pair(3).ops);
  const CMatrix rho = pure(7, 2);
  const ExactMeasurement e = exact_measurement(s, rho);
  EXPECT_NEAR(e.total_probability, 1.0, 1e-9);
  double total = 0.0;
  for (const auto& [tuple, p] : outcome_distribution(s, rho)) {
    EXPECT_GE(p, 0.0);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_EQ(exact_measurement(s, rho, 1).ms_error, exact_measurement(s, rho, 3).ms_error);
}

TEST(ExactMeasurement, EnumerationGuard) {
  std::vector<HermitianMatrix> ops;
  for (int i = 0; i < 4; ++i) {
    RVector d = RVector::LinSpaced(40, -1.0, 1.0);
    if (i % 2) d.reverseInPlace();
    ops.push_back(HermitianMatrix::diagonal(d));
  }
  const PovmScheme s(ops, 40);
  EXPECT_GT(s.outcome_count(), kMaxEnumeratedOutcomes);
  EXPECT_THROW(exact_measurement(s, mixed(40)), UseMonteCarlo);
  EXPECT_THROW(check_elements(s), UseMonteCarlo);
  EXPECT_NO_THROW(monte_carlo_ms_error(s, mixed(40), 50, 0));
}

TEST(PovmElements, CompletenessAndPositivity) {
  std::vector<std::vector<HermitianMatrix>> families = {spin_pair(5).ops, spin_pair(10).ops, spin_triple(4).ops,
                                                        random_pair(12, 1).ops};
  for (const auto& ops : families) {
    const PovmScheme s(ops);
    EXPECT_LE(s.completeness_residual(), 1e-10);
    const PovmElementCheck c = check_elements(s);
    EXPECT_LE(c.completeness_residual, 1e-10);
    EXPECT_GE(c.min_eigenvalue, -1e-10);
  }
}

TEST(ExactMeasurement, SpinFamilyScalesWithDelta) {
  std::vector<double> lx, ly;
  double prev = 1.0;
  for (double S : {5.0, 10.0, 20.0, 40.0}) {
    const PovmScheme s(spin_pair(S).ops);
    const double e = max_error(exact_measurement(s, mixed(s.dim())));
    EXPECT_LT(e, prev);
    EXPECT_LE(e / s.delta(), 1.0);  // (N - 1) delta with a constant below 1
    prev = e;
    lx.push_back(std::log(s.delta()));
    ly.push_back(std::log(e));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / 4, my = std::accumulate(ly.begin(), ly.end(), 0.0) / 4;
  double sxy = 0, sxx = 0;
  for (int k = 0; k < 4; ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  const double slope = sxy / sxx;
  EXPECT_GE(slope, 0.5);
  EXPECT_LE(slope, 1.5);
}

TEST(ExactMeasurement, SpinTripleStillComplete) {
  double prev = 1.0;
  for (double S : {5.0, 10.0, 20.0}) {
    const PovmScheme s(spin_triple(S).ops);
    EXPECT_EQ(s.num_operators(), 3);
    const PovmElementCheck c = check_elements(s);
    EXPECT_LE(c.completeness_residual, 1e-10);
    EXPECT_GE(c.min_eigenvalue, -1e-10);
    const double e = max_error(exact_measurement(s, mixed(s.dim())));
    EXPECT_LT(e, prev);
    EXPECT_LE(e / (2 * s.delta()), 2.5);
    prev = e;
  }
}

TEST(Sampling, DeterministicAndConsistent) {
  const PovmScheme s(spin_pair(2).ops);
  const CMatrix rho = pure(5, 1);
  const OutcomeRecord a = sample_outcome(s, rho, 42), b = sample_outcome(s, rho, 42);
  EXPECT_EQ(a.windows, b.windows);
  EXPECT_EQ(a.post_state, b.post_state);
  EXPECT_NEAR(a.post_state.trace().real(), 1.0, 1e-12);

  const auto dist = outcome_distribution(s, rho);
  std::map<std::vector<int>, double> p(dist.begin(), dist.end());
  EXPECT_NEAR(a.probability, p.at(a.windows), 1e-12);

  const int M = 4000;
  std::map<std::vector<int>, int> counts;
  for (int k = 0; k < M; ++k) ++counts[sample_outcome(s, rho, static_cast<std::uint64_t>(k)).windows];
  for (const auto& [tuple, c] : counts) EXPECT_GT(p.count(tuple), 0u);
  for (const auto& [tuple, prob] : p) {
    const double freq = static_cast<double>(counts[tuple]) / M;
    EXPECT_LE(std::abs(freq - prob), 3.0 * std::sqrt(prob * (1 - prob) / M) + 1e-12);
  }
}

TEST(Sampling, EigenstateSingleOperator) {
  RVector a(3);
  a << -0.42, 0.17, 0.8;
  const PovmScheme s({HermitianMatrix::diagonal(a)}, 11);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const OutcomeRecord r = sample_outcome(s, pure(3, 1), seed);
    EXPECT_LT(std::abs(r.omegas[0] - 0.17), s.kappa());
  }
}

TEST(MonteCarlo, MatchesEnumeration) {
  for (double S : {5.0, 10.0}) {
    const PovmScheme s(spin_pair(S).ops);
    const CMatrix rho = mixed(s.dim());
    const ExactMeasurement e = exact_measurement(s, rho);
    const MonteCarloMeasurement mc = monte_carlo_ms_error(s, rho, 10000, 7);
    for (int i = 0; i < 2; ++i) EXPECT_LE(std::abs(mc.ms_error[i] - e.ms_error[i]), 3.0 * mc.std_error[i]);
    const MonteCarloMeasurement again = monte_carlo_ms_error(s, rho, 10000, 7, 1);
    EXPECT_EQ(again.ms_error, mc.ms_error);
  }
  EXPECT_THROW(monte_carlo_ms_error(PovmScheme(spin_pair(2).ops), mixed(5), 1, 0), InvalidParameter);
}

TEST(CommutatorLemmas, CommutingAndBounds) {
  RVector a(5), b(5);
  a << -0.9, -0.2, 0.1, 0.5, 0.7;
  b << 0.3, -0.6, 0.6, -0.1, 0.0;
  const PovmScheme s({HermitianMatrix::diagonal(a), HermitianMatrix::diagonal(b)}, 9);
  const CommutatorLemmaCheck c = check_commutator_lemmas(s, 0, 1);
  EXPECT_LE(c.comm_norm, 1e-14);
  EXPECT_LE(c.comm1_norm, 1e-14);
  EXPECT_EQ(c.comm_ratio, 0.0);
  // Each active window contributes at most kappa.
  EXPECT_LE(c.small_sum, s.active_windows(0).size() * s.kappa() + 1e-12);
  EXPECT_THROW(check_commutator_lemmas(s, 1, 1), InvalidParameter);
  EXPECT_THROW(check_commutator_lemmas(s, 0, 2), InvalidParameter);

  // One eigenvalue meets at most two windows.
  RVector one = RVector::Constant(4, 0.23);
  const PovmScheme single({HermitianMatrix::diagonal(one), HermitianMatrix::diagonal(one)}, 9);
  EXPECT_LE(check_commutator_lemmas(single, 0, 1).small_sum, 2 * single.kappa() + 1e-12);

  const PovmScheme spin(spin_pair(20).ops);
  const CommutatorLemmaCheck r = check_commutator_lemmas(spin, 0, 1);
  EXPECT_TRUE(std::isfinite(r.comm_ratio) && r.comm_ratio > 0.0);
  EXPECT_TRUE(std::isfinite(r.comm1_ratio) && r.comm1_ratio > 0.0);
  EXPECT_LE(r.small_sum, spin.active_windows(0).size() * spin.kappa() + 1e-12);
}
