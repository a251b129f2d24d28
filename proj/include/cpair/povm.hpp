#pragma once

// Soft simultaneous measurement of N almost-commuting observables. Each
// operator A_i gets Kraus factors M(i, n) = sqrt(F(w(n), 0, kappa, A_i)) over
// n_win windows; the operators are measured in the order A_N, ..., A_1, so
// an outcome tuple leaves the state K rho K^dagger with
// K = M(1, n_1) ... M(N, n_N).

#include <cstdint>
#include <optional>
#include <vector>

#include "cpair/matrix.hpp"

namespace cpair {

/// Largest enumerated outcome count before exact routines refuse.
inline constexpr double kMaxEnumeratedOutcomes = 1e6;

class PovmScheme {
 public:
  /// Operators of norm > 1 are divided by their norm (recorded per operator).
  /// n_win = ceil(delta^{-1/2} (N-1)^{-1/2}) for N >= 2, ceil(delta^{-1/2}) for
  /// N = 1, clamped to [1, 1e4] ([2, 1e4] for N = 1). Throws InvalidMatrix for
  /// mismatched or non-finite inputs and InvalidParameter for N = 0 or an
  /// override outside [1, 1e4].
  explicit PovmScheme(const std::vector<HermitianMatrix>& operators, std::optional<int> n_win_override = {});

  int num_operators() const { return static_cast<int>(ops_.size()); }
  Index dim() const { return dim_; }
  int n_win() const { return n_win_; }
  /// 2 / (n_win - 1); 2 when n_win = 1.
  double kappa() const { return kappa_; }
  double delta() const { return delta_; }
  /// Window centre; 0 for the single-window scheme.
  double omega(int n) const;
  const HermitianMatrix& op(int i) const { return ops_.at(static_cast<std::size_t>(i)); }
  const std::vector<double>& scale_factors() const { return scale_; }

  /// Windows whose Kraus factor is nonzero on the spectrum of A_i.
  const std::vector<int>& active_windows(int i) const { return kraus_.at(static_cast<std::size_t>(i)).active; }
  /// M(i, n); the zero matrix for inactive windows.
  CMatrix kraus(int i, int n) const;

  /// max_i || sum_n M(i, n)^2 - I ||.
  double completeness_residual() const;
  /// Product over operators of the active window counts.
  double outcome_count() const;

 private:
  struct OperatorKraus {
    Eigen::MatrixXd sqrt_values;  // dim x n_win
    std::vector<int> active;
    std::vector<CMatrix> factors;  // indexed like `active`
  };

  std::vector<HermitianMatrix> ops_;
  std::vector<double> scale_;
  std::vector<OperatorKraus> kraus_;
  Index dim_ = 0;
  int n_win_ = 1;
  double kappa_ = 2.0;
  double delta_ = 0.0;
};

/// Throws InvalidMatrix unless rho is Hermitian within 1e-10, has minimum
/// eigenvalue >= -1e-10 and trace within 1e-10 of 1.
void validate_density_matrix(const CMatrix& rho);

struct ExactMeasurement {
  std::vector<double> ms_error;  // per operator
  double total_probability = 0.0;
  std::size_t outcomes = 0;      // tuples with nonzero Kraus product
};

/// Sum over outcome tuples of tr((A_i - w(n_i))^2 K rho K^dagger), for every i.
/// Throws UseMonteCarlo if the outcome count exceeds kMaxEnumeratedOutcomes.
ExactMeasurement exact_measurement(const PovmScheme& s, const CMatrix& rho, unsigned threads = 0);
double exact_ms_error(const PovmScheme& s, const CMatrix& rho, int i);

/// Probabilities tr(E(n) rho) of every outcome tuple, keyed by the tuple in
/// operator order. Same guard as exact_measurement.
std::vector<std::pair<std::vector<int>, double>> outcome_distribution(const PovmScheme& s, const CMatrix& rho);

/// Smallest eigenvalue over all POVM elements E(n) = K^dagger K, and
/// || sum_n E(n) - I ||. Same guard.
struct PovmElementCheck {
  double min_eigenvalue = 0.0;
  double completeness_residual = 0.0;
};
PovmElementCheck check_elements(const PovmScheme& s, unsigned threads = 0);

struct OutcomeRecord {
  std::vector<int> windows;     // n_i, in operator order
  std::vector<double> omegas;
  double probability = 0.0;     // tr(K rho K^dagger)
  CMatrix post_state;           // normalized
  std::vector<double> conditional_error;  // tr((A_i - w(n_i))^2 post_state)
};

/// Sequential collapse in measurement order A_N, ..., A_1. Deterministic in
/// the seed.
OutcomeRecord sample_outcome(const PovmScheme& s, const CMatrix& rho, std::uint64_t seed);

struct MonteCarloMeasurement {
  std::vector<double> ms_error;  // per operator
  std::vector<double> std_error;
  int samples = 0;
};

/// Averages conditional errors over independent trajectories. Each draws an
/// eigenvector of rho with its weight and measures that pure state; sample k
/// uses the seed sequence (seed, k).
MonteCarloMeasurement monte_carlo_ms_error(const PovmScheme& s, const CMatrix& rho, int samples, std::uint64_t seed,
                                           unsigned threads = 0);

struct CommutatorLemmaCheck {
  double small_sum = 0.0;    // sum_n ||(A_i - w(n)) M(i, n)||
  double comm_norm = 0.0;    // || sum_n [M(j, n), A_i] M(j, n) ||
  double comm1_norm = 0.0;   // || sum_n [M(j, n), A_i] [M(j, n), A_i]^dagger ||
  double small_ratio = 0.0;  // small_sum / kappa
  double comm_ratio = 0.0;   // comm_norm / (delta / kappa)
  double comm1_ratio = 0.0;  // comm1_norm / (delta / kappa)^2
};

/// With O = identity. Ratios are 0 when delta = 0. Throws InvalidParameter
/// for i == j or out-of-range indices.
CommutatorLemmaCheck check_commutator_lemmas(const PovmScheme& s, int i, int j);

}  // namespace cpair
