#pragma once

// Report assembly shared by the command-line tool, the acceptance binary and
// the Python module: JSON views of results, scaling studies with a log-log
// slope fit, the Lieb-Robinson ensemble check and POVM summaries.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpair/assembly.hpp"
#include "cpair/instances.hpp"
#include "cpair/povm.hpp"
#include "cpair/recursion.hpp"

namespace cpair {

/// Summary fields of a solve. Matrices (V, A', B') only when requested.
/// Timing lives under "runtime_seconds" only.
nlohmann::json result_to_json(const CommutingPairResult& r, bool include_matrices = false);
nlohmann::json audit_to_json(const SubspaceAudit& a);

nlohmann::json certificate_to_json(const Certificate& c);
nlohmann::json induction_to_json(const InductionReport& r);

/// Ordinary least squares y = intercept + slope x with a 95% t interval.
struct SlopeFit {
  bool fitted = false;
  int points = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Fits log(y) against log(x) over pairs with x > 0 and y > 0. Needs at least
/// `min_points` such pairs, otherwise fitted = false.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, int min_points = 4);

struct ScalingRow {
  std::string family;
  double param = 0.0;  // N, S, dim or block count
  std::uint64_t seed = 0;
  Index dim = 0;
  std::string mode;
  double delta = 0.0;
  double Delta = 0.0;
  int n_cut = 0;
  int L = 0;
  double err_A = 0.0;
  double err_B = 0.0;
  double offdiag_norm = 0.0;
  double predicted_offdiag = 0.0;
  double commutator_residual = 0.0;
  double err_X = 0.0;  // ||X - B||, JSON only
  double runtime_seconds = 0.0;

  double err() const { return std::max(err_A, err_B); }
};

struct ScalingReport {
  std::string family;
  std::string requested_mode;
  std::vector<ScalingRow> rows;        // sorted by delta descending
  // One entry per distinct parameter, same order as the rows.
  std::vector<double> params;
  std::vector<double> median_delta;
  std::vector<double> median_err;
  bool median_nonincreasing = false;
  SlopeFit fit;                        // median err vs median delta
};

/// family: uniform_chain (N), spin_pair (S), random_pair (dim),
/// random_block_tridiag (number of blocks, block size 4). Each parameter is
/// solved for seeds seed .. seed + seeds_per_size - 1. Throws
/// InvalidParameter for fewer than 4 sizes or an unknown family.
ScalingReport run_scaling_study(const std::string& family, const std::vector<double>& sizes, const SolveOptions& opts,
                                std::uint64_t seed = 0, int seeds_per_size = 1);

/// Fixed columns, documented in the README.
std::string scaling_csv(const ScalingReport& r);
nlohmann::json scaling_to_json(const ScalingReport& r, bool include_timing = true);

struct LrStudy {
  int instances = 0;
  int checks = 0;
  int violations = 0;
  double max_ratio = 0.0;  // max leakage / bound
  double range_factor = 2.0;
};

/// Random block-tridiagonal H from seeds seed .. seed + instances - 1
/// (16-32 blocks of size 2-8, dim <= 256). H couples adjacent grid blocks,
/// so its range in B units is range_factor * (block spacing). For every
/// S1 = blocks [0, f], f < 3, and S2 = blocks [k, end] with
/// dist / range in [4, 25], checks ||P(S2) exp(-iHt) P(S1)|| <=
/// exp(-dist / range) at t = tmax / 4 and t = tmax = dist / (e^2 range).
LrStudy run_lr_study(int instances, std::uint64_t seed = 0, double range_factor = 2.0);
nlohmann::json lr_to_json(const LrStudy& s);

struct PovmReport {
  double delta = 0.0;
  int n_win = 0;
  double kappa = 0.0;
  int num_operators = 0;
  std::optional<std::vector<double>> ms_error_exact;
  std::vector<double> ms_error_mc;
  std::vector<double> mc_std_error;
  int samples = 0;
  double bound_ratio = 0.0;  // max_i error / ((N - 1) delta); 0 when undefined
  double completeness_residual = 0.0;
  std::optional<double> positivity_min_eig;
  std::vector<double> scale_factors;
};

/// Maximally mixed state unless rho is given. Enumeration is skipped (with
/// the fields left empty) when the outcome count exceeds the guard.
PovmReport povm_report(const std::vector<HermitianMatrix>& ops, std::optional<int> n_win, int samples,
                       std::uint64_t seed, const std::optional<CMatrix>& rho = {});
nlohmann::json povm_to_json(const PovmReport& r);

}  // namespace cpair
