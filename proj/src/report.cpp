#include "cpair/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "cpair/errors.hpp"
#include "cpair/json_io.hpp"
#include "cpair/parallel.hpp"
#include "cpair/reduction.hpp"

namespace cpair {

using nlohmann::json;

namespace {

json dims_json(const std::vector<Index>& v) {
  json j = json::array();
  for (Index x : v) j.push_back(x);
  return j;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<Index> range_of(Index a, Index b) {
  std::vector<Index> out;
  for (Index k = a; k <= b; ++k) out.push_back(k);
  return out;
}

Instance family_instance(const std::string& family, double param, std::uint64_t seed) {
  if (family == "uniform_chain") return uniform_chain(static_cast<int>(param));
  if (family == "spin_pair") return spin_pair(param);
  if (family == "random_pair") return random_pair(static_cast<Index>(param), seed);
  if (family == "random_block_tridiag") return random_block_tridiag(static_cast<int>(param), 4, seed);
  throw InvalidParameter("unknown scaling family '" + family + "'");
}

}  // namespace

json audit_to_json(const SubspaceAudit& a) {
  json j;
  j["method"] = a.method;
  j["dim"] = a.dim;
  j["L"] = a.L;
  j["n_win"] = a.n_win;
  j["kappa"] = a.kappa;
  j["half_range"] = a.half_range;
  j["lambda_min"] = a.lambda_min;
  j["F_L"] = a.F_L;
  j["v1_dim"] = a.v1_dim;
  j["vL_dim"] = a.vL_dim;
  j["w_dim"] = a.w_dim;
  j["eps3"] = a.eps3;
  j["eps4"] = a.eps4;
  j["eps5"] = a.eps5;
  if (a.method == "block") {
    j["l_b"] = a.l_b;
    j["n_sb"] = a.n_sb;
    j["G"] = a.G;
    j["lambda0"] = a.lambda0;
    j["eta"] = a.eta;
    j["x_dims"] = dims_json(a.x_dims);
    j["n_dims"] = dims_json(a.n_dims);
    j["nprime_dims"] = dims_json(a.nprime_dims);
    j["u_dim"] = a.u_dim;
    j["max_window_residual"] = a.max_window_residual;
    j["window_orthogonality"] = a.window_orthogonality;
    j["chain_residual_sq"] = a.chain_residual_sq;
    j["rho_min_eig"] = a.rho_min_eig;
    j["rho_max_eig"] = a.rho_max_eig;
    j["min_eig_rho_U"] = a.min_eig_rho_U;
    j["max_near_kernel_energy"] = a.max_near_kernel_energy;
    j["approx_ratio"] = a.approx_ratio;
  } else if (a.method == "tridiag") {
    j["n_seq"] = a.n_seq;
    j["max_sequence_length"] = a.max_sequence_length;
    j["sequence_bound"] = a.sequence_bound;
    j["max_adjacent_overlap"] = a.max_adjacent_overlap;
    j["y_gram_min_eig"] = a.y_gram_min_eig;
    j["claim1_residual_sq"] = a.claim1_residual_sq;
    j["max_eigvec_residual"] = a.max_eigvec_residual;
    j["eigvec_bound"] = a.eigvec_bound;
  }
  return j;
}

json result_to_json(const CommutingPairResult& r, bool include_matrices) {
  json j;
  j["mode"] = r.mode;
  j["dim"] = r.V.rows();
  j["delta"] = r.delta;
  j["Delta"] = r.Delta;
  j["n_cut"] = r.n_cut;
  j["L"] = r.L;
  j["scale_factor"] = r.scale_factor;
  j["err_A"] = r.err_A;
  j["err_B"] = r.err_B;
  j["err_H"] = r.err_H;
  j["err_X"] = r.err_X;
  j["offdiag_norm"] = r.offdiag_norm;
  j["predicted_offdiag"] = r.predicted_offdiag;
  j["commutator_residual"] = r.commutator_residual;
  j["max_eps3"] = r.max_eps3;
  j["max_eps4"] = r.max_eps4;
  j["max_eps5"] = r.max_eps5;
  j["h_norm"] = r.h_norm;
  j["new_block_dims"] = dims_json(r.new_block_dims);
  j["intervals"] = json::array();
  for (const SubspaceAudit& a : r.intervals) j["intervals"].push_back(audit_to_json(a));
  j["runtime_seconds"] = r.runtime_seconds;
  if (include_matrices) {
    j["a_prime"] = vector_to_json(r.a_prime);
    j["b_prime"] = vector_to_json(r.b_prime);
    j["V"] = matrix_to_json(r.V);
  }
  return j;
}

json certificate_to_json(const Certificate& c) {
  auto point = [](const GridPoint& p, bool third) {
    json j;
    j[third ? "y" : "b"] = p.b;
    j["x"] = p.x;
    j["G_in"] = p.G_in;
    j["G_out"] = p.G_out;
    return j;
  };
  const bool third = c.simulation == "third";
  json j;
  j["simulation"] = c.simulation;
  j["pass"] = c.pass;
  j["max_G"] = c.max_G;
  j["argmax"] = point(c.argmax, third);
  if (!third) {
    j["max_G_low_region"] = c.max_G_low_region;
    j["argmax_low_region"] = point(c.argmax_low_region, third);
  }
  j["low_threshold"] = c.low_threshold;
  j["high_threshold"] = c.high_threshold;
  j["margin"] = c.margin;
  j["lipschitz"] = c.lipschitz;
  j["points"] = c.points;
  j["skipped"] = c.skipped;
  j["denominator_failures"] = c.denominator_failures;
  return j;
}

json induction_to_json(const InductionReport& r) {
  json j;
  j["G0_unit"] = r.G0_unit;
  j["G0_shifted"] = r.G0_shifted;
  j["base_unit"] = r.base_unit;
  j["base_shifted"] = r.base_shifted;
  j["large_coupling_step"] = r.large_coupling_step;
  j["small_coupling_step"] = r.small_coupling_step;
  j["conclusion_unit"] = r.conclusion_unit;
  j["conclusion_shifted"] = r.conclusion_shifted;
  j["horizon"] = r.horizon;
  return j;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, int min_points) {
  if (x.size() != y.size()) throw InvalidParameter("fit_loglog needs equally long inputs");
  if (min_points < 3) throw InvalidParameter("a slope interval needs at least 3 points");
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k] > 0.0 && y[k] > 0.0 && std::isfinite(x[k]) && std::isfinite(y[k])) {
      lx.push_back(std::log(x[k]));
      ly.push_back(std::log(y[k]));
    }
  SlopeFit f;
  f.points = static_cast<int>(lx.size());
  if (f.points < min_points) return f;
  const double n = f.points;
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (!(sxx > 0.0)) return f;
  f.fitted = true;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double r = ly[k] - f.intercept - f.slope * lx[k];
    ssr += r * r;
  }
  f.std_error = std::sqrt(ssr / (n - 2) / sxx);
  const boost::math::students_t_distribution<double> t(n - 2);
  const double q = boost::math::quantile(boost::math::complement(t, 0.025));
  f.ci_low = f.slope - q * f.std_error;
  f.ci_high = f.slope + q * f.std_error;
  return f;
}

ScalingReport run_scaling_study(const std::string& family, const std::vector<double>& sizes, const SolveOptions& opts,
                                std::uint64_t seed, int seeds_per_size) {
  if (sizes.size() < 4) throw InvalidParameter("a scaling study needs at least 4 sizes");
  if (seeds_per_size < 1) throw InvalidParameter("seeds_per_size must be positive");
  ScalingReport rep;
  rep.family = family;
  rep.requested_mode = to_string(opts.mode);
  struct Job {
    double param;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double param : sizes)
    for (int s = 0; s < seeds_per_size; ++s) jobs.push_back({param, seed + static_cast<std::uint64_t>(s)});
  // one worker per instance; each solve runs single-threaded
  SolveOptions inner = opts;
  inner.threads = 1;
  rep.rows = parallel_map(
      jobs.size(),
      [&](std::size_t k) {
        const Job& job = jobs[k];
        const Instance in = family_instance(family, job.param, job.seed);
        const CommutingPairResult r = solve(in.A(), in.B(), inner);
        ScalingRow row;
        row.family = family;
        row.param = job.param;
        row.seed = job.seed;
        row.dim = in.A().dim();
        row.mode = r.mode;
        row.delta = r.delta;
        row.Delta = r.Delta;
        row.n_cut = r.n_cut;
        row.L = r.L;
        row.err_A = r.err_A;
        row.err_B = r.err_B;
        row.offdiag_norm = r.offdiag_norm;
        row.predicted_offdiag = r.predicted_offdiag;
        row.commutator_residual = r.commutator_residual;
        row.err_X = r.err_X;
        row.runtime_seconds = r.runtime_seconds;
        return row;
      },
      opts.threads);
  std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const ScalingRow& a, const ScalingRow& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    if (a.param != b.param) return a.param < b.param;
    return a.seed < b.seed;
  });

  struct Group {
    double param, delta, err;
  };
  std::vector<Group> groups;
  for (double param : sizes) {
    if (std::any_of(groups.begin(), groups.end(), [&](const Group& g) { return g.param == param; })) continue;
    std::vector<double> d, e;
    for (const ScalingRow& row : rep.rows)
      if (row.param == param) {
        d.push_back(row.delta);
        e.push_back(row.err());
      }
    groups.push_back({param, median(d), median(e)});
  }
  std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.delta > b.delta; });
  rep.median_nonincreasing = true;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    rep.params.push_back(groups[k].param);
    rep.median_delta.push_back(groups[k].delta);
    rep.median_err.push_back(groups[k].err);
    if (k > 0 && groups[k].err > groups[k - 1].err + 1e-12) rep.median_nonincreasing = false;
  }
  rep.fit = fit_loglog(rep.median_delta, rep.median_err);
  return rep;
}

std::string scaling_csv(const ScalingReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "family,param,seed,dim,mode,delta,Delta,n_cut,L,err_A,err_B,err_max,offdiag_norm,predicted_offdiag,"
        "commutator_residual,runtime_seconds\n";
  for (const ScalingRow& row : r.rows) {
    os << row.family << ',' << row.param << ',' << row.seed << ',' << row.dim << ',' << row.mode << ',' << row.delta
       << ',' << row.Delta << ',' << row.n_cut << ',' << row.L << ',' << row.err_A << ',' << row.err_B << ','
       << row.err() << ',' << row.offdiag_norm << ',' << row.predicted_offdiag << ',' << row.commutator_residual
       << ',' << row.runtime_seconds << '\n';
  }
  return os.str();
}

json scaling_to_json(const ScalingReport& r, bool include_timing) {
  json j;
  j["family"] = r.family;
  j["requested_mode"] = r.requested_mode;
  j["rows"] = json::array();
  for (const ScalingRow& row : r.rows) {
    json x;
    x["param"] = row.param;
    x["seed"] = row.seed;
    x["dim"] = row.dim;
    x["mode"] = row.mode;
    x["delta"] = row.delta;
    x["Delta"] = row.Delta;
    x["n_cut"] = row.n_cut;
    x["L"] = row.L;
    x["err_A"] = row.err_A;
    x["err_B"] = row.err_B;
    x["err_max"] = row.err();
    x["offdiag_norm"] = row.offdiag_norm;
    x["predicted_offdiag"] = row.predicted_offdiag;
    x["commutator_residual"] = row.commutator_residual;
    x["err_X"] = row.err_X;
    if (include_timing) x["runtime_seconds"] = row.runtime_seconds;
    j["rows"].push_back(x);
  }
  j["params"] = r.params;
  j["median_delta"] = r.median_delta;
  j["median_err"] = r.median_err;
  j["median_nonincreasing"] = r.median_nonincreasing;
  json f;
  f["fitted"] = r.fit.fitted;
  f["points"] = r.fit.points;
  if (r.fit.fitted) {
    f["slope"] = r.fit.slope;
    f["intercept"] = r.fit.intercept;
    f["std_error"] = r.fit.std_error;
    f["ci95"] = {r.fit.ci_low, r.fit.ci_high};
  }
  j["fit"] = f;
  return j;
}

LrStudy run_lr_study(int instances, std::uint64_t seed, double range_factor) {
  if (instances < 1) throw InvalidParameter("instances must be positive");
  if (!(range_factor > 0.0)) throw InvalidParameter("range factor must be positive");
  LrStudy st;
  st.instances = instances;
  st.range_factor = range_factor;
  for (int i = 0; i < instances; ++i) {
    const std::uint64_t sd = seed + static_cast<std::uint64_t>(i);
    const int n_blocks = 16 + static_cast<int>(sd % 3) * 8;
    const Index bs = 2 + static_cast<Index>(sd % 4) * 2;
    const Instance in = random_block_tridiag(n_blocks, bs, sd);
    const double spacing = 2.0 / n_blocks;
    const GridRounding g = construct_X(in.B(), spacing);
    const double range = range_factor * spacing;
    const Index nb = g.partition.num_blocks();
    for (Index first = 0; first < 3; ++first) {
      for (Index k = first + 1; k < nb; ++k) {
        const std::vector<Index> s1 = range_of(0, first), s2 = range_of(k, nb - 1);
        const double dist = block_distance(g.partition, s1, s2);
        if (dist / range < 4 || dist / range > 25) continue;
        const double tmax = lr_time_limit(dist, range);
        for (double frac : {0.25, 1.0}) {
          const double leak = lr_leakage_norm(in.A(), g.partition, s1, s2, frac * tmax);
          const double bound = lr_bound(dist, range);
          ++st.checks;
          if (leak > bound) ++st.violations;
          st.max_ratio = std::max(st.max_ratio, leak / bound);
        }
      }
    }
  }
  return st;
}

json lr_to_json(const LrStudy& s) {
  json j;
  j["instances"] = s.instances;
  j["checks"] = s.checks;
  j["violations"] = s.violations;
  j["max_ratio"] = s.max_ratio;
  j["range_factor"] = s.range_factor;
  j["pass"] = s.violations == 0 && s.checks > 0;
  return j;
}

PovmReport povm_report(const std::vector<HermitianMatrix>& ops, std::optional<int> n_win, int samples,
                       std::uint64_t seed, const std::optional<CMatrix>& rho_in) {
  const PovmScheme s(ops, n_win);
  const CMatrix rho = rho_in ? *rho_in : CMatrix(CMatrix::Identity(s.dim(), s.dim()) / static_cast<double>(s.dim()));
  PovmReport r;
  r.delta = s.delta();
  r.n_win = s.n_win();
  r.kappa = s.kappa();
  r.num_operators = s.num_operators();
  r.scale_factors = s.scale_factors();
  r.completeness_residual = s.completeness_residual();
  std::vector<double> errs;
  if (s.outcome_count() <= kMaxEnumeratedOutcomes) {
    r.ms_error_exact = exact_measurement(s, rho).ms_error;
    const PovmElementCheck c = check_elements(s);
    r.positivity_min_eig = c.min_eigenvalue;
    r.completeness_residual = std::max(r.completeness_residual, c.completeness_residual);
    errs = *r.ms_error_exact;
  }
  if (samples > 0) {
    const MonteCarloMeasurement mc = monte_carlo_ms_error(s, rho, samples, seed);
    r.ms_error_mc = mc.ms_error;
    r.mc_std_error = mc.std_error;
    r.samples = samples;
    if (errs.empty()) errs = mc.ms_error;
  }
  if (!errs.empty() && s.num_operators() >= 2 && s.delta() > 0.0)
    r.bound_ratio = *std::max_element(errs.begin(), errs.end()) / ((s.num_operators() - 1) * s.delta());
  return r;
}

json povm_to_json(const PovmReport& r) {
  json j;
  j["delta"] = r.delta;
  j["n_win"] = r.n_win;
  j["kappa"] = r.kappa;
  j["num_operators"] = r.num_operators;
  j["ms_error_exact"] = r.ms_error_exact ? json(*r.ms_error_exact) : json(nullptr);
  j["ms_error_mc"] = r.ms_error_mc;
  j["mc_std_error"] = r.mc_std_error;
  j["samples"] = r.samples;
  j["bound_ratio"] = r.bound_ratio;
  j["completeness_residual"] = r.completeness_residual;
  j["positivity_min_eig"] = r.positivity_min_eig ? json(*r.positivity_min_eig) : json(nullptr);
  j["scale_factors"] = r.scale_factors;
  return j;
}

}  // namespace cpair
