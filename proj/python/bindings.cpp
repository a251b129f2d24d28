#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "cpair/assembly.hpp"
#include "cpair/errors.hpp"
#include "cpair/filters.hpp"
#include "cpair/instances.hpp"
#include "cpair/povm.hpp"
#include "cpair/recursion.hpp"
#include "cpair/report.hpp"

namespace py = pybind11;
using namespace cpair;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

std::vector<HermitianMatrix> wrap_all(const std::vector<CMatrix>& ms) {
  std::vector<HermitianMatrix> out;
  for (const CMatrix& m : ms) out.push_back(checked_hermitian(m));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nearby commuting pairs for almost-commuting Hermitian matrices";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "solve",
      [](const CMatrix& A, const CMatrix& B, const std::string& mode, double delta_floor, unsigned threads,
         double Delta, int n_cut) {
        SolveOptions so;
        so.mode = parse_mode(mode);
        so.delta_floor = delta_floor;
        so.threads = threads;
        so.Delta_override = Delta;
        so.n_cut_override = n_cut;
        CommutingPairResult r;
        {
          py::gil_scoped_release nogil;
          r = solve(checked_hermitian(A), checked_hermitian(B), so);
        }
        py::dict out = to_python(result_to_json(r));
        out["V"] = r.V;
        out["a_prime"] = r.a_prime;
        out["b_prime"] = r.b_prime;
        return out;
      },
      py::arg("A"), py::arg("B"), py::arg("mode") = "auto", py::arg("delta_floor") = 1e-6, py::arg("threads") = 0,
      py::arg("Delta") = 0.0, py::arg("n_cut") = 0,
      "Commuting pair near (A, B). Returns the report dict plus V, a_prime, b_prime.");

  m.def(
      "generate",
      [](const std::string& kind, int N, double S, Index dim, int n_blocks, Index block_size, double epsilon,
         std::uint64_t seed) {
        InstanceSpec s;
        s.kind = kind;
        s.N = N;
        s.S = S;
        s.dim = dim;
        s.n_blocks = n_blocks;
        s.block_size = block_size;
        s.epsilon = epsilon;
        s.seed = seed;
        std::vector<CMatrix> ops;
        for (const HermitianMatrix& h : generate(s).ops) ops.push_back(h.entries());
        return ops;
      },
      py::arg("kind"), py::arg("N") = 64, py::arg("S") = 5.0, py::arg("dim") = 16, py::arg("n_blocks") = 16,
      py::arg("block_size") = 4, py::arg("epsilon") = 0.05, py::arg("seed") = 0,
      "Built-in instance as a list of matrices (A, B and C for spin_triple).");

  m.def(
      "commutator_norm", [](const CMatrix& a, const CMatrix& b) { return commutator_norm(a, b); }, py::arg("A"),
      py::arg("B"));
  m.def(
      "op_norm", [](const CMatrix& a) { return op_norm(a); }, py::arg("M"));

  m.def(
      "verify_lemma4",
      [](double lambda, double grid, unsigned threads) {
        RecursionParams p;
        p.lambda = lambda;
        p.grid_spacing = grid;
        p.threads = threads;
        nlohmann::json j;
        {
          py::gil_scoped_release nogil;
          const Certificate c1 = run_first_simulation(p), c2 = run_second_simulation(p),
                            c3 = run_third_simulation(p);
          const InductionReport ind = induction_check(c1, c2, c3, p);
          j["certificates"] = {certificate_to_json(c1), certificate_to_json(c2), certificate_to_json(c3)};
          j["induction"] = induction_to_json(ind);
          j["pass"] = c1.pass && c2.pass && c3.pass && ind.conclusion_unit && ind.conclusion_shifted;
        }
        j["lambda"] = lambda;
        j["grid_spacing"] = grid;
        return to_python(j);
      },
      py::arg("lambda_") = 0.02, py::arg("grid") = 1e-4, py::arg("threads") = 0);

  m.def(
      "povm_report",
      [](const std::vector<CMatrix>& ops, std::optional<int> n_win, int samples, std::uint64_t seed,
         std::optional<CMatrix> rho) {
        const std::vector<HermitianMatrix> hs = wrap_all(ops);
        PovmReport r;
        {
          py::gil_scoped_release nogil;
          r = povm_report(hs, n_win, samples, seed, rho);
        }
        return to_python(povm_to_json(r));
      },
      py::arg("operators"), py::arg("n_win") = py::none(), py::arg("samples") = 10000, py::arg("seed") = 0,
      py::arg("rho") = py::none(), "Soft simultaneous measurement summary (maximally mixed state by default).");

  m.def(
      "check_lr",
      [](int instances, std::uint64_t seed, double range_factor) {
        LrStudy s;
        {
          py::gil_scoped_release nogil;
          s = run_lr_study(instances, seed, range_factor);
        }
        return to_python(lr_to_json(s));
      },
      py::arg("instances") = 20, py::arg("seed") = 0, py::arg("range_factor") = 2.0);

  m.def(
      "scaling_study",
      [](const std::string& family, const std::vector<double>& sizes, const std::string& mode, std::uint64_t seed,
         int seeds, unsigned threads) {
        SolveOptions so;
        so.mode = parse_mode(mode);
        so.threads = threads;
        ScalingReport r;
        {
          py::gil_scoped_release nogil;
          r = run_scaling_study(family, sizes, so, seed, seeds);
        }
        py::dict out = to_python(scaling_to_json(r));
        out["csv"] = scaling_csv(r);
        return out;
      },
      py::arg("family"), py::arg("sizes"), py::arg("mode") = "auto", py::arg("seed") = 0, py::arg("seeds") = 1,
      py::arg("threads") = 0);

  m.def("partition_check", &partition_check, py::arg("n_win"), py::arg("grid_points") = 100001);
  m.def(
      "smooth_filter",
      [](double center, double radius, double width, double omega) {
        return smooth_filter({center, radius, width}, omega);
      },
      py::arg("center"), py::arg("radius"), py::arg("width"), py::arg("omega"));
  m.def("c0", [] { return compute_c0().value; });
}
