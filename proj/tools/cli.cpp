#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cpair/assembly.hpp"
#include "cpair/errors.hpp"
#include "cpair/instances.hpp"
#include "cpair/json_io.hpp"
#include "cpair/povm.hpp"
#include "cpair/recursion.hpp"
#include "cpair/report.hpp"

namespace cpair {

namespace {

using nlohmann::json;

struct InstanceFlags {
  std::string kind = "uniform_chain";
  InstanceSpec spec;

  void add(CLI::App* app) {
    app->add_option("--kind", kind, "uniform_chain | spin_pair | spin_triple | random_pair | random_block_tridiag")
        ->check(CLI::IsMember({"uniform_chain", "spin_pair", "spin_triple", "random_pair", "random_block_tridiag"}));
    app->add_option("--N", spec.N, "chain length");
    app->add_option("--S", spec.S, "spin");
    app->add_option("--dim", spec.dim, "random_pair dimension");
    app->add_option("--blocks", spec.n_blocks, "random_block_tridiag block count");
    app->add_option("--block-size", spec.block_size, "block size");
    app->add_option("--epsilon", spec.epsilon, "random_pair perturbation");
  }

  Instance make(std::uint64_t seed) {
    spec.kind = kind;
    spec.seed = seed;
    return generate(spec);
  }
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> parse_sizes(const std::string& s) {
  std::vector<double> out;
  for (const std::string& t : split_commas(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw InvalidParameter("bad size '" + t + "'");
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InvalidParameter("cannot write " + path);
  f << text;
}

class UsageError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nearby commuting pairs for almost-commuting Hermitian matrices"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string mode_name = "auto";
  double delta_floor = 1e-6;
  unsigned threads = 0;
  bool as_json = false, as_csv = false;
  auto add_common = [&](CLI::App* sub, bool solver) {
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    sub->add_flag("--json", as_json, "print JSON");
    if (solver) {
      sub->add_option("--mode", mode_name, "auto | block | tridiag")->check(CLI::IsMember({"auto", "block", "tridiag"}));
      sub->add_option("--delta-floor", delta_floor, "lower clamp on Delta");
    }
  };

  // generate
  CLI::App* gen = app.add_subcommand("generate", "write an instance as matrix JSON files");
  InstanceFlags gen_flags;
  gen_flags.add(gen);
  std::string out_dir = ".";
  gen->add_option("--out-dir", out_dir, "directory for A.json, B.json (C.json)");
  add_common(gen, false);

  // commute
  CLI::App* com = app.add_subcommand("commute", "construct a nearby commuting pair");
  InstanceFlags com_flags;
  com_flags.add(com);
  std::string inputs;
  std::string basis_out;
  bool with_matrices = false;
  com->add_option("--in", inputs, "A.json,B.json");
  com->add_option("--out", basis_out, "write V, a', b' to this JSON file");
  com->add_flag("--matrices", with_matrices, "include V, a', b' in the printed JSON");
  add_common(com, true);

  // scaling-study
  CLI::App* sc = app.add_subcommand("scaling-study", "solve a family of instances and fit the error slope");
  std::string family = "uniform_chain", sizes_arg = "64,128,256,512";
  std::string out_prefix;
  int seeds_per_size = 1;
  sc->add_option("--family", family, "uniform_chain | spin_pair | random_pair | random_block_tridiag");
  sc->add_option("--sizes", sizes_arg, "comma-separated sizes (at least 4)");
  sc->add_option("--seeds", seeds_per_size, "instances per size");
  sc->add_option("--out-prefix", out_prefix, "write PREFIX.csv and PREFIX.json");
  sc->add_flag("--csv", as_csv, "print CSV");
  add_common(sc, true);

  // verify-lemma4
  CLI::App* vl = app.add_subcommand("verify-lemma4", "grid verification of the G_n recursion bound");
  RecursionParams rp;
  vl->add_option("--lambda", rp.lambda, "shift lambda");
  vl->add_option("--grid", rp.grid_spacing, "grid spacing");
  add_common(vl, false);

  // povm-sim
  CLI::App* pv = app.add_subcommand("povm-sim", "soft simultaneous measurement of several observables");
  InstanceFlags pv_flags;
  pv_flags.add(pv);
  std::string operators;
  int nwin = 0, samples = 10000;
  pv->add_option("--operators", operators, "file1.json,file2.json,...");
  pv->add_option("--nwin", nwin, "window count override");
  pv->add_option("--samples", samples, "Monte Carlo samples (0 = none)");
  add_common(pv, false);

  // check-lr
  CLI::App* lr = app.add_subcommand("check-lr", "Lieb-Robinson leakage on random block-tridiagonal H");
  int lr_instances = 20;
  double range_factor = 2.0;
  lr->add_option("--instances", lr_instances, "number of random instances");
  lr->add_option("--range-factor", range_factor, "H range in units of the block spacing");
  add_common(lr, false);

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      std::ostringstream o, e2;
      const int code = app.exit(e, o, e2);
      out << o.str();
      err << e2.str();
      return code == 0 ? 0 : 1;
    }

    SolveOptions so;
    so.mode = parse_mode(mode_name);
    so.delta_floor = delta_floor;
    so.threads = threads;

    if (gen->parsed()) {
      const Instance in = gen_flags.make(seed);
      std::filesystem::create_directories(out_dir);
      const char* names[] = {"A.json", "B.json", "C.json"};
      json files = json::array();
      for (std::size_t k = 0; k < in.ops.size() && k < 3; ++k) {
        const std::string path = (std::filesystem::path(out_dir) / names[k]).string();
        write_matrix_file(path, in.ops[k].entries());
        files.push_back(path);
      }
      json j{{"description", in.description}, {"dim", in.A().dim()}, {"files", files}, {"scale_factors", in.scale_factors}};
      out << j.dump(2) << '\n';
      return 0;
    }

    if (com->parsed()) {
      Instance in;
      if (!inputs.empty()) {
        const std::vector<std::string> files = split_commas(inputs);
        if (files.size() != 2) throw UsageError("commute --in needs exactly two files: A.json,B.json");
        InstanceSpec s;
        s.kind = "from_files";
        s.files = files;
        in = generate(s);
      } else {
        in = com_flags.make(seed);
      }
      const CommutingPairResult r = solve(in.A(), in.B(), so);
      if (!basis_out.empty()) write_text(basis_out, result_to_json(r, true).dump(2) + "\n");
      if (as_json) {
        out << result_to_json(r, with_matrices).dump(2) << '\n';
      } else {
        out << "mode " << r.mode << "  dim " << r.V.rows() << "  delta " << r.delta << "  Delta " << r.Delta
            << "  n_cut " << r.n_cut << '\n'
            << "err_A " << r.err_A << "  err_B " << r.err_B << "  offdiag " << r.offdiag_norm
            << "  commutator_residual " << r.commutator_residual << '\n';
      }
      return 0;
    }

    if (sc->parsed()) {
      const ScalingReport rep = run_scaling_study(family, parse_sizes(sizes_arg), so, seed, seeds_per_size);
      if (!out_prefix.empty()) {
        write_text(out_prefix + ".csv", scaling_csv(rep));
        write_text(out_prefix + ".json", scaling_to_json(rep).dump(2) + "\n");
      }
      if (as_csv) {
        out << scaling_csv(rep);
      } else if (as_json) {
        out << scaling_to_json(rep).dump(2) << '\n';
      } else {
        for (std::size_t k = 0; k < rep.params.size(); ++k)
          out << rep.family << ' ' << rep.params[k] << "  delta " << rep.median_delta[k] << "  err " << rep.median_err[k]
              << '\n';
        out << "median non-increasing: " << (rep.median_nonincreasing ? "yes" : "no") << '\n';
        if (rep.fit.fitted)
          out << "slope " << rep.fit.slope << "  95% CI [" << rep.fit.ci_low << ", " << rep.fit.ci_high << "]\n";
      }
      return 0;
    }

    if (vl->parsed()) {
      rp.threads = threads;
      const Certificate c1 = run_first_simulation(rp), c2 = run_second_simulation(rp), c3 = run_third_simulation(rp);
      const InductionReport ind = induction_check(c1, c2, c3, rp);
      const bool pass = c1.pass && c2.pass && c3.pass && ind.conclusion_unit && ind.conclusion_shifted;
      json j;
      j["lambda"] = rp.lambda;
      j["grid_spacing"] = rp.grid_spacing;
      j["certificates"] = {certificate_to_json(c1), certificate_to_json(c2), certificate_to_json(c3)};
      j["induction"] = induction_to_json(ind);
      j["pass"] = pass;
      out << j.dump(2) << '\n';
      return pass ? 0 : 2;
    }

    if (pv->parsed()) {
      std::vector<HermitianMatrix> ops;
      if (!operators.empty()) {
        for (const std::string& f : split_commas(operators)) ops.push_back(read_matrix_file(f));
      } else {
        ops = pv_flags.make(seed).ops;
      }
      std::optional<int> nw;
      if (nwin > 0) nw = nwin;
      out << povm_to_json(povm_report(ops, nw, samples, seed)).dump(2) << '\n';
      return 0;
    }

    if (lr->parsed()) {
      const LrStudy st = run_lr_study(lr_instances, seed, range_factor);
      out << lr_to_json(st).dump(2) << '\n';
      return st.violations == 0 && st.checks > 0 ? 0 : 2;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << com->help();
    return 1;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace cpair
