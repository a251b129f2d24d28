#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct Invocation {
  int code;
  std::string out, err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "cpair");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cpair::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json strip_timing(nlohmann::json j) {
  j.erase("runtime_seconds");
  return j;
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("cpair_cli_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"commute", "--bogus"}).code, 1);
  EXPECT_EQ(run({"commute", "--kind", "no_such"}).code, 1);
  const Invocation r = run({"commute", "--in", "only_one.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("exactly two files"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ValidationExitCode) {
  EXPECT_EQ(run({"commute", "--kind", "uniform_chain", "--N", "0"}).code, 1);
  EXPECT_EQ(run({"commute", "--in", "missing_a.json,missing_b.json"}).code, 1);
  EXPECT_EQ(run({"verify-lemma4", "--grid", "0.5"}).code, 1);
  EXPECT_EQ(run({"scaling-study", "--sizes", "8,16"}).code, 1);
}

TEST(Cli, ForcedTridiagOnBlockInstanceIsRejected) {
  const Invocation r = run({"commute", "--kind", "random_pair", "--dim", "16", "--mode", "tridiag"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("block mode"), std::string::npos);
}

TEST(Cli, GenerateThenCommuteMatchesDirect) {
  const auto dir = scratch("gen");
  const Invocation g = run({"generate", "--kind", "random_pair", "--dim", "8", "--seed", "4", "--out-dir", dir.string()});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "A.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "B.json"));

  const std::string files = (dir / "A.json").string() + "," + (dir / "B.json").string();
  const Invocation a = run({"commute", "--in", files, "--json"});
  const Invocation b = run({"commute", "--kind", "random_pair", "--dim", "8", "--seed", "4", "--json"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const auto ja = nlohmann::json::parse(a.out), jb = nlohmann::json::parse(b.out);
  EXPECT_EQ(ja["n_cut"], jb["n_cut"]);
  EXPECT_NEAR(ja["err_A"].get<double>(), jb["err_A"].get<double>(), 1e-12);
  EXPECT_NEAR(ja["err_B"].get<double>(), jb["err_B"].get<double>(), 1e-12);
  std::filesystem::remove_all(dir);
}

TEST(Cli, CommuteJsonDeterministicAndBasisFile) {
  const auto dir = scratch("basis");
  const std::string out_file = (dir / "basis.json").string();
  const std::vector<std::string> args{"commute", "--kind", "spin_pair", "--S", "6", "--json", "--out", out_file};
  const Invocation a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(strip_timing(nlohmann::json::parse(a.out)), strip_timing(nlohmann::json::parse(b.out)));
  std::ifstream f(out_file);
  const auto basis = nlohmann::json::parse(f);
  EXPECT_TRUE(basis.contains("V"));
  EXPECT_TRUE(basis.contains("a_prime"));
  EXPECT_FALSE(nlohmann::json::parse(a.out).contains("V"));
  std::filesystem::remove_all(dir);
}

TEST(Cli, VerifyCoarseGrid) {
  const Invocation r = run({"verify-lemma4", "--grid", "0.01"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["certificates"].size(), 3u);
}

TEST(Cli, ScalingCsvAndPrefix) {
  const auto dir = scratch("scaling");
  const std::string prefix = (dir / "chain").string();
  const Invocation r = run({"scaling-study", "--family", "uniform_chain", "--sizes", "16,24,32,48", "--csv", "--out-prefix",
                     prefix});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("family,param,seed,", 0), 0u);
  EXPECT_TRUE(std::filesystem::exists(prefix + ".csv"));
  std::ifstream f(prefix + ".json");
  EXPECT_EQ(nlohmann::json::parse(f)["rows"].size(), 4u);
  std::filesystem::remove_all(dir);
}

TEST(Cli, PovmAndLr) {
  const Invocation p = run({"povm-sim", "--kind", "spin_pair", "--S", "5", "--samples", "200", "--seed", "2"});
  ASSERT_EQ(p.code, 0) << p.err;
  const auto jp = nlohmann::json::parse(p.out);
  EXPECT_EQ(jp["num_operators"].get<int>(), 2);
  EXPECT_EQ(jp, nlohmann::json::parse(run({"povm-sim", "--kind", "spin_pair", "--S", "5", "--samples", "200",
                                           "--seed", "2"})
                                          .out));
  const Invocation l = run({"check-lr", "--instances", "1"});
  EXPECT_EQ(l.code, 0) << l.err;
  EXPECT_TRUE(nlohmann::json::parse(l.out)["pass"].get<bool>());
}
