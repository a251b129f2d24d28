#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "cpair/errors.hpp"
#include "cpair/instances.hpp"
#include "cpair/json_io.hpp"

using namespace cpair;

TEST(Instances, UniformChain) {
  const Instance in = uniform_chain(32);
  EXPECT_LE(op_norm(in.A()), 1.0);
  EXPECT_DOUBLE_EQ(op_norm(in.B()), 1.0);
  // [A, B] has entries +-1/(2N) on the off-diagonals.
  const double d = commutator_norm(in.A(), in.B());
  EXPECT_GT(d, 0.5 / 32);
  EXPECT_LE(d, 1.0 / 32 + 1e-14);
  EXPECT_THROW(uniform_chain(0), InvalidParameter);
}

TEST(Instances, SpinAlgebra) {
  for (double S : {0.5, 1.0, 2.5, 5.0}) {
    const std::vector<CMatrix> s = spin_matrices(S);
    const Index n = s[0].rows();
    EXPECT_EQ(n, static_cast<Index>(2 * S + 1));
    const CMatrix comm = s[0] * s[1] - s[1] * s[0];
    EXPECT_LE((comm - cplx(0, 1) * s[2]).norm(), 1e-12);
    const CMatrix casimir = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
    EXPECT_LE((casimir - S * (S + 1) * CMatrix::Identity(n, n)).norm(), 1e-10);
  }
  EXPECT_THROW(spin_matrices(0.3), InvalidParameter);
  EXPECT_THROW(spin_matrices(0.0), InvalidParameter);
}

TEST(Instances, SpinPairNormalization) {
  const Instance in = spin_pair(10);
  EXPECT_NEAR(op_norm(in.A()), 1.0, 1e-12);
  EXPECT_NEAR(op_norm(in.B()), 1.0, 1e-12);
  EXPECT_NEAR(commutator_norm(in.A(), in.B()), 0.1, 1e-12);
  EXPECT_EQ(spin_triple(3).ops.size(), 3u);
}

TEST(Instances, HaarUnitary) {
  const CMatrix q = haar_unitary(20, 7);
  EXPECT_LE((q.adjoint() * q - CMatrix::Identity(20, 20)).norm(), 1e-12);
  EXPECT_EQ(q, haar_unitary(20, 7));
  EXPECT_NE(q, haar_unitary(20, 8));
}

TEST(Instances, RandomPairDeterministicAndAlmostCommuting) {
  const Instance a = random_pair(20, 3), b = random_pair(20, 3);
  EXPECT_EQ(a.A().entries(), b.A().entries());
  EXPECT_LE(op_norm(a.A()), 1.0 + 1e-12);
  EXPECT_LE(op_norm(a.B()), 1.0 + 1e-12);
  const Instance exact = random_pair(20, 3, 0.0);
  EXPECT_LE(commutator_norm(exact.A(), exact.B()), 1e-12);
  EXPECT_GT(commutator_norm(a.A(), a.B()), 1e-6);
}

TEST(Instances, BlockTridiagStructure) {
  const Instance in = random_block_tridiag(6, 3, 1);
  const CMatrix& h = in.A().entries();
  EXPECT_NEAR(op_norm(in.A()), 1.0, 1e-12);
  for (Index r = 0; r < 18; ++r)
    for (Index c = 0; c < 18; ++c)
      if (std::abs(r / 3 - c / 3) > 1) EXPECT_EQ(h(r, c), cplx(0, 0));
  EXPECT_DOUBLE_EQ(in.B()(0, 0).real(), -1.0);
  EXPECT_DOUBLE_EQ(in.B()(17, 17).real(), -1.0 + 2.0 * 5 / 6);
}

TEST(Instances, GenerateDispatch) {
  InstanceSpec s;
  s.kind = "spin_pair";
  s.S = 2;
  EXPECT_EQ(generate(s).A().dim(), 5);
  s.kind = "nope";
  EXPECT_THROW(generate(s), InvalidParameter);
  s.kind = "from_files";
  EXPECT_THROW(generate(s), InvalidParameter);
}

TEST(JsonIo, RoundTrip) {
  const CMatrix m = random_hermitian(5, 2);
  const CMatrix back = matrix_from_json(matrix_to_json(m));
  EXPECT_EQ(back, m);
  const auto dir = std::filesystem::temp_directory_path() / "cpair_json_test";
  std::filesystem::create_directories(dir);
  const std::string fa = (dir / "a.json").string(), fb = (dir / "b.json").string();
  write_matrix_file(fa, m);
  write_matrix_file(fb, CMatrix(2.0 * random_hermitian(5, 3)));
  EXPECT_LE((read_matrix_file(fa).entries() - m).norm(), 1e-15);
  InstanceSpec s;
  s.kind = "from_files";
  s.files = {fa, fb};
  const Instance in = generate(s);
  EXPECT_EQ(in.ops.size(), 2u);
  EXPECT_LE(op_norm(in.B()), 1.0 + 1e-12);
  std::filesystem::remove_all(dir);
}

TEST(JsonIo, RealOnlyAndErrors) {
  const nlohmann::json j = nlohmann::json::parse(R"({"n": 2, "re": [[1, 2], [2, 3]]})");
  const CMatrix m = matrix_from_json(j);
  EXPECT_EQ(m(0, 1), cplx(2, 0));
  EXPECT_THROW(matrix_from_json(nlohmann::json::parse(R"({"n": 2, "re": [[1, 2]]})")), InvalidMatrix);
  EXPECT_THROW(matrix_from_json(nlohmann::json::parse(R"({"re": [[1]]})")), InvalidMatrix);
  EXPECT_THROW(matrix_from_json(nlohmann::json::parse(R"({"n": 1, "re": [["x"]]})")), InvalidMatrix);
  EXPECT_THROW(matrix_to_json(CMatrix(2, 3)), InvalidMatrix);
  EXPECT_THROW(read_matrix_file("/nonexistent/m.json"), InvalidParameter);
  const auto dir = std::filesystem::temp_directory_path() / "cpair_json_nonherm";
  std::filesystem::create_directories(dir);
  const std::string f = (dir / "m.json").string();
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  write_matrix_file(f, bad);
  EXPECT_THROW(read_matrix_file(f), InvalidMatrix);
  std::filesystem::remove_all(dir);
}
