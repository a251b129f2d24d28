#pragma once

// Test-instance generators. All built-in generators return operators of
// norm at most 1 and are deterministic for a fixed seed.

#include <cstdint>
#include <string>
#include <vector>

#include "cpair/matrix.hpp"

namespace cpair {

struct InstanceSpec {
  std::string kind = "uniform_chain";  // uniform_chain | spin_pair | spin_triple | random_pair
                                       // | random_block_tridiag | from_files
  int N = 64;                          // chain length
  double S = 5.0;                      // spin (integer or half-integer)
  Index dim = 16;                      // random_pair dimension
  int n_blocks = 16;                   // random_block_tridiag
  Index block_size = 4;
  double epsilon = 0.05;               // random_pair perturbation strength
  std::uint64_t seed = 0;
  std::vector<std::string> files;
};

struct Instance {
  std::vector<HermitianMatrix> ops;    // A, B (and C for spin_triple)
  std::string description;
  std::vector<double> scale_factors;   // divisor applied to each operator

  const HermitianMatrix& A() const { return ops.at(0); }
  const HermitianMatrix& B() const { return ops.at(1); }
};

/// A = (off-diagonal ones)/2, B = diag(1/N, ..., N/N).
Instance uniform_chain(int N);

/// S_x, S_y, S_z in the S_z basis, unnormalized.
std::vector<CMatrix> spin_matrices(double S);
Instance spin_pair(double S);
Instance spin_triple(double S);

/// Haar-random common eigenbasis of two diagonal matrices, plus an
/// epsilon-sized random Hermitian perturbation on diagonal blocks.
Instance random_pair(Index dim, std::uint64_t seed, double epsilon = 0.05, Index block_size = 4);

/// Gaussian block-tridiagonal A (nearest-neighbour blocks only) and
/// B = diag of block positions -1 + 2j/n_blocks.
Instance random_block_tridiag(int n_blocks, Index block_size, std::uint64_t seed);

/// Haar-distributed unitary (QR of a complex Gaussian matrix with the
/// phases of R fixed).
CMatrix haar_unitary(Index n, std::uint64_t seed);
CMatrix random_hermitian(Index n, std::uint64_t seed);

Instance generate(const InstanceSpec& spec);

}  // namespace cpair
