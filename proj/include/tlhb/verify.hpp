#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tlhb/analysis.hpp"

namespace tlhb::verify {

/// Fault injection for harness self-tests: MTildeSignError flips the
/// sign of A_s inside the symmetrized smoother, so every identity that
/// involves M_tilde must start failing.
enum class Mutation { None, MTildeSignError };

struct SuiteResult {
  std::string name;
  int passed = 0;
  int failed = 0;
  double worst_residual = 0.0;
  std::string first_failure;
  /// Matrices of the first failing instance, for reproduction.
  std::vector<std::pair<std::string, Matrix>> dump;

  bool ok() const { return failed == 0 && passed > 0; }
};

/// A generated test instance: decomposition + smoother, with the seed
/// that reproduces it.
struct Instance {
  TwoLevelDecomposition dec;
  Smoother smoother;
  SmootherKind kind;
  std::string desc;
  std::uint64_t seed;
};

/// Deterministic instance generator cycling through
/// {lap1d, lap2d, random SPD} x {Jacobi, GS, SGS, ExactAs} x
/// {square, overlap} splittings. Jacobi falls back to a damped diagonal
/// when the plain diagonal fails the convergence certificate.
Instance make_instance(std::uint64_t master_seed, int index,
                       Mutation mutation = Mutation::None,
                       Eigen::Index max_n = 48);

/// Rebuilds a smoother of the given kind with the mutation applied.
Smoother build_mutated_smoother(const SpdMatrix& a, const Matrix& s,
                                SmootherKind kind, Mutation mutation);

// Property suites. count = number of instances; seed drives generation.
SuiteResult suite_identity(int count, std::uint64_t seed,
                           Mutation mutation = Mutation::None);
SuiteResult suite_spectrum(int count, std::uint64_t seed);
SuiteResult suite_optimal(int count, std::uint64_t seed);
SuiteResult suite_monotonicity(int count, std::uint64_t seed);
SuiteResult suite_lemma41(int count, std::uint64_t seed);
SuiteResult suite_bounds(int count_per_cell, std::uint64_t seed);
SuiteResult suite_preconditioner(int count, std::uint64_t seed);

std::vector<SuiteResult> run_all(int count, std::uint64_t seed);

}  // namespace tlhb::verify
