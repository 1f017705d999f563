#pragma once

#include <vector>

#include "tlhb/operators.hpp"

namespace tlhb {

/// One configured instance of the two-level iteration: decomposition,
/// local smoother, and coarse solver. Immutable after construction;
/// sweeps and solves are reentrant.
class TlhbOperator {
 public:
  TlhbOperator(TwoLevelDecomposition dec, Smoother smoother,
               CoarseSolver coarse);

  const TwoLevelDecomposition& dec() const { return dec_; }
  const Smoother& smoother() const { return smoother_; }
  const CoarseSolver& coarse() const { return coarse_; }
  const SpdMatrix& A_c() const { return a_c_; }

  /// One sweep: presmoothing with M_s^{-1}, restriction, coarse
  /// correction with B_c^{-1} (A_c^{-1} when exact), interpolation,
  /// postsmoothing with M_s^{-T}.
  Vector sweep(const Vector& u0, const Vector& f) const;

  /// Error propagation matrix
  /// (I - S M_s^{-T} S^T A)(I - P B_c^{-1} P^T A)(I - S M_s^{-1} S^T A).
  Matrix iteration_matrix() const;

  /// Preconditioner action via the additive two-term expression
  /// S Mbar^{-1} S^T r + (I - S M_s^{-T} S^T A) P B_c^{-1} P^T
  ///   (I - A S M_s^{-1} S^T) r.
  Vector apply_preconditioner(const Vector& r) const;

  /// Dense preconditioner inverse assembled through the hierarchical
  /// factorization (S P) Bhat^{-1} (S P)^T with
  /// Bhat = unit-lower * blockdiag(Mbar, B_c) * unit-upper.
  Matrix hierarchical_preconditioner_matrix() const;

  /// Coarse solve with B_c (or A_c when exact).
  Vector coarse_solve(const Vector& r_c) const;

 private:
  TwoLevelDecomposition dec_;
  Smoother smoother_;
  CoarseSolver coarse_;
  SpdMatrix a_c_;
  Eigen::PartialPivLU<Matrix> ms_lu_;   // factors M_s
  Eigen::PartialPivLU<Matrix> mst_lu_;  // factors M_s^T
};

/// Per-sweep record of a stationary solve.
struct SolveHistory {
  std::vector<double> a_norm_errors;      // per sweep, incl. initial
  std::vector<double> residual_norms;     // Euclidean, incl. initial
  std::vector<double> contraction_ratios; // consecutive A-norm ratios
};

struct SolveResult {
  Vector u;
  SolveHistory history;
  bool converged = false;
  int sweeps = 0;
};

/// Iterates sweeps until ||f - A u|| <= tol * ||f|| or max_sweeps.
/// A-norm errors are tracked against the dense exact solution.
SolveResult solve(const TlhbOperator& op, const Vector& f, const Vector& u0,
                  double tol, int max_sweeps);

}  // namespace tlhb
