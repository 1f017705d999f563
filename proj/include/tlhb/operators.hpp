#pragma once

#include <optional>

#include "tlhb/model_problems.hpp"

namespace tlhb {

enum class SmootherKind { ExactAs, Jacobi, GaussSeidel, SymGaussSeidel, Custom };

/// Local smoother M_s with its derived matrices:
///   A_s     = S^T A S
///   M_bar   = M_s (M_s + M_s^T - A_s)^{-1} M_s^T
///   M_tilde = M_s^T (M_s + M_s^T - A_s)^{-1} M_s
/// Construction certifies that M_s + M_s^T - A_s is SPD.
struct Smoother {
  Matrix M_s;
  SpdMatrix A_s;
  SpdMatrix M_bar;
  SpdMatrix M_tilde;
};

/// Builds a smoother for the pair (A, S); the certificate
/// lambda_min(M_s + M_s^T - A_s) > 1e-12 * ||A_s||_2 must hold,
/// otherwise NotConvergent is thrown.
Smoother build_smoother(const SpdMatrix& A, const Matrix& S, SmootherKind kind,
                        const Matrix* custom = nullptr);

inline Smoother build_smoother(const TwoLevelDecomposition& dec,
                               SmootherKind kind,
                               const Matrix* custom = nullptr) {
  return build_smoother(dec.A, dec.S, kind, custom);
}

/// Galerkin coarse-grid matrix P^T A P.
SpdMatrix galerkin_coarse(const TwoLevelDecomposition& dec);

/// A-orthogonal projection onto Range(P): P A_c^{-1} P^T A.
Matrix projection_pi_a(const TwoLevelDecomposition& dec);

/// Extreme eigenvalues (alpha, beta) of B_c^{-1} A_c, computed on the
/// symmetric form B_c^{-1/2} A_c B_c^{-1/2}.
std::pair<double, double> coarse_spectrum_bounds(
    const TwoLevelDecomposition& dec, const SpdMatrix& B_c);

/// Exact coarse solver (A_c itself) or an SPD approximation B_c with
/// its spectrum bounds alpha = lambda_min(B_c^{-1} A_c),
/// beta = lambda_max(B_c^{-1} A_c).
struct CoarseSolver {
  std::optional<SpdMatrix> B_c;  // absent <=> exact
  double alpha = 1.0;
  double beta = 1.0;

  static CoarseSolver exact() { return {}; }
  static CoarseSolver approximate(const TwoLevelDecomposition& dec,
                                  SpdMatrix b_c);
  bool is_exact() const { return !B_c.has_value(); }
};

}  // namespace tlhb
