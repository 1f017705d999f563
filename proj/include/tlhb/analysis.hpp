#pragma once

#include <optional>

#include "tlhb/method.hpp"

namespace tlhb {

/// ||E||_A = largest singular value of A^{1/2} E A^{-1/2}.
double operator_a_norm(const Matrix& e, const SpdMatrix& a);

/// Exact-coarse iteration matrix (I - S M_s^{-T} S^T A)(I - Pi_A)
/// (I - S M_s^{-1} S^T A) for the given decomposition and smoother.
Matrix exact_iteration_matrix(const TwoLevelDecomposition& dec,
                              const Smoother& sm);

/// sigma_TL = smallest positive eigenvalue of
/// Mt^{-1/2} S^T A (I - Pi_A) S Mt^{-1/2}, with the zero multiplicity
/// n_s + n_c - n known structurally.
double sigma_tl(const TwoLevelDecomposition& dec, const Smoother& sm);

/// ||E_TL||_A for the exact coarse solver, computed as the largest
/// eigenvalue of the SPSD matrix A^{1/2} E_TL A^{-1/2}.
double norm_etl_exact(const TwoLevelDecomposition& dec, const Smoother& sm);

/// Structural spectrum of E_TL: n_c exact zeros plus {1 - nu_i}, where
/// nu_i are the positive eigenvalues of Mt^{-1} S^T A (I - Pi_A) S.
/// Cross-validated against the directly assembled E_TL (1e-8).
Spectrum spectrum_etl(const TwoLevelDecomposition& dec, const Smoother& sm);

/// C.B.S. constant: largest singular value of
/// A_s^{-1/2} S^T A P A_c^{-1/2}.
double cbs_constant(const TwoLevelDecomposition& dec);

/// K_TL = 1 / lambda_min(Mt^{-1/2} S^T A (I - Pi_A) S Mt^{-1/2}) in the
/// square nonsingular case; throws NotSquareCase otherwise.
double k_tl(const TwoLevelDecomposition& dec, const Smoother& sm);

/// Convergence-optimal interpolation for preselected (A, S, M_s):
/// columns of P_star are the A-orthonormal eigenvectors of
/// S Mt^{-1} S^T A belonging to the n_c smallest eigenvalues;
/// bound = 1 - mu_{n_c+1} is the attained minimum of ||E_TL||_A.
struct OptimalInterpolation {
  Matrix P_star;
  double bound;
  std::vector<double> mu;  // full ascending eigenvalue list
};
OptimalInterpolation optimal_interpolation(const SpdMatrix& a, const Matrix& s,
                                           const Smoother& sm,
                                           Eigen::Index n_c);

/// Verifies Range(P) is contained in Range(P_hat) and rank(S P_hat) = n,
/// then returns (sigma_TL for P, sigma_TL for P_hat). Coarse-space
/// monotonicity asserts first <= second.
std::pair<double, double> monotonicity_check(const TwoLevelDecomposition& dec,
                                             const Smoother& sm,
                                             const Matrix& p_hat);

/// Extreme eigenvalues of (I - S Mt^{-1} S^T A)(I - Pi_A) and
/// (I - S Mt^{-1} S^T A) Pi_A, via the SPSD congruence with
/// (A^{-1} - S Mt^{-1} S^T)^{1/2}. theta is defined only when
/// rank(S^T A P) = n_c.
struct Lemma41Quantities {
  double lmin_complement;
  double lmax_complement;
  double lmin_proj;
  double lmax_proj;
  std::optional<double> theta;
  int rank_stap;
};
Lemma41Quantities lemma41_quantities(const TwoLevelDecomposition& dec,
                                     const Smoother& sm);

enum class RankCase { FullRank, RankDeficient };
enum class Regime { BetaLe1, Straddle, AlphaGt1 };

/// Two-sided bounds for ||Etilde_TL||_A with an inexact coarse solver,
/// selected by rank(S^T A P) and the position of (alpha, beta) relative
/// to 1. observed is the actual A-norm; the sandwich
/// lower <= observed <= upper is asserted (BoundViolation otherwise).
struct InexactBounds {
  double alpha;
  double beta;
  RankCase rank_case;
  Regime regime;
  double lower;
  double upper;
  double observed;
  std::optional<double> theta;
  double mu_max;  // lambda_max(Mt^{-1} A_s)
  double sigma;   // sigma_TL of the exact method
};
InexactBounds inexact_bounds(const TwoLevelDecomposition& dec,
                             const Smoother& sm, const SpdMatrix& b_c);

/// Classical upper bound 1 - 1/(K_TL + delta/(1 - gamma^2)) with
/// delta = 1/alpha - 1; defined only in the square case with beta <= 1
/// and gamma < 1 (absent otherwise, including the vacuous gamma = 1
/// regime).
std::optional<double> fvz_inexact_bound(const TwoLevelDecomposition& dec,
                                        const Smoother& sm,
                                        const SpdMatrix& b_c);

/// ||Etilde_TL||_A via the preconditioner spectrum:
/// max{lambda_max(Btilde^{-1} A) - 1, 1 - lambda_min(Btilde^{-1} A)}.
double norm_etl_inexact(const TlhbOperator& op);

/// Everything the exact theory provides, in one record.
struct ExactAnalysis {
  double sigma_tl;
  double norm_etl;
  Spectrum spectrum_etl;
  double gamma;
  std::optional<double> k_tl;  // square case only
  std::vector<double> nu;      // positive eigenvalues, ascending
};
ExactAnalysis analyze_exact(const TwoLevelDecomposition& dec,
                            const Smoother& sm);

}  // namespace tlhb
