#include "tlhb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace tlhb {

namespace {

/// Symmetric form Mt^{-1/2} S^T A (I - Pi_A) S Mt^{-1/2}; its spectrum
/// equals that of Mt^{-1} S^T A (I - Pi_A) S.
Matrix smoothed_complement_form(const TwoLevelDecomposition& dec,
                                const Smoother& sm) {
  const Matrix pi_a = projection_pi_a(dec);
  const Matrix core =
      dec.S.transpose() * dec.A.mat() *
      (Matrix::Identity(dec.n(), dec.n()) - pi_a) * dec.S;
  const Matrix x = spd_sqrt_inv(sm.M_tilde);
  Matrix g = x * 0.5 * (core + core.transpose()) * x;
  return 0.5 * (g + g.transpose().eval());
}

double lambda_max_mu(const Smoother& sm) {
  const Matrix x = spd_sqrt_inv(sm.M_tilde);
  const Matrix g = x * sm.A_s.mat() * x;
  return sym_eigenvalues(g).eigenvalues.back();
}

/// theta = lambda_min^+(S Mt^{-1} S^T A Pi_A), computed as lambda_min of
/// A_c^{-1/2} P^T A S Mt^{-1} S^T A P A_c^{-1/2} (full-rank case only).
double theta_full_rank(const TwoLevelDecomposition& dec, const Smoother& sm) {
  const SpdMatrix a_c = galerkin_coarse(dec);
  const Matrix sap = dec.S.transpose() * dec.A.mat() * dec.P;  // n_s x n_c
  const Matrix y = spd_sqrt_inv(a_c);
  const Matrix core = sap.transpose() * sm.M_tilde.solve(sap);
  Matrix g = y * 0.5 * (core + core.transpose()) * y;
  g = 0.5 * (g + g.transpose().eval());
  return sym_eigenvalues(g).eigenvalues.front();
}

}  // namespace

double operator_a_norm(const Matrix& e, const SpdMatrix& a) {
  const Matrix sq = spd_sqrt(a);
  const Matrix sq_inv = spd_sqrt_inv(a);
  return spectral_norm(sq * e * sq_inv);
}

Matrix exact_iteration_matrix(const TwoLevelDecomposition& dec,
                              const Smoother& sm) {
  TlhbOperator op(dec, sm, CoarseSolver::exact());
  return op.iteration_matrix();
}

double sigma_tl(const TwoLevelDecomposition& dec, const Smoother& sm) {
  const Spectrum spec = sym_eigenvalues(smoothed_complement_form(dec, sm));
  const int zero_count = static_cast<int>(dec.n_s() + dec.n_c() - dec.n());
  return lambda_min_plus(spec, zero_count);
}

double norm_etl_exact(const TwoLevelDecomposition& dec, const Smoother& sm) {
  const Matrix e = exact_iteration_matrix(dec, sm);
  const Matrix sq = spd_sqrt(dec.A);
  const Matrix sq_inv = spd_sqrt_inv(dec.A);
  Matrix sym = sq * e * sq_inv;
  sym = 0.5 * (sym + sym.transpose().eval());
  return std::max(0.0, sym_eigenvalues(sym).eigenvalues.back());
}

Spectrum spectrum_etl(const TwoLevelDecomposition& dec, const Smoother& sm) {
  const Spectrum g_spec = sym_eigenvalues(smoothed_complement_form(dec, sm));
  const int zero_count = static_cast<int>(dec.n_s() + dec.n_c() - dec.n());
  lambda_min_plus(g_spec, zero_count);  // separation sanity check

  Spectrum out;
  out.zero_count = static_cast<int>(dec.n_c());
  out.eigenvalues.assign(dec.n_c(), 0.0);
  for (std::size_t i = zero_count; i < g_spec.eigenvalues.size(); ++i)
    out.eigenvalues.push_back(1.0 - g_spec.eigenvalues[i]);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());

  // Cross-validate against the assembled E_TL through its A-similar
  // symmetric form.
  const Matrix e = exact_iteration_matrix(dec, sm);
  const Matrix sq = spd_sqrt(dec.A);
  const Matrix sq_inv = spd_sqrt_inv(dec.A);
  Matrix sym = sq * e * sq_inv;
  sym = 0.5 * (sym + sym.transpose().eval());
  const Spectrum direct = sym_eigenvalues(sym);
  for (std::size_t i = 0; i < out.eigenvalues.size(); ++i) {
    if (std::abs(out.eigenvalues[i] - direct.eigenvalues[i]) > 1e-8)
      throw BoundViolation(
          "spectrum_etl: structural spectrum disagrees with assembled E_TL");
  }
  return out;
}

double cbs_constant(const TwoLevelDecomposition& dec) {
  Matrix a_s = dec.S.transpose() * dec.A.mat() * dec.S;
  a_s = 0.5 * (a_s + a_s.transpose().eval());
  const SpdMatrix a_s_spd(a_s);
  const SpdMatrix a_c = galerkin_coarse(dec);
  const Matrix sap = dec.S.transpose() * dec.A.mat() * dec.P;
  return spectral_norm(spd_sqrt_inv(a_s_spd) * sap * spd_sqrt_inv(a_c));
}

double k_tl(const TwoLevelDecomposition& dec, const Smoother& sm) {
  if (!dec.square_case())
    throw NotSquareCase("k_tl: requires n_s + n_c = n with (S P) nonsingular");
  const Spectrum spec = sym_eigenvalues(smoothed_complement_form(dec, sm));
  const double lmin = lambda_min_plus(spec, 0);
  return 1.0 / lmin;
}

OptimalInterpolation optimal_interpolation(const SpdMatrix& a, const Matrix& s,
                                           const Smoother& sm,
                                           Eigen::Index n_c) {
  const Eigen::Index n = a.dim();
  const Eigen::Index n_s = s.cols();
  if (!(n - n_s <= n_c && n_c < n))
    throw InvalidCoarseSize(
        "optimal_interpolation: need n - n_s <= n_c < n");

  const Matrix sq = spd_sqrt(a);
  const Matrix sq_inv = spd_sqrt_inv(a);
  // A^{1/2} S Mt^{-1} S^T A^{1/2}: same eigenvalues as S Mt^{-1} S^T A,
  // and its eigenvectors map to A-orthonormal ones via A^{-1/2}.
  Matrix w = sq * (s * sm.M_tilde.solve(Matrix(s.transpose()))) * sq;
  w = 0.5 * (w + w.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Matrix> es(w);
  if (es.info() != Eigen::Success)
    throw Error("optimal_interpolation: eigensolver failed");

  OptimalInterpolation out;
  out.mu.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  out.P_star = sq_inv * es.eigenvectors().leftCols(n_c);
  out.bound = 1.0 - out.mu[static_cast<std::size_t>(n_c)];
  return out;
}

std::pair<double, double> monotonicity_check(const TwoLevelDecomposition& dec,
                                             const Smoother& sm,
                                             const Matrix& p_hat) {
  if (p_hat.rows() != dec.n())
    throw InvalidSize("monotonicity_check: P_hat row count mismatch");
  // Range(P) within Range(P_hat): least-squares residual must vanish.
  const Matrix coeff = p_hat.colPivHouseholderQr().solve(dec.P);
  const double resid = spectral_norm(dec.P - p_hat * coeff);
  if (resid > 1e-10)
    throw NotNested("monotonicity_check: Range(P) not within Range(P_hat)");

  TwoLevelDecomposition dec_hat(dec.A, dec.S, p_hat);
  return {sigma_tl(dec, sm), sigma_tl(dec_hat, sm)};
}

Lemma41Quantities lemma41_quantities(const TwoLevelDecomposition& dec,
                                     const Smoother& sm) {
  const Eigen::Index n = dec.n();
  const Matrix a_inv = dec.A.solve(Matrix::Identity(n, n));
  Matrix c = a_inv - dec.S * sm.M_tilde.solve(Matrix(dec.S.transpose()));
  c = 0.5 * (c + c.transpose().eval());
  Matrix c_half;
  try {
    c_half = spsd_sqrt(c);
  } catch (const SingularComplement&) {
    throw SingularComplement(
        "lemma41_quantities: A^{-1} - S Mt^{-1} S^T is indefinite; the "
        "smoother assumption is violated");
  }

  const Matrix pi_a = projection_pi_a(dec);
  const Matrix id = Matrix::Identity(n, n);

  auto sym_extremes = [&](const Matrix& mid) {
    Matrix t = c_half * dec.A.mat() * mid * c_half;
    t = 0.5 * (t + t.transpose().eval());
    const Spectrum spec = sym_eigenvalues(t);
    return std::pair<double, double>(spec.eigenvalues.front(),
                                     spec.eigenvalues.back());
  };

  Lemma41Quantities out{};
  std::tie(out.lmin_complement, out.lmax_complement) = sym_extremes(id - pi_a);
  std::tie(out.lmin_proj, out.lmax_proj) = sym_extremes(pi_a);

  const Matrix sap = dec.S.transpose() * dec.A.mat() * dec.P;
  out.rank_stap = numerical_rank(sap);
  if (out.rank_stap == dec.n_c()) out.theta = theta_full_rank(dec, sm);
  return out;
}

namespace {

struct BoundTable {
  double lower;
  double upper;
};

BoundTable bounds_full_rank(Regime regime, double alpha, double beta,
                            double sigma, double theta, double mu_max) {
  switch (regime) {
    case Regime::BetaLe1:
      return {1.0 - std::min(beta - beta * theta, sigma),
              1.0 - alpha * sigma};
    case Regime::Straddle:
      return {1.0 - std::min(mu_max, beta * sigma),
              std::max(1.0 - alpha * sigma, (beta - 1.0) * (1.0 - theta))};
    case Regime::AlphaGt1:
      return {std::max({alpha - 1.0 - alpha * theta, 1.0 - mu_max,
                        (alpha - 1.0) * (1.0 - mu_max), 1.0 - beta * sigma}),
              std::max(1.0 - sigma, (beta - 1.0) * (1.0 - theta))};
  }
  throw Error("bounds_full_rank: bad regime");
}

BoundTable bounds_rank_deficient(Regime regime, double alpha, double beta,
                                 double sigma, double mu_max) {
  switch (regime) {
    case Regime::BetaLe1:
      return {1.0 - std::min(beta, sigma), 1.0 - alpha * sigma};
    case Regime::Straddle:
      return {1.0 - std::min(mu_max, beta * sigma),
              std::max(1.0 - alpha * sigma, beta - 1.0)};
    case Regime::AlphaGt1:
      return {std::max({alpha - 1.0, 1.0 - mu_max, 1.0 - beta * sigma}),
              std::max(1.0 - sigma, beta - 1.0)};
  }
  throw Error("bounds_rank_deficient: bad regime");
}

}  // namespace

double norm_etl_inexact(const TlhbOperator& op) {
  const Matrix b_inv = op.hierarchical_preconditioner_matrix();
  const SpdMatrix& a = op.dec().A;
  const Matrix sq = spd_sqrt(a);
  Matrix t = sq * b_inv * sq;
  t = 0.5 * (t + t.transpose().eval());
  const Spectrum spec = sym_eigenvalues(t);
  return std::max(spec.eigenvalues.back() - 1.0,
                  1.0 - spec.eigenvalues.front());
}

InexactBounds inexact_bounds(const TwoLevelDecomposition& dec,
                             const Smoother& sm, const SpdMatrix& b_c) {
  InexactBounds out{};
  std::tie(out.alpha, out.beta) = coarse_spectrum_bounds(dec, b_c);
  out.sigma = sigma_tl(dec, sm);
  out.mu_max = lambda_max_mu(sm);

  const Matrix sap = dec.S.transpose() * dec.A.mat() * dec.P;
  const bool full_rank = numerical_rank(sap) == dec.n_c();
  out.rank_case = full_rank ? RankCase::FullRank : RankCase::RankDeficient;
  if (full_rank) out.theta = theta_full_rank(dec, sm);

  // Nominal regime by exact comparison; at the 1e-12 boundary both
  // applicable tables are evaluated and the tighter sandwich kept.
  if (out.beta <= 1.0)
    out.regime = Regime::BetaLe1;
  else if (out.alpha <= 1.0)
    out.regime = Regime::Straddle;
  else
    out.regime = Regime::AlphaGt1;

  constexpr double kBoundaryTol = 1e-12;
  std::vector<Regime> applicable;
  if (out.beta <= 1.0 + kBoundaryTol) applicable.push_back(Regime::BetaLe1);
  if (out.alpha <= 1.0 + kBoundaryTol && out.beta >= 1.0 - kBoundaryTol)
    applicable.push_back(Regime::Straddle);
  if (out.alpha >= 1.0 - kBoundaryTol) applicable.push_back(Regime::AlphaGt1);

  out.lower = -std::numeric_limits<double>::infinity();
  out.upper = std::numeric_limits<double>::infinity();
  for (Regime reg : applicable) {
    const BoundTable bt =
        full_rank ? bounds_full_rank(reg, out.alpha, out.beta, out.sigma,
                                     *out.theta, out.mu_max)
                  : bounds_rank_deficient(reg, out.alpha, out.beta, out.sigma,
                                          out.mu_max);
    out.lower = std::max(out.lower, bt.lower);
    out.upper = std::min(out.upper, bt.upper);
  }

  TlhbOperator op(dec, sm, CoarseSolver::approximate(dec, b_c));
  out.observed = norm_etl_inexact(op);

  if (!(out.lower - 1e-10 <= out.observed && out.observed <= out.upper + 1e-10))
    throw BoundViolation(
        "inexact_bounds: the two-sided bound sandwich failed numerically");
  return out;
}

std::optional<double> fvz_inexact_bound(const TwoLevelDecomposition& dec,
                                        const Smoother& sm,
                                        const SpdMatrix& b_c) {
  if (!dec.square_case()) return std::nullopt;
  const double gamma = cbs_constant(dec);
  if (gamma >= 1.0 - 1e-10) return std::nullopt;  // bound is vacuous
  auto [alpha, beta] = coarse_spectrum_bounds(dec, b_c);
  if (beta > 1.0 + 1e-12) return std::nullopt;
  const double delta = 1.0 / alpha - 1.0;
  const double k = k_tl(dec, sm);
  return 1.0 - 1.0 / (k + delta / (1.0 - gamma * gamma));
}

ExactAnalysis analyze_exact(const TwoLevelDecomposition& dec,
                            const Smoother& sm) {
  ExactAnalysis out{};
  const Spectrum g_spec = sym_eigenvalues(smoothed_complement_form(dec, sm));
  const int zero_count = static_cast<int>(dec.n_s() + dec.n_c() - dec.n());
  out.sigma_tl = lambda_min_plus(g_spec, zero_count);
  out.nu.assign(g_spec.eigenvalues.begin() + zero_count,
                g_spec.eigenvalues.end());
  out.norm_etl = norm_etl_exact(dec, sm);
  out.spectrum_etl = spectrum_etl(dec, sm);
  out.gamma = cbs_constant(dec);
  if (dec.square_case()) out.k_tl = 1.0 / out.sigma_tl;
  return out;
}

}  // namespace tlhb
