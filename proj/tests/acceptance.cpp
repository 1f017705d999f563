// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <string>

#include "tlhb/analysis.hpp"
#include "tlhb/rng.hpp"
#include "tlhb/verify.hpp"

using namespace tlhb;
using namespace tlhb::verify;

namespace {

int g_failures = 0;

void report(int index, const std::string& what, bool ok,
            const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", index,
              what.c_str(), detail.c_str());
  if (!ok) ++g_failures;
}

std::string suite_detail(const SuiteResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d passed, %d failed, worst %.3e%s%s",
                r.passed, r.failed, r.worst_residual,
                r.first_failure.empty() ? "" : "; ",
                r.first_failure.c_str());
  return buf;
}

// 3: with the exact subspace smoother in the square case the A-norm of
// the error propagator equals the squared C.B.S. constant; in the
// overlapping regime the C.B.S. constant is exactly 1.
void criterion_gamma(std::uint64_t seed) {
  double worst = 0.0;
  std::string note;
  bool ok = true;
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index n = 8 + 3 * t;
    const Eigen::Index n_s = n / 2 + 1;
    SpdMatrix a = random_spd(n, seed + t, 30.0);
    auto sp = overlapping_splitting(n, n_s, n - n_s, seed + 100 + t);
    const TwoLevelDecomposition dec(std::move(a), std::move(sp.S),
                                    std::move(sp.P));
    const Smoother sm = build_smoother(dec, SmootherKind::ExactAs);
    const double gamma = cbs_constant(dec);
    const double res = std::abs(norm_etl_exact(dec, sm) - gamma * gamma);
    worst = std::max(worst, res);
    if (res > 1e-10) ok = false;
  }
  const double gamma_plus = cbs_constant(make_d7_plus());
  const double res_plus = std::abs(gamma_plus - 1.0);
  worst = std::max(worst, res_plus);
  if (res_plus > 1e-10) ok = false;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "10 square instances + overlap instance, worst %.3e", worst);
  report(3, "||E||_A = gamma^2 with the exact subspace smoother", ok, buf);
}

// 8: condition-number identities and the classical inexact bound.
void criterion_k(std::uint64_t seed) {
  bool ok = true;
  double worst = 0.0;
  std::string note;
  for (int t = 0; t < 20 && ok; ++t) {
    const Eigen::Index n = 8 + 2 * t;
    const Eigen::Index n_s = n / 2 + 1;
    SpdMatrix a = (t % 2 == 0)
                      ? random_spd(n, seed + t, 40.0)
                      : laplacian_2d(n / 2, 2);
    const Eigen::Index nn = a.dim();
    auto sp = overlapping_splitting(nn, nn / 2 + 1, nn - (nn / 2 + 1),
                                    seed + 200 + t);
    const TwoLevelDecomposition dec(std::move(a), std::move(sp.S),
                                    std::move(sp.P));
    const Smoother sm = build_smoother(dec, SmootherKind::SymGaussSeidel);
    const double k = k_tl(dec, sm);
    const double sigma = sigma_tl(dec, sm);
    const double rec = std::abs(k * sigma - 1.0);
    worst = std::max(worst, rec);
    if (rec > 1e-10) {
      ok = false;
      note = "reciprocity";
      break;
    }
    const double gamma = cbs_constant(dec);
    const Matrix x = spd_sqrt_inv(sm.A_s);
    const double mu_max =
        sym_eigenvalues(x * sm.M_tilde.mat() * x).eigenvalues.back();
    if (gamma < 1.0 - 1e-12 &&
        k > mu_max / (1.0 - gamma * gamma) + 1e-10) {
      ok = false;
      note = "condition cap";
      break;
    }
    // Classical bound dominates the observed inexact norm (beta <= 1).
    const SpdMatrix a_c = galerkin_coarse(dec);
    const SpdMatrix b_c(1.5 * a_c.mat());
    const auto fvz = fvz_inexact_bound(dec, sm, b_c);
    if (fvz.has_value()) {
      const InexactBounds ib = inexact_bounds(dec, sm, b_c);
      if (*fvz < ib.observed - 1e-10) {
        ok = false;
        note = "classical bound below observed";
        break;
      }
    }
  }
  // Vacuous at gamma = 1: the classical bound must be reported absent.
  const TwoLevelDecomposition dp = make_d7_plus();
  const Smoother smp = build_smoother(dp, SmootherKind::SymGaussSeidel);
  const SpdMatrix bcp(1.5 * galerkin_coarse(dp).mat());
  if (fvz_inexact_bound(dp, smp, bcp).has_value()) {
    ok = false;
    note = "bound not vacuous at gamma = 1";
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "20 square instances, worst reciprocity %.3e%s%s", worst,
                note.empty() ? "" : "; ", note.c_str());
  report(8, "K_TL reciprocity, upper cap, classical inexact bound", ok, buf);
}

// 9: operator/solver consistency plus observed contraction vs theory,
// including the A-norm-worst initial error.
void check_rates(const TwoLevelDecomposition& dec, const Smoother& sm,
                 std::uint64_t seed, bool& ok, std::string& note,
                 double& worst_ratio, double& norm, double& max_ratio) {
  const TlhbOperator op(dec, sm, CoarseSolver::exact());
  norm = norm_etl_exact(dec, sm);
  const Matrix e = op.iteration_matrix();
  const Eigen::Index n = dec.n();

  // Worst start: error along the top right singular direction of
  // A^{1/2} E A^{-1/2}, mapped back to the original variables.
  const Matrix ah = spd_sqrt(dec.A);
  const Matrix ahi = spd_sqrt_inv(dec.A);
  Eigen::JacobiSVD<Matrix> svd(ah * e * ahi, Eigen::ComputeFullV);
  const Vector e0 = ahi * svd.matrixV().col(0);
  Rng rng(seed ^ 0x5eedULL);
  const Vector f = rng.gaussian_matrix(n, 1);
  const Vector u_star = dec.A.solve(f);

  auto a_norm = [&](const Vector& v) {
    return std::sqrt(v.dot(dec.A.mat() * v));
  };
  const Vector u1 = op.sweep(u_star + e0, f);
  worst_ratio = a_norm(u1 - u_star) / a_norm(e0);
  if (std::abs(worst_ratio - norm) > 1e-8) {
    ok = false;
    note = "worst-start contraction misses ||E||_A";
  }

  const SolveResult res = solve(op, f, Vector::Zero(n), 1e-8, 20000);
  if (!res.converged) {
    ok = false;
    note = "solve failed to converge";
  }
  max_ratio = 0.0;
  for (double r : res.history.contraction_ratios)
    max_ratio = std::max(max_ratio, r);
  if (max_ratio > norm + 0.01) {
    ok = false;
    note = "observed rate exceeds the proved norm";
  }
}

void criterion_solver(std::uint64_t seed) {
  SuiteResult pre = suite_preconditioner(30, seed);
  bool ok = pre.ok();
  std::string note = ok ? "" : pre.first_failure;

  // The classical 1d instance (a degenerate direct-solver case) and a
  // generic random instance with a genuinely contracting iteration.
  double wr7 = 0.0, n7 = 0.0, mr7 = 0.0;
  {
    const TwoLevelDecomposition d7 = make_d7();
    const Smoother sm = build_smoother(d7, SmootherKind::GaussSeidel);
    check_rates(d7, sm, seed, ok, note, wr7, n7, mr7);
  }
  double wr, nr, mr;
  {
    SpdMatrix a = random_spd(14, seed, 60.0);
    auto sp = overlapping_splitting(14, 8, 6, seed + 1);
    const TwoLevelDecomposition dec(std::move(a), std::move(sp.S),
                                    std::move(sp.P));
    const Smoother sm = build_smoother(dec, SmootherKind::SymGaussSeidel);
    check_rates(dec, sm, seed + 2, ok, note, wr, nr, mr);
    if (nr <= 1e-6) {
      ok = false;
      note = "generic instance unexpectedly trivial";
    }
  }
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "%s; 1d: worst-start %.3e vs norm %.3e; generic: worst-start "
                "%.12f vs norm %.12f, solve max ratio %.6f%s%s",
                suite_detail(pre).c_str(), wr7, n7, wr, nr, mr,
                note.empty() ? "" : "; ", note.c_str());
  report(9, "sweep/preconditioner/matrix consistency and observed rates", ok,
         buf);
}

// 10: fault injection must be caught by the identity suite quickly.
void criterion_mutation(std::uint64_t seed) {
  const SuiteResult r = suite_identity(10, seed, Mutation::MTildeSignError);
  const bool ok = r.failed > 0;
  report(10, "sign-flipped symmetrization is detected within 10 instances",
         ok, suite_detail(r));
}

}  // namespace

int main() {
  const std::uint64_t seed = 20240819;

  {
    const SuiteResult r = suite_identity(100, seed);
    report(1, "norm identity ||E_TL||_A = 1 - sigma_TL on 100 instances",
           r.ok(), suite_detail(r));
  }
  {
    const SuiteResult r = suite_spectrum(50, seed + 1);
    report(2, "structural spectrum of E_TL on 50 instances", r.ok(),
           suite_detail(r));
  }
  criterion_gamma(seed + 2);
  {
    const SuiteResult r = suite_optimal(30, seed + 3);
    report(4, "optimal interpolation attains its bound and is unbeaten",
           r.ok(), suite_detail(r));
  }
  {
    const SuiteResult r = suite_monotonicity(50, seed + 4);
    report(5, "coarse-space monotonicity of sigma_TL on 50 pairs", r.ok(),
           suite_detail(r));
  }
  {
    const SuiteResult r = suite_lemma41(30, seed + 5);
    report(6, "projection/complement spectral identities incl. rank-deficient",
           r.ok(), suite_detail(r));
  }
  {
    const SuiteResult r = suite_bounds(10, seed + 6);
    report(7, "two-sided inexact bounds over all rank/spectrum regimes",
           r.ok(), suite_detail(r));
  }
  criterion_k(seed + 7);
  criterion_solver(seed + 8);
  criterion_mutation(seed + 9);

  if (g_failures == 0) {
    std::printf("ACCEPTANCE: all criteria passed\n");
    return 0;
  }
  std::printf("ACCEPTANCE: %d criteria failed\n", g_failures);
  return 1;
}
