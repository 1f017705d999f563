#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "tlhb/analysis.hpp"
#include "tlhb/rng.hpp"

using namespace tlhb;

TEST_CASE("norm identity on the 1d model problem") {
  const TwoLevelDecomposition d7 = make_d7();
  for (SmootherKind kind : {SmootherKind::ExactAs, SmootherKind::GaussSeidel,
                            SmootherKind::SymGaussSeidel}) {
    const Smoother sm = build_smoother(d7, kind);
    const double sigma = sigma_tl(d7, sm);
    const double norm = norm_etl_exact(d7, sm);
    CHECK(sigma > 0.0);
    CHECK(sigma <= 1.0 + 1e-12);
    CHECK(std::abs(norm - (1.0 - sigma)) <= 1e-10);
  }
}

TEST_CASE("structural spectrum: n_c zeros plus 1 - nu") {
  SpdMatrix a = random_spd(10, 4, 60.0);
  auto sp = overlapping_splitting(10, 6, 4, 5);
  const TwoLevelDecomposition dec(std::move(a), std::move(sp.S),
                                  std::move(sp.P));
  const Smoother sm = build_smoother(dec, SmootherKind::GaussSeidel);
  const Spectrum spec = spectrum_etl(dec, sm);
  REQUIRE(spec.eigenvalues.size() == 10);
  CHECK(spec.zero_count == 4);
  // The structural zeros are stored as exact 0.0 (the list is sorted, so
  // tiny negative 1 - nu values may precede them).
  const auto exact_zeros =
      std::count(spec.eigenvalues.begin(), spec.eigenvalues.end(), 0.0);
  CHECK(exact_zeros >= spec.zero_count);
  for (double v : spec.eigenvalues) {
    CHECK(v >= -1e-12);
    CHECK(v < 1.0);
  }
}

TEST_CASE("exact subspace solve makes ||E||_A the squared C.B.S. constant") {
  // Generic square-case instance (the classical 1d splitting is exactly
  // A-orthogonal, so it exercises only the degenerate gamma = 0 corner).
  SpdMatrix a = random_spd(10, 3, 50.0);
  auto sp = overlapping_splitting(10, 6, 4, 2);
  const TwoLevelDecomposition dec(std::move(a), std::move(sp.S),
                                  std::move(sp.P));
  const Smoother sm = build_smoother(dec, SmootherKind::ExactAs);
  const double gamma = cbs_constant(dec);
  CHECK(gamma > 0.0);
  CHECK(gamma < 1.0);
  CHECK(std::abs(norm_etl_exact(dec, sm) - gamma * gamma) <= 1e-10);
}

TEST_CASE("the classical 1d splitting is exactly A-orthogonal") {
  const TwoLevelDecomposition d7 = make_d7();
  CHECK((d7.S.transpose() * d7.A.mat() * d7.P).norm() == 0.0);
  CHECK(cbs_constant(d7) == doctest::Approx(0.0).epsilon(1e-14));
  // With S^T A P = 0 the two-level method is a direct solver.
  const Smoother sm = build_smoother(d7, SmootherKind::GaussSeidel);
  CHECK(norm_etl_exact(d7, sm) <= 1e-12);
  CHECK(sigma_tl(d7, sm) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("overlapping coarse space forces a unit C.B.S. constant") {
  const TwoLevelDecomposition dp = make_d7_plus();
  CHECK(std::abs(cbs_constant(dp) - 1.0) <= 1e-10);
}

TEST_CASE("condition number reciprocity and its upper bound") {
  const TwoLevelDecomposition d7 = make_d7();
  const Smoother sm = build_smoother(d7, SmootherKind::GaussSeidel);
  const double k = k_tl(d7, sm);
  const double sigma = sigma_tl(d7, sm);
  CHECK(std::abs(k * sigma - 1.0) <= 1e-10);
  const double gamma = cbs_constant(d7);
  const auto ev = sym_eigenvalues(
      spd_sqrt_inv(sm.A_s) * sm.M_tilde.mat() * spd_sqrt_inv(sm.A_s));
  const double cap = ev.eigenvalues.back() / (1.0 - gamma * gamma);
  CHECK(k <= cap + 1e-10);

  const TwoLevelDecomposition dp = make_d7_plus();
  const Smoother smp = build_smoother(dp, SmootherKind::GaussSeidel);
  CHECK_THROWS_AS(k_tl(dp, smp), NotSquareCase);
}

TEST_CASE("optimal interpolation attains its bound and beats random spaces") {
  const TwoLevelDecomposition d7 = make_d7();
  const Smoother sm = build_smoother(d7, SmootherKind::GaussSeidel);
  const OptimalInterpolation oi =
      optimal_interpolation(d7.A, d7.S, sm, d7.n_c());
  const TwoLevelDecomposition best(d7.A, d7.S, oi.P_star);
  CHECK(std::abs(norm_etl_exact(best, sm) - oi.bound) <= 1e-10);
  // mu is ascending and bound = 1 - mu[n_c].
  CHECK(std::is_sorted(oi.mu.begin(), oi.mu.end()));
  CHECK(oi.bound == doctest::Approx(1.0 - oi.mu[d7.n_c()]).epsilon(1e-12));

  Rng rng(33);
  for (int t = 0; t < 10; ++t) {
    const Matrix p_rand =
        Eigen::HouseholderQR<Matrix>(rng.gaussian_matrix(7, 3))
            .householderQ() *
        Matrix::Identity(7, 3);
    Matrix joint(7, 11);
    joint << d7.S, p_rand;
    if (numerical_rank(joint) < 7) continue;
    const TwoLevelDecomposition cand(d7.A, d7.S, p_rand);
    CHECK(norm_etl_exact(cand, sm) >= oi.bound - 1e-10);
  }

  CHECK_THROWS_AS(optimal_interpolation(d7.A, d7.S, sm, 2),
                  InvalidCoarseSize);
  CHECK_THROWS_AS(optimal_interpolation(d7.A, d7.S, sm, 7),
                  InvalidCoarseSize);
}

TEST_CASE("coarse-space enlargement cannot decrease sigma") {
  const TwoLevelDecomposition d7 = make_d7();
  const Smoother sm = build_smoother(d7, SmootherKind::GaussSeidel);
  Rng rng(17);
  Matrix p_hat(7, 4);
  p_hat << d7.P, rng.gaussian_matrix(7, 1);
  const auto [s1, s2] = monotonicity_check(d7, sm, p_hat);
  CHECK(s1 <= s2 + 1e-12);

  // A non-nested candidate is rejected.
  const Matrix p_other = rng.gaussian_matrix(7, 3);
  CHECK_THROWS_AS(monotonicity_check(d7, sm, p_other), NotNested);
}

TEST_CASE("projection/complement spectra satisfy the coupling identities") {
  SpdMatrix a = random_spd(9, 5, 40.0);
  auto sp = overlapping_splitting(9, 5, 4, 6);
  const TwoLevelDecomposition dec(std::move(a), std::move(sp.S),
                                  std::move(sp.P));
  const Smoother sm = build_smoother(dec, SmootherKind::SymGaussSeidel);
  const Lemma41Quantities q = lemma41_quantities(dec, sm);
  CHECK(q.rank_stap == 4);
  REQUIRE(q.theta.has_value());
  const double sigma = sigma_tl(dec, sm);
  // Both products vanish on Range(P); their largest eigenvalues are
  // 1 - sigma and 1 - theta respectively, with 1 - theta >= sigma.
  CHECK(std::abs(q.lmin_complement) <= 1e-10);
  CHECK(std::abs(q.lmin_proj) <= 1e-10);
  CHECK(q.lmax_complement == doctest::Approx(1.0 - sigma).epsilon(1e-8));
  CHECK(q.lmax_proj == doctest::Approx(1.0 - *q.theta).epsilon(1e-8));
  CHECK(1.0 - *q.theta >= sigma - 1e-10);
}

TEST_CASE("inexact coarse solve: two-sided bounds and exact collapse") {
  const TwoLevelDecomposition d7 = make_d7();
  const Smoother sm = build_smoother(d7, SmootherKind::GaussSeidel);
  const SpdMatrix a_c = galerkin_coarse(d7);

  SUBCASE("strong coarse solver, beta <= 1") {
    const SpdMatrix b_c(1.25 * a_c.mat());
    const InexactBounds ib = inexact_bounds(d7, sm, b_c);
    CHECK(ib.regime == Regime::BetaLe1);
    CHECK(ib.lower <= ib.observed + 1e-10);
    CHECK(ib.observed <= ib.upper + 1e-10);
  }
  SUBCASE("weak coarse solver, 1 < alpha") {
    const SpdMatrix b_c(0.6 * a_c.mat());
    const InexactBounds ib = inexact_bounds(d7, sm, b_c);
    CHECK(ib.regime == Regime::AlphaGt1);
    CHECK(ib.lower <= ib.observed + 1e-10);
    CHECK(ib.observed <= ib.upper + 1e-10);
  }
  SUBCASE("collapse at the exact coarse solver") {
    const InexactBounds ib = inexact_bounds(d7, sm, a_c);
    const double expect = 1.0 - sigma_tl(d7, sm);
    CHECK(std::abs(ib.lower - expect) <= 1e-10);
    CHECK(std::abs(ib.upper - expect) <= 1e-10);
    CHECK(std::abs(ib.observed - expect) <= 1e-10);
  }
}

TEST_CASE("classical inexact upper bound dominates the observed norm") {
  const TwoLevelDecomposition d7 = make_d7();
  const Smoother sm = build_smoother(d7, SmootherKind::GaussSeidel);
  const SpdMatrix a_c = galerkin_coarse(d7);
  const SpdMatrix b_c(1.5 * a_c.mat());  // alpha = beta = 2/3 <= 1
  const auto fvz = fvz_inexact_bound(d7, sm, b_c);
  REQUIRE(fvz.has_value());
  const InexactBounds ib = inexact_bounds(d7, sm, b_c);
  CHECK(*fvz >= ib.observed - 1e-10);
  // Sharper than or equal to... not guaranteed; only that both bound.
  CHECK(*fvz >= ib.lower - 1e-10);

  // gamma = 1 makes the classical bound vacuous: absent.
  const TwoLevelDecomposition dp = make_d7_plus();
  const Smoother smp = build_smoother(dp, SmootherKind::GaussSeidel);
  const SpdMatrix ac_p = galerkin_coarse(dp);
  CHECK_FALSE(fvz_inexact_bound(dp, smp, SpdMatrix(1.5 * ac_p.mat()))
                  .has_value());
}

TEST_CASE("preconditioner spectrum reproduces the inexact norm") {
  TwoLevelDecomposition d7 = make_d7();
  Smoother sm = build_smoother(d7, SmootherKind::GaussSeidel);
  const SpdMatrix b_c(1.5 * galerkin_coarse(d7).mat());
  const CoarseSolver coarse = CoarseSolver::approximate(d7, b_c);
  const TlhbOperator op(d7, sm, coarse);
  const double via_spectrum = norm_etl_inexact(op);
  const double direct = operator_a_norm(op.iteration_matrix(), d7.A);
  CHECK(std::abs(via_spectrum - direct) <= 1e-10);
}

TEST_CASE("analyze_exact aggregates consistently") {
  const TwoLevelDecomposition d7 = make_d7();
  const Smoother sm = build_smoother(d7, SmootherKind::SymGaussSeidel);
  const ExactAnalysis an = analyze_exact(d7, sm);
  CHECK(std::abs(an.norm_etl - (1.0 - an.sigma_tl)) <= 1e-10);
  REQUIRE(an.k_tl.has_value());
  CHECK(std::abs(*an.k_tl * an.sigma_tl - 1.0) <= 1e-10);
  CHECK(int(an.nu.size()) == 4);
  CHECK(an.spectrum_etl.zero_count == 3);
  CHECK(an.gamma == doctest::Approx(cbs_constant(d7)).epsilon(1e-12));
}
