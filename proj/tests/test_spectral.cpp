#include <cmath>

#include <doctest.h>

#include "tlhb/model_problems.hpp"
#include "tlhb/rng.hpp"
#include "tlhb/spectral.hpp"

using namespace tlhb;

TEST_CASE("tridiagonal eigenvalues match the closed form") {
  // Oracle: eig([-1 2 -1], n=3) = {2 - sqrt(2), 2, 2 + sqrt(2)}.
  const Spectrum spec = sym_eigenvalues(laplacian_1d(3).mat());
  const double r2 = std::sqrt(2.0);
  REQUIRE(spec.eigenvalues.size() == 3);
  CHECK(spec.eigenvalues[0] == doctest::Approx(2.0 - r2).epsilon(1e-12));
  CHECK(spec.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(spec.eigenvalues[2] == doctest::Approx(2.0 + r2).epsilon(1e-12));
}

TEST_CASE("eigenvalues of a general tridiagonal match 2 - 2 cos(k pi / (n+1))") {
  const Eigen::Index n = 11;
  const Spectrum spec = sym_eigenvalues(laplacian_1d(n).mat());
  const double pi = 4.0 * std::atan(1.0);
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double expect = 2.0 - 2.0 * std::cos(k * pi / double(n + 1));
    CHECK(spec.eigenvalues[k - 1] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("SpdMatrix rejects non-symmetric and indefinite input") {
  Matrix bad(2, 2);
  bad << 1.0, 0.5, 0.2, 1.0;
  CHECK_THROWS_AS(SpdMatrix{bad}, NonSymmetric);

  Matrix indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;  // eigenvalues {3, -1}
  CHECK_THROWS_AS(SpdMatrix{indef}, NotSpd);
}

TEST_CASE("sym_eigenvalues rejects non-symmetric input") {
  Matrix bad(2, 2);
  bad << 1.0, 0.5, 0.4, 1.0;
  CHECK_THROWS_AS(sym_eigenvalues(bad), NonSymmetric);
}

TEST_CASE("lambda_min_plus uses the structural zero count") {
  Spectrum spec;
  spec.eigenvalues = {1e-16, 2e-16, 0.5, 1.0};
  CHECK(lambda_min_plus(spec, 2) == doctest::Approx(0.5));
  // Miscounted multiplicity: eigenvalues[1] is within 1e3x of
  // eigenvalues[0], so declaring a single zero must be refused.
  CHECK_THROWS_AS(lambda_min_plus(spec, 1), DegenerateSpectrum);
}

TEST_CASE("numerical_rank on exact low-rank products") {
  Rng rng(42);
  const Matrix u = rng.gaussian_matrix(9, 3);
  const Matrix v = rng.gaussian_matrix(3, 7);
  CHECK(numerical_rank(u * v) == 3);
  CHECK(numerical_rank(Matrix::Identity(5, 5)) == 5);
  CHECK(numerical_rank(Matrix::Zero(4, 4)) == 0);
}

TEST_CASE("spd_sqrt_inv and spd_sqrt invert each other") {
  const SpdMatrix a = random_spd(8, 3, 100.0);
  const Matrix x = spd_sqrt_inv(a);
  const Matrix y = spd_sqrt(a);
  CHECK((x * a.mat() * x - Matrix::Identity(8, 8)).norm() < 1e-10);
  CHECK((y * y - a.mat()).norm() < 1e-10 * a.mat().norm());
  CHECK((x * y - Matrix::Identity(8, 8)).norm() < 1e-10);
}

TEST_CASE("spsd_sqrt accepts a singular Gram matrix and rejects indefinite") {
  Rng rng(5);
  const Matrix b = rng.gaussian_matrix(6, 3);
  const Matrix g = b * b.transpose();  // rank 3, SPSD
  const Matrix r = spsd_sqrt(g);
  CHECK((r * r - g).norm() < 1e-10 * g.norm());

  Matrix indef = Matrix::Zero(3, 3);
  indef.diagonal() << 1.0, 1.0, -0.5;
  CHECK_THROWS_AS(spsd_sqrt(indef), SingularComplement);
}

TEST_CASE("spectral_norm agrees with singular values") {
  Rng rng(11);
  const Matrix m = rng.gaussian_matrix(7, 4);
  const double svd_norm =
      Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
  CHECK(spectral_norm(m) == doctest::Approx(svd_norm).epsilon(1e-12));
}

TEST_CASE("rng streams are deterministic and split streams differ") {
  Rng a(123), b(123);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(123);
  Rng d = c.split();
  CHECK(c.next_u64() != d.next_u64());
  const Matrix m1 = Rng(9).gaussian_matrix(4, 4);
  const Matrix m2 = Rng(9).gaussian_matrix(4, 4);
  CHECK((m1 - m2).norm() == 0.0);
}
