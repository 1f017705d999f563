#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tlhb/errors.hpp"

namespace tlhb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense symmetric positive definite matrix. Construction validates
/// symmetry (1e-12 relative) and positive definiteness (Cholesky).
class SpdMatrix {
 public:
  explicit SpdMatrix(Matrix m);

  const Matrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  /// Solve M x = b through the cached Cholesky factorization.
  template <typename Derived>
  typename Derived::PlainObject solve(
      const Eigen::MatrixBase<Derived>& b) const {
    return llt_.solve(b.derived());
  }

 private:
  Matrix m_;
  Eigen::LLT<Matrix> llt_;
};

/// All eigenvalues of a symmetric matrix, ascending. zero_count is the
/// number of leading eigenvalues declared exactly zero by structural
/// bookkeeping (never by thresholding).
struct Spectrum {
  std::vector<double> eigenvalues;
  int zero_count = 0;
};

/// Full ascending spectrum of a symmetric matrix. Throws NonSymmetric
/// if |M - M^T| exceeds 1e-12 * max|M|. zero_count is returned as 0;
/// callers override it when a structural count is known.
Spectrum sym_eigenvalues(const Matrix& m);

/// Smallest positive eigenvalue: eigenvalues[structural_zero_count].
/// When the count is positive, a separation check
///   eigenvalues[count] > 1e3 * |eigenvalues[count-1]|
/// guards against a miscounted zero multiplicity (DegenerateSpectrum).
double lambda_min_plus(const Spectrum& spec, int structural_zero_count);

/// Number of singular values above max(rows, cols) * eps * sigma_max.
int numerical_rank(const Matrix& m);

/// Symmetric X with X * M * X = I (inverse square root).
Matrix spd_sqrt_inv(const SpdMatrix& m);

/// Symmetric square root of an SPD matrix.
Matrix spd_sqrt(const SpdMatrix& m);

/// Symmetric square root of an SPSD matrix: eigenvalues below
/// -tol * ||M||_2 raise SingularComplement; small negatives clamp to 0.
Matrix spsd_sqrt(const Matrix& m, double rel_tol = 1e-10);

inline bool is_symmetric(const Matrix& m, double rel_tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  const double scale = m.cwiseAbs().maxCoeff();
  return (m - m.transpose()).cwiseAbs().maxCoeff() <=
         rel_tol * std::max(scale, 1.0);
}

/// Spectral norm via the symmetric Gram eigenproblem.
double spectral_norm(const Matrix& m);

}  // namespace tlhb
