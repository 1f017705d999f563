#include "tlhb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tlhb {

SpdMatrix::SpdMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw NotSpd("SpdMatrix: matrix must be square and nonempty");
  if (!is_symmetric(m_)) throw NonSymmetric("SpdMatrix: not symmetric");
  m_ = 0.5 * (m_ + m_.transpose().eval());
  llt_.compute(m_);
  if (llt_.info() != Eigen::Success)
    throw NotSpd("SpdMatrix: Cholesky factorization failed");
}

Spectrum sym_eigenvalues(const Matrix& m) {
  if (!is_symmetric(m))
    throw NonSymmetric("sym_eigenvalues: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                           Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error("sym_eigenvalues: eigensolver failed");
  Spectrum spec;
  spec.eigenvalues.assign(es.eigenvalues().data(),
                          es.eigenvalues().data() + es.eigenvalues().size());
  return spec;
}

double lambda_min_plus(const Spectrum& spec, int structural_zero_count) {
  const int n = static_cast<int>(spec.eigenvalues.size());
  if (structural_zero_count < 0 || structural_zero_count >= n)
    throw DegenerateSpectrum("lambda_min_plus: zero count out of range");
  const double value = spec.eigenvalues[structural_zero_count];
  if (structural_zero_count >= 1) {
    const double below = std::abs(spec.eigenvalues[structural_zero_count - 1]);
    if (!(value > 1e3 * below))
      throw DegenerateSpectrum(
          "lambda_min_plus: separation check failed; structural zero count "
          "disagrees with the computed spectrum");
  }
  if (!(value > 0.0))
    throw DegenerateSpectrum("lambda_min_plus: candidate is not positive");
  return value;
}

int numerical_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = static_cast<double>(std::max(m.rows(), m.cols())) *
                        std::numeric_limits<double>::epsilon() * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

Matrix spd_sqrt_inv(const SpdMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  if (es.info() != Eigen::Success)
    throw NotSpd("spd_sqrt_inv: eigensolver failed");
  if (es.eigenvalues()(0) <= 0.0)
    throw NotSpd("spd_sqrt_inv: matrix is not positive definite");
  const Vector inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() *
         es.eigenvectors().transpose();
}

Matrix spd_sqrt(const SpdMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  if (es.info() != Eigen::Success)
    throw NotSpd("spd_sqrt: eigensolver failed");
  if (es.eigenvalues()(0) <= 0.0)
    throw NotSpd("spd_sqrt: matrix is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

Matrix spsd_sqrt(const Matrix& m, double rel_tol) {
  if (!is_symmetric(m, 1e-10))
    throw NonSymmetric("spsd_sqrt: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success)
    throw Error("spsd_sqrt: eigensolver failed");
  Vector lam = es.eigenvalues();
  const double scale = std::max(std::abs(lam(lam.size() - 1)), 1e-300);
  if (lam(0) < -rel_tol * scale)
    throw SingularComplement("spsd_sqrt: matrix is numerically indefinite");
  lam = lam.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix gram = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues()(es.eigenvalues().size() - 1)));
}

}  // namespace tlhb
