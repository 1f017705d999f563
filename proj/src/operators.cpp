#include "tlhb/operators.hpp"

namespace tlhb {

namespace {

Matrix make_m_s(const Matrix& a_s, SmootherKind kind, const Matrix* custom) {
  const Eigen::Index ns = a_s.rows();
  switch (kind) {
    case SmootherKind::ExactAs:
      return a_s;
    case SmootherKind::Jacobi:
      return a_s.diagonal().asDiagonal();
    case SmootherKind::GaussSeidel:
      return a_s.triangularView<Eigen::Lower>();
    case SmootherKind::SymGaussSeidel: {
      const Matrix lower = a_s.triangularView<Eigen::Lower>();
      const Matrix d_inv = a_s.diagonal().cwiseInverse().asDiagonal();
      return lower * d_inv * lower.transpose();
    }
    case SmootherKind::Custom:
      if (custom == nullptr || custom->rows() != ns || custom->cols() != ns)
        throw InvalidSize("build_smoother: custom M_s has wrong dimensions");
      if (numerical_rank(*custom) != ns)
        throw NotConvergent("build_smoother: custom M_s is singular");
      return *custom;
  }
  throw Error("build_smoother: unknown smoother kind");
}

}  // namespace

Smoother build_smoother(const SpdMatrix& A, const Matrix& S, SmootherKind kind,
                        const Matrix* custom) {
  Matrix a_s_raw = S.transpose() * A.mat() * S;
  a_s_raw = 0.5 * (a_s_raw + a_s_raw.transpose().eval());
  SpdMatrix a_s(a_s_raw);

  Matrix m_s = make_m_s(a_s.mat(), kind, custom);
  Matrix n_s = m_s + m_s.transpose() - a_s.mat();
  n_s = 0.5 * (n_s + n_s.transpose().eval());

  // Convergence certificate for the local smoother.
  const double a_norm = spectral_norm(a_s.mat());
  const Spectrum ns_spec = sym_eigenvalues(n_s);
  if (!(ns_spec.eigenvalues.front() > 1e-12 * a_norm))
    throw NotConvergent(
        "build_smoother: M_s + M_s^T - A_s fails the SPD certificate");

  SpdMatrix n_spd(n_s);
  Matrix m_bar = m_s * n_spd.solve(Matrix(m_s.transpose()));
  m_bar = 0.5 * (m_bar + m_bar.transpose().eval());
  Matrix m_tilde = m_s.transpose() * n_spd.solve(m_s);
  m_tilde = 0.5 * (m_tilde + m_tilde.transpose().eval());

  return Smoother{std::move(m_s), std::move(a_s), SpdMatrix(std::move(m_bar)),
                  SpdMatrix(std::move(m_tilde))};
}

SpdMatrix galerkin_coarse(const TwoLevelDecomposition& dec) {
  Matrix a_c = dec.P.transpose() * dec.A.mat() * dec.P;
  a_c = 0.5 * (a_c + a_c.transpose().eval());
  return SpdMatrix(std::move(a_c));
}

Matrix projection_pi_a(const TwoLevelDecomposition& dec) {
  const SpdMatrix a_c = galerkin_coarse(dec);
  const Matrix pt_a = dec.P.transpose() * dec.A.mat();
  return dec.P * a_c.solve(pt_a);
}

std::pair<double, double> coarse_spectrum_bounds(
    const TwoLevelDecomposition& dec, const SpdMatrix& B_c) {
  if (B_c.dim() != dec.n_c())
    throw InvalidSize("coarse_spectrum_bounds: B_c dimension mismatch");
  const SpdMatrix a_c = galerkin_coarse(dec);
  const Matrix x = spd_sqrt_inv(B_c);
  Matrix sym = x * a_c.mat() * x;
  const Spectrum spec = sym_eigenvalues(sym);
  return {spec.eigenvalues.front(), spec.eigenvalues.back()};
}

CoarseSolver CoarseSolver::approximate(const TwoLevelDecomposition& dec,
                                       SpdMatrix b_c) {
  auto [alpha, beta] = coarse_spectrum_bounds(dec, b_c);
  CoarseSolver cs;
  cs.B_c = std::move(b_c);
  cs.alpha = alpha;
  cs.beta = beta;
  return cs;
}

}  // namespace tlhb
