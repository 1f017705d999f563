#include "tlhb/method.hpp"

#include <cmath>

namespace tlhb {

TlhbOperator::TlhbOperator(TwoLevelDecomposition dec, Smoother smoother,
                           CoarseSolver coarse)
    : dec_(std::move(dec)),
      smoother_(std::move(smoother)),
      coarse_(std::move(coarse)),
      a_c_(galerkin_coarse(dec_)) {
  if (smoother_.A_s.dim() != dec_.n_s())
    throw InvalidSize("TlhbOperator: smoother dimension mismatch");
  if (!coarse_.is_exact() && coarse_.B_c->dim() != dec_.n_c())
    throw InvalidSize("TlhbOperator: B_c dimension mismatch");
  ms_lu_.compute(smoother_.M_s);
  mst_lu_.compute(smoother_.M_s.transpose());
}

Vector TlhbOperator::coarse_solve(const Vector& r_c) const {
  return coarse_.is_exact() ? a_c_.solve(r_c) : coarse_.B_c->solve(r_c);
}

Vector TlhbOperator::sweep(const Vector& u0, const Vector& f) const {
  const Matrix& a = dec_.A.mat();
  const Matrix& s = dec_.S;
  const Matrix& p = dec_.P;

  // Presmoothing
  Vector u1 = u0 + s * ms_lu_.solve(s.transpose() * (f - a * u0));
  // Restriction
  Vector r_c = p.transpose() * (f - a * u1);
  // Coarse-grid correction + interpolation
  Vector u2 = u1 + p * coarse_solve(r_c);
  // Postsmoothing
  return u2 + s * mst_lu_.solve(s.transpose() * (f - a * u2));
}

Matrix TlhbOperator::iteration_matrix() const {
  const Eigen::Index n = dec_.n();
  const Matrix& a = dec_.A.mat();
  const Matrix& s = dec_.S;
  const Matrix& p = dec_.P;
  const Matrix id = Matrix::Identity(n, n);

  const Matrix pre = id - s * ms_lu_.solve(s.transpose() * a);
  const Matrix post = id - s * mst_lu_.solve(s.transpose() * a);
  Matrix mid;
  if (coarse_.is_exact()) {
    mid = id - p * a_c_.solve(p.transpose() * a);
  } else {
    mid = id - p * coarse_.B_c->solve(p.transpose() * a);
  }
  return post * mid * pre;
}

Vector TlhbOperator::apply_preconditioner(const Vector& r) const {
  const Matrix& a = dec_.A.mat();
  const Matrix& s = dec_.S;
  const Matrix& p = dec_.P;

  const Vector first = s * smoother_.M_bar.solve(Vector(s.transpose() * r));
  Vector t = r - a * (s * ms_lu_.solve(s.transpose() * r));
  Vector e_c = coarse_solve(p.transpose() * t);
  Vector second = p * e_c;
  second -= s * mst_lu_.solve(s.transpose() * (a * second));
  return first + second;
}

Matrix TlhbOperator::hierarchical_preconditioner_matrix() const {
  const Matrix& a = dec_.A.mat();
  const Matrix& s = dec_.S;
  const Matrix& p = dec_.P;

  // (S P) * Bhat^{-1} * (S P)^T = W * blockdiag(Mbar, B_c)^{-1} * W^T
  // with W = (S P) * unit_upper^{-1} = (S, P - S M_s^{-T} S^T A P);
  // the unit-triangular factors are transposes of each other.
  const Matrix w2 = p - s * mst_lu_.solve(s.transpose() * (a * p));
  Matrix out = s * smoother_.M_bar.solve(Matrix(s.transpose()));
  if (coarse_.is_exact()) {
    out += w2 * a_c_.solve(Matrix(w2.transpose()));
  } else {
    out += w2 * coarse_.B_c->solve(Matrix(w2.transpose()));
  }
  return 0.5 * (out + out.transpose().eval());
}

SolveResult solve(const TlhbOperator& op, const Vector& f, const Vector& u0,
                  double tol, int max_sweeps) {
  if (!(tol > 0.0)) throw InvalidSize("solve: tol must be positive");
  const Matrix& a = op.dec().A.mat();
  const Vector u_exact = op.dec().A.solve(f);

  auto a_norm = [&](const Vector& v) {
    return std::sqrt(std::max(0.0, v.dot(a * v)));
  };

  SolveResult res;
  res.u = u0;
  const double f_norm = f.norm();
  const double target = tol * f_norm;

  Vector r = f - a * res.u;
  res.history.residual_norms.push_back(r.norm());
  res.history.a_norm_errors.push_back(a_norm(u_exact - res.u));

  if (r.norm() <= target) {
    res.converged = true;
    return res;
  }
  for (int k = 0; k < max_sweeps; ++k) {
    res.u = op.sweep(res.u, f);
    ++res.sweeps;
    r = f - a * res.u;
    res.history.residual_norms.push_back(r.norm());
    const double err = a_norm(u_exact - res.u);
    const double prev = res.history.a_norm_errors.back();
    res.history.a_norm_errors.push_back(err);
    if (prev > 0.0)
      res.history.contraction_ratios.push_back(err / prev);
    if (r.norm() <= target) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace tlhb
