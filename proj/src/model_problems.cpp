#include "tlhb/model_problems.hpp"

#include <cmath>

#include "tlhb/rng.hpp"

namespace tlhb {

TwoLevelDecomposition::TwoLevelDecomposition(SpdMatrix a, Matrix s, Matrix p)
    : A(std::move(a)), S(std::move(s)), P(std::move(p)) {
  const Eigen::Index nn = A.dim();
  if (S.rows() != nn || P.rows() != nn)
    throw InvalidSize("TwoLevelDecomposition: S/P row count mismatch");
  const Eigen::Index ns = S.cols(), nc = P.cols();
  if (!(std::max(ns, nc) < nn && nn <= ns + nc))
    throw InvalidSize(
        "TwoLevelDecomposition: need max{n_s, n_c} < n <= n_s + n_c");
  if (numerical_rank(S) != ns)
    throw InvalidSize("TwoLevelDecomposition: S is column rank deficient");
  if (numerical_rank(P) != nc)
    throw InvalidSize("TwoLevelDecomposition: P is column rank deficient");
  Matrix sp(nn, ns + nc);
  sp << S, P;
  if (numerical_rank(sp) != nn)
    throw RankConditionUnreachable(
        "TwoLevelDecomposition: rank(S P) < n, TLHB cannot converge");
}

SpdMatrix laplacian_1d(Eigen::Index n) {
  if (n < 2) throw InvalidSize("laplacian_1d: n >= 2 required");
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = 2.0;
    if (i + 1 < n) {
      m(i, i + 1) = -1.0;
      m(i + 1, i) = -1.0;
    }
  }
  return SpdMatrix(std::move(m));
}

SpdMatrix laplacian_2d(Eigen::Index nx, Eigen::Index ny) {
  if (nx < 2 || ny < 2) throw InvalidSize("laplacian_2d: nx, ny >= 2 required");
  const Eigen::Index n = nx * ny;
  Matrix m = Matrix::Zero(n, n);
  auto idx = [nx](Eigen::Index i, Eigen::Index j) { return j * nx + i; };
  for (Eigen::Index j = 0; j < ny; ++j) {
    for (Eigen::Index i = 0; i < nx; ++i) {
      const Eigen::Index k = idx(i, j);
      m(k, k) = 4.0;
      if (i + 1 < nx) m(k, idx(i + 1, j)) = m(idx(i + 1, j), k) = -1.0;
      if (j + 1 < ny) m(k, idx(i, j + 1)) = m(idx(i, j + 1), k) = -1.0;
    }
  }
  return SpdMatrix(std::move(m));
}

SpdMatrix random_spd(Eigen::Index n, std::uint64_t seed,
                     double condition_target) {
  if (n < 2) throw InvalidSize("random_spd: n >= 2 required");
  if (condition_target < 1.0)
    throw InvalidSize("random_spd: condition_target >= 1 required");
  Rng rng(seed);
  const Matrix g = rng.gaussian_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Pin the extreme eigenvalues at 1 and condition_target; the interior
  // is log-uniform random.
  Vector lam(n);
  const double log_cond = std::log(condition_target);
  lam(0) = 1.0;
  lam(n - 1) = condition_target;
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    lam(i) = std::exp(rng.next_uniform() * log_cond);
  Matrix m = q * lam.asDiagonal() * q.transpose();
  m = 0.5 * (m + m.transpose().eval());
  return SpdMatrix(std::move(m));
}

HbSplitting classical_hb_splitting(Eigen::Index n) {
  if (n < 3 || n % 2 == 0)
    throw InvalidSize("classical_hb_splitting: n must be odd and >= 3");
  const Eigen::Index ns = (n + 1) / 2;
  const Eigen::Index nc = (n - 1) / 2;
  HbSplitting out;
  out.perm.reserve(n);
  // Grid points 0..n-1; fine = even 0-based positions (odd grid indices),
  // coarse = odd 0-based positions.
  for (Eigen::Index i = 0; i < n; i += 2) out.perm.push_back(i);
  for (Eigen::Index i = 1; i < n; i += 2) out.perm.push_back(i);
  out.S = Matrix::Zero(n, ns);
  out.S.topRows(ns).setIdentity();
  out.P = Matrix::Zero(n, nc);
  for (Eigen::Index j = 0; j < nc; ++j) {
    out.P(ns + j, j) = 1.0;   // coarse point itself
    out.P(j, j) = 0.5;        // left fine neighbor (grid 2j)
    out.P(j + 1, j) = 0.5;    // right fine neighbor (grid 2j + 2)
  }
  return out;
}

SplittingPair overlapping_splitting(Eigen::Index n, Eigen::Index n_s,
                                    Eigen::Index n_c, std::uint64_t seed) {
  if (n_s + n_c < n)
    throw RankConditionUnreachable(
        "overlapping_splitting: n_s + n_c < n, rank(S P) = n impossible");
  if (!(std::max(n_s, n_c) < n))
    throw InvalidSize("overlapping_splitting: need max{n_s, n_c} < n");
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    SplittingPair pair;
    pair.S = rng.gaussian_matrix(n, n_s);
    pair.P = rng.gaussian_matrix(n, n_c);
    if (numerical_rank(pair.S) != n_s || numerical_rank(pair.P) != n_c)
      continue;
    Matrix sp(n, n_s + n_c);
    sp << pair.S, pair.P;
    if (numerical_rank(sp) == n) return pair;
  }
  throw RankConditionUnreachable(
      "overlapping_splitting: rank condition unmet after 100 resamples");
}

SpdMatrix permute_spd(const SpdMatrix& a,
                      const std::vector<Eigen::Index>& perm) {
  const Eigen::Index n = a.dim();
  if (static_cast<Eigen::Index>(perm.size()) != n)
    throw InvalidSize("permute_spd: permutation size mismatch");
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a.mat()(perm[i], perm[j]);
  return SpdMatrix(std::move(m));
}

TwoLevelDecomposition make_d7() {
  auto hb = classical_hb_splitting(7);
  SpdMatrix a = permute_spd(laplacian_1d(7), hb.perm);
  return TwoLevelDecomposition(std::move(a), std::move(hb.S), std::move(hb.P));
}

TwoLevelDecomposition make_d7_plus() {
  auto sp = overlapping_splitting(7, 4, 4, 1);
  return TwoLevelDecomposition(laplacian_1d(7), std::move(sp.S),
                               std::move(sp.P));
}

}  // namespace tlhb
