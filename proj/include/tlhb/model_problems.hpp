#pragma once

#include <cstdint>

#include "tlhb/spectral.hpp"

namespace tlhb {

/// The triple (A, S, P): S injects the smoothing subspace, P is the
/// interpolation. Construction enforces full column ranks, the full
/// row rank of (S P), and max{n_s, n_c} < n <= n_s + n_c.
struct TwoLevelDecomposition {
  SpdMatrix A;
  Matrix S;  // n x n_s
  Matrix P;  // n x n_c

  TwoLevelDecomposition(SpdMatrix a, Matrix s, Matrix p);

  Eigen::Index n() const { return A.dim(); }
  Eigen::Index n_s() const { return S.cols(); }
  Eigen::Index n_c() const { return P.cols(); }
  bool square_case() const { return n_s() + n_c() == n(); }
};

/// Tridiagonal [-1, 2, -1] matrix of size n.
SpdMatrix laplacian_1d(Eigen::Index n);

/// 5-point stencil on an nx-by-ny grid (Kronecker sum of 1D stencils).
SpdMatrix laplacian_2d(Eigen::Index nx, Eigen::Index ny);

/// Q^T Lambda Q with seeded random orthogonal Q and log-uniform
/// eigenvalues spanning [1, condition_target]. Deterministic in
/// (n, seed, condition_target).
SpdMatrix random_spd(Eigen::Index n, std::uint64_t seed,
                     double condition_target);

/// Classical hierarchical splitting of a 1D grid with n odd, in the
/// fine-first ordering (odd grid points, then even grid points):
/// S = (I; 0), P = linear interpolation with coarse identity block.
struct HbSplitting {
  Matrix S;
  Matrix P;
  /// perm(i) = original grid index of permuted index i; A in the
  /// fine-first ordering is A_perm(i,j) = A(perm(i), perm(j)).
  std::vector<Eigen::Index> perm;
};
HbSplitting classical_hb_splitting(Eigen::Index n);

/// Seeded random full-column-rank (S, P) with rank(S P) = n.
/// Rejection-resamples up to 100 times; throws RankConditionUnreachable
/// when the dimensions make the rank condition impossible or sampling
/// keeps failing.
struct SplittingPair {
  Matrix S;
  Matrix P;
};
SplittingPair overlapping_splitting(Eigen::Index n, Eigen::Index n_s,
                                    Eigen::Index n_c, std::uint64_t seed);

/// Named acceptance instances.
/// D7: laplacian_1d(7) in fine-first ordering with the classical
/// splitting (n_s = 4, n_c = 3, square case).
TwoLevelDecomposition make_d7();
/// D7+: laplacian_1d(7) with overlapping_splitting(7, 4, 4, seed = 1),
/// the n_c > n - n_s regime where the C.B.S. constant is 1.
TwoLevelDecomposition make_d7_plus();

/// Permute an SPD matrix symmetrically: result(i,j) = A(perm[i], perm[j]).
SpdMatrix permute_spd(const SpdMatrix& a, const std::vector<Eigen::Index>& perm);

}  // namespace tlhb
