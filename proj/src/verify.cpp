#include "tlhb/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tlhb/rng.hpp"

namespace tlhb::verify {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix orthonormal_columns(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  const Matrix g = rng.gaussian_matrix(rows, cols);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

void record(SuiteResult& r, bool pass, double resid, const std::string& what,
            const std::vector<std::pair<std::string, Matrix>>& dump = {}) {
  r.worst_residual = std::max(r.worst_residual, resid);
  if (pass) {
    ++r.passed;
  } else {
    ++r.failed;
    if (r.first_failure.empty()) {
      r.first_failure = what;
      r.dump = dump;
    }
  }
}

std::vector<std::pair<std::string, Matrix>> dump_of(const Instance& inst) {
  return {{"A", inst.dec.A.mat()},
          {"S", inst.dec.S},
          {"P", inst.dec.P},
          {"M_s", inst.smoother.M_s}};
}

Smoother apply_mutation(const SpdMatrix& /*a*/, Smoother sm,
                        Mutation mutation) {
  if (mutation == Mutation::MTildeSignError) {
    Matrix bad = sm.M_s + sm.M_s.transpose() + sm.A_s.mat();
    bad = 0.5 * (bad + bad.transpose().eval());
    Matrix mt = sm.M_s.transpose() * SpdMatrix(bad).solve(sm.M_s);
    mt = 0.5 * (mt + mt.transpose().eval());
    sm.M_tilde = SpdMatrix(std::move(mt));
  }
  return sm;
}

/// Jacobi may violate the convergence certificate on generic SPD
/// matrices; fall back to a damped diagonal that always satisfies it.
Smoother build_suite_smoother(const SpdMatrix& a, const Matrix& s,
                              SmootherKind kind) {
  if (kind == SmootherKind::Jacobi) {
    try {
      return build_smoother(a, s, kind);
    } catch (const NotConvergent&) {
      Matrix a_s = s.transpose() * a.mat() * s;
      a_s = 0.5 * (a_s + a_s.transpose().eval());
      const Vector d_inv_sqrt = a_s.diagonal().cwiseSqrt().cwiseInverse();
      const Matrix scaled =
          d_inv_sqrt.asDiagonal() * a_s * d_inv_sqrt.asDiagonal();
      const double lmax = sym_eigenvalues(scaled).eigenvalues.back();
      const Matrix damped = (0.55 * lmax) * Matrix(a_s.diagonal().asDiagonal());
      return build_smoother(a, s, SmootherKind::Custom, &damped);
    }
  }
  return build_smoother(a, s, kind);
}

constexpr SmootherKind kCycleKinds[4] = {
    SmootherKind::Jacobi, SmootherKind::GaussSeidel,
    SmootherKind::SymGaussSeidel, SmootherKind::ExactAs};

const char* kind_name(SmootherKind k) {
  switch (k) {
    case SmootherKind::ExactAs: return "exact-as";
    case SmootherKind::Jacobi: return "jacobi";
    case SmootherKind::GaussSeidel: return "gs";
    case SmootherKind::SymGaussSeidel: return "sgs";
    case SmootherKind::Custom: return "custom";
  }
  return "?";
}

}  // namespace

Smoother build_mutated_smoother(const SpdMatrix& a, const Matrix& s,
                                SmootherKind kind, Mutation mutation) {
  return apply_mutation(a, build_suite_smoother(a, s, kind), mutation);
}

Instance make_instance(std::uint64_t master_seed, int index, Mutation mutation,
                       Eigen::Index max_n) {
  const std::uint64_t seed = mix(master_seed, static_cast<std::uint64_t>(index));
  Rng rng(seed);

  const int family = index % 3;
  const SmootherKind kind = kCycleKinds[(index / 3) % 4];
  const bool overlap = ((index / 12) % 2) == 1;

  SpdMatrix a = [&]() {
    switch (family) {
      case 0: {  // 1D Laplacian, odd size
        const Eigen::Index half = 2 + rng.next_u64() % ((max_n - 5) / 2 + 1);
        return laplacian_1d(2 * half + 1);
      }
      case 1: {  // 2D Laplacian
        Eigen::Index nx = 2 + rng.next_u64() % 4;
        Eigen::Index ny = 2 + rng.next_u64() % 4;
        while (nx * ny > max_n) (nx > ny ? nx : ny) -= 1;
        return laplacian_2d(std::max<Eigen::Index>(2, nx),
                            std::max<Eigen::Index>(2, ny));
      }
      default: {
        const Eigen::Index n = 4 + rng.next_u64() % (max_n - 3);
        const double cond = 2.0 + rng.next_uniform() * 48.0;
        return random_spd(n, rng.next_u64(), cond);
      }
    }
  }();

  const Eigen::Index n = a.dim();
  Eigen::Index n_s, n_c;
  if (!overlap) {
    n_s = 2 + rng.next_u64() % (n - 3);  // [2, n-2]
    n_c = n - n_s;
  } else {
    n_s = n / 2 + 1 + rng.next_u64() % (n - n / 2 - 1);  // [n/2+1, n-1]
    n_c = n - n_s + 1 + rng.next_u64() % (n_s - 1);      // (n-n_s, n-1]
  }

  Rng srng = rng.split();
  for (int attempt = 0;; ++attempt) {
    Matrix s = orthonormal_columns(srng, n, n_s);
    Matrix p = orthonormal_columns(srng, n, n_c);
    Matrix sp(n, n_s + n_c);
    sp << s, p;
    if (numerical_rank(sp) != n) {
      if (attempt > 50)
        throw RankConditionUnreachable("make_instance: cannot satisfy rank");
      continue;
    }
    Smoother sm = apply_mutation(a, build_suite_smoother(a, s, kind), mutation);
    std::ostringstream desc;
    desc << (family == 0 ? "lap1d" : family == 1 ? "lap2d" : "random") << " n="
         << n << " n_s=" << n_s << " n_c=" << n_c << " "
         << (overlap ? "overlap" : "square") << " " << kind_name(kind)
         << " seed=" << seed;
    return Instance{TwoLevelDecomposition(a, std::move(s), std::move(p)),
                    std::move(sm), kind, desc.str(), seed};
  }
}

SuiteResult suite_identity(int count, std::uint64_t seed, Mutation mutation) {
  SuiteResult r{"identity"};
  for (int i = 0; i < count; ++i) {
    try {
      Instance inst = make_instance(seed, i, mutation);
      const double sigma = sigma_tl(inst.dec, inst.smoother);
      const double norm = norm_etl_exact(inst.dec, inst.smoother);
      const double resid = std::abs(norm - (1.0 - sigma));
      record(r, resid <= 1e-10, resid, "identity violated on " + inst.desc,
             dump_of(inst));

      if (inst.dec.square_case()) {
        const double k = k_tl(inst.dec, inst.smoother);
        const double rec = std::abs(k * sigma - 1.0);
        record(r, rec <= 1e-10, rec, "K_TL reciprocity on " + inst.desc,
               dump_of(inst));
        const double gamma = cbs_constant(inst.dec);
        // The cap blows up as gamma -> 1; skip when it carries no
        // information (roundoff could even push 1 - gamma^2 negative).
        if (1.0 - gamma * gamma > 1e-8) {
          const Matrix x = spd_sqrt_inv(inst.smoother.A_s);
          const Matrix g = x * inst.smoother.M_tilde.mat() * x;
          const double mu_max = sym_eigenvalues(g).eigenvalues.back();
          const double cap = mu_max / (1.0 - gamma * gamma);
          record(r, k <= cap + 1e-10 * std::abs(cap), std::max(0.0, k - cap),
                 "K_TL cap violated on " + inst.desc, dump_of(inst));
        }
      }
    } catch (const Error& e) {
      record(r, false, 1.0, std::string("exception: ") + e.what());
    }
  }
  return r;
}

SuiteResult suite_spectrum(int count, std::uint64_t seed) {
  SuiteResult r{"spectrum"};
  for (int i = 0; i < count; ++i) {
    try {
      Instance inst = make_instance(seed, i);
      const ExactAnalysis an = analyze_exact(inst.dec, inst.smoother);

      // Direct eigenvalues of the assembled E_TL via its A-similar
      // symmetric form.
      const Matrix e = exact_iteration_matrix(inst.dec, inst.smoother);
      const Matrix sq = spd_sqrt(inst.dec.A);
      const Matrix sq_inv = spd_sqrt_inv(inst.dec.A);
      Matrix sym = sq * e * sq_inv;
      sym = 0.5 * (sym + sym.transpose().eval());
      const Spectrum direct = sym_eigenvalues(sym);

      double resid = 0.0;
      for (std::size_t k = 0; k < direct.eigenvalues.size(); ++k)
        resid = std::max(resid, std::abs(direct.eigenvalues[k] -
                                         an.spectrum_etl.eigenvalues[k]));
      record(r, resid <= 1e-8, resid, "spectrum mismatch on " + inst.desc,
             dump_of(inst));

      bool nu_ok = true;
      for (double nu : an.nu)
        if (!(nu > 0.0 && nu <= 1.0 + 1e-10)) nu_ok = false;
      record(r, nu_ok, 0.0, "nu outside (0,1] on " + inst.desc, dump_of(inst));
    } catch (const Error& e) {
      record(r, false, 1.0, std::string("exception: ") + e.what());
    }
  }
  return r;
}

SuiteResult suite_optimal(int count, std::uint64_t seed) {
  SuiteResult r{"optimal"};
  for (int i = 0; i < count; ++i) {
    try {
      Instance inst = make_instance(seed, i);
      const Eigen::Index n = inst.dec.n();
      const Eigen::Index n_s = inst.dec.n_s();
      Rng rng(mix(inst.seed, 0xabcdULL));
      // A coarse size in [n - n_s, n - 1]; avoid n_c = 0.
      const Eigen::Index lo = std::max<Eigen::Index>(1, n - n_s);
      const Eigen::Index n_c = lo + rng.next_u64() % (n - lo);

      const OptimalInterpolation oi =
          optimal_interpolation(inst.dec.A, inst.dec.S, inst.smoother, n_c);
      TwoLevelDecomposition dec_star(inst.dec.A, inst.dec.S, oi.P_star);
      const double achieved = norm_etl_exact(dec_star, inst.smoother);
      const double att = std::abs(achieved - oi.bound);
      record(r, att <= 1e-10, att, "optimal P* not attained on " + inst.desc,
             dump_of(inst));

      if (inst.kind == SmootherKind::ExactAs)
        record(r, oi.bound <= 1e-10, oi.bound,
               "exact-as smoother should give bound 0 on " + inst.desc,
               dump_of(inst));

      // Randomized lower-bound sweep: no valid P beats the bound.
      double worst_gap = 0.0;
      bool ok = true;
      for (int trial = 0; trial < 50; ++trial) {
        Matrix p = orthonormal_columns(rng, n, n_c);
        Matrix sp(n, n_s + n_c);
        sp << inst.dec.S, p;
        if (numerical_rank(sp) != n) continue;
        TwoLevelDecomposition dec_p(inst.dec.A, inst.dec.S, std::move(p));
        const double norm = norm_etl_exact(dec_p, inst.smoother);
        worst_gap = std::max(worst_gap, oi.bound - norm);
        if (norm < oi.bound - 1e-10) ok = false;
      }
      record(r, ok, std::max(0.0, worst_gap),
             "random P beat the optimal bound on " + inst.desc, dump_of(inst));
    } catch (const Error& e) {
      record(r, false, 1.0, std::string("exception: ") + e.what());
    }
  }
  return r;
}

SuiteResult suite_monotonicity(int count, std::uint64_t seed) {
  SuiteResult r{"monotonicity"};
  int collected = 0;
  for (int i = 0; collected < count && i < 20 * count; ++i) {
    try {
      Instance inst = make_instance(seed, i);
      if (inst.dec.n_c() + 1 >= inst.dec.n()) continue;  // no room to grow
      ++collected;
      Rng rng(mix(inst.seed, 0x5eedULL));
      const Vector c = rng.gaussian_matrix(inst.dec.n(), 1);
      Matrix p_hat(inst.dec.n(), inst.dec.n_c() + 1);
      p_hat << inst.dec.P, c;
      if (numerical_rank(p_hat) != p_hat.cols()) continue;

      auto [sigma, sigma_hat] =
          monotonicity_check(inst.dec, inst.smoother, p_hat);
      record(r, sigma <= sigma_hat + 1e-12, std::max(0.0, sigma - sigma_hat),
             "monotonicity violated on " + inst.desc, dump_of(inst));

      // Range invariance: sigma_hat depends only on Range(P_hat). Use a
      // well-conditioned (scaled orthogonal) change of basis so the
      // comparison is not polluted by the basis conditioning.
      const Matrix rmat =
          3.0 * Matrix(Eigen::HouseholderQR<Matrix>(
                           rng.gaussian_matrix(inst.dec.n_c(),
                                               inst.dec.n_c()))
                           .householderQ());
      Matrix p_hat2(inst.dec.n(), inst.dec.n_c() + 1);
      p_hat2 << inst.dec.P * rmat, c;
      auto [sigma2, sigma_hat2] =
          monotonicity_check(inst.dec, inst.smoother, p_hat2);
      (void)sigma2;
      const double inv_resid = std::abs(sigma_hat - sigma_hat2);
      record(r, inv_resid <= 1e-8, inv_resid,
             "range invariance violated on " + inst.desc, dump_of(inst));
    } catch (const Error& e) {
      record(r, false, 1.0, std::string("exception: ") + e.what());
    }
  }
  return r;
}

namespace {

/// Replace the last column of P with a vector in Null(S^T A) so that
/// rank(S^T A P) < n_c; keeps rank(S P) = n (resampled if not).
bool make_rank_deficient(const SpdMatrix& a, const Matrix& s, Matrix& p,
                         Rng& rng) {
  const Matrix sta = s.transpose() * a.mat();  // n_s x n
  Eigen::FullPivLU<Matrix> lu(sta);
  const Matrix kernel = lu.kernel();  // n x (n - n_s), generically
  if (kernel.cols() == 0) return false;
  for (int attempt = 0; attempt < 50; ++attempt) {
    const Vector coeff = rng.gaussian_matrix(kernel.cols(), 1);
    Vector v = kernel * coeff;
    if (v.norm() < 1e-12) continue;
    v.normalize();
    Matrix candidate = p;
    candidate.col(candidate.cols() - 1) = v;
    Matrix sp(a.dim(), s.cols() + candidate.cols());
    sp << s, candidate;
    if (numerical_rank(candidate) == candidate.cols() &&
        numerical_rank(sp) == a.dim() &&
        numerical_rank(s.transpose() * a.mat() * candidate) <
            candidate.cols()) {
      p = candidate;
      return true;
    }
  }
  return false;
}

/// B_c with a prescribed spectrum of B_c^{-1} A_c: conjugate diag(d)
/// by a random orthogonal factor inside the A_c^{1/2} congruence.
SpdMatrix make_b_c(const SpdMatrix& a_c, const Vector& d, Rng& rng) {
  const Matrix q = orthonormal_columns(rng, a_c.dim(), a_c.dim());
  const Matrix sq = spd_sqrt(a_c);
  Matrix b = sq * q * d.cwiseInverse().asDiagonal() * q.transpose() * sq;
  b = 0.5 * (b + b.transpose().eval());
  return SpdMatrix(std::move(b));
}

Vector regime_spectrum(Regime regime, Eigen::Index n_c, Rng& rng) {
  Vector d(n_c);
  switch (regime) {
    case Regime::BetaLe1:
      for (Eigen::Index i = 0; i < n_c; ++i)
        d(i) = 0.35 + 0.6 * rng.next_uniform();
      break;
    case Regime::Straddle:
      for (Eigen::Index i = 0; i < n_c; ++i)
        d(i) = 0.6 + 1.1 * rng.next_uniform();
      d(0) = 0.7;
      d(n_c - 1) = 1.5;
      break;
    case Regime::AlphaGt1:
      for (Eigen::Index i = 0; i < n_c; ++i)
        d(i) = 1.05 + 1.15 * rng.next_uniform();
      break;
  }
  return d;
}

}  // namespace

SuiteResult suite_lemma41(int count, std::uint64_t seed) {
  SuiteResult r{"lemma41"};
  for (int i = 0; i < count; ++i) {
    try {
      Instance inst = make_instance(seed, i, Mutation::None, 20);
      Rng rng(mix(inst.seed, 0x41ULL));
      Matrix p = inst.dec.P;
      bool forced_deficient = false;
      if (i % 3 == 2 && inst.dec.square_case())
        forced_deficient = make_rank_deficient(inst.dec.A, inst.dec.S, p, rng);
      const TwoLevelDecomposition dec(inst.dec.A, inst.dec.S, p);

      const Lemma41Quantities q = lemma41_quantities(dec, inst.smoother);
      const double sigma = sigma_tl(dec, inst.smoother);

      record(r, std::abs(q.lmin_complement) <= 1e-10,
             std::abs(q.lmin_complement),
             "lmin complement nonzero on " + inst.desc, dump_of(inst));
      record(r, std::abs(q.lmax_complement - (1.0 - sigma)) <= 1e-10,
             std::abs(q.lmax_complement - (1.0 - sigma)),
             "lmax complement != 1 - sigma on " + inst.desc, dump_of(inst));
      record(r, std::abs(q.lmin_proj) <= 1e-10, std::abs(q.lmin_proj),
             "lmin projection nonzero on " + inst.desc, dump_of(inst));
      if (q.rank_stap == dec.n_c()) {
        record(r, q.theta.has_value() && *q.theta > 0.0, 0.0,
               "theta missing in full-rank case on " + inst.desc,
               dump_of(inst));
        const double resid = std::abs(q.lmax_proj - (1.0 - *q.theta));
        record(r, resid <= 1e-10, resid,
               "lmax projection != 1 - theta on " + inst.desc, dump_of(inst));
        record(r, 1.0 - *q.theta >= sigma - 1e-12,
               std::max(0.0, sigma - (1.0 - *q.theta)),
               "1 - theta >= sigma violated on " + inst.desc, dump_of(inst));
      } else {
        record(r, !q.theta.has_value(), 0.0,
               "theta present in rank-deficient case on " + inst.desc,
               dump_of(inst));
        const double resid = std::abs(q.lmax_proj - 1.0);
        record(r, resid <= 1e-10, resid,
               "lmax projection != 1 in rank-deficient case on " + inst.desc,
               dump_of(inst));
        if (forced_deficient)
          record(r, true, 0.0, "");  // constructed deficient case reached
      }

      // Direct oracle: eigenvalues of the assembled nonsymmetric
      // products, independent of the congruence route.
      const Matrix id = Matrix::Identity(dec.n(), dec.n());
      const Matrix smsa =
          dec.S * inst.smoother.M_tilde.solve(
                      Matrix(dec.S.transpose() * dec.A.mat()));
      const Matrix pi_a = projection_pi_a(dec);
      auto extremes = [&](const Matrix& m) {
        Eigen::EigenSolver<Matrix> es(m);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (Eigen::Index k = 0; k < m.rows(); ++k) {
          lo = std::min(lo, es.eigenvalues()(k).real());
          hi = std::max(hi, es.eigenvalues()(k).real());
        }
        return std::pair<double, double>(lo, hi);
      };
      auto [lo1, hi1] = extremes((id - smsa) * (id - pi_a));
      auto [lo2, hi2] = extremes((id - smsa) * pi_a);
      const double oracle_resid =
          std::max({std::abs(lo1 - q.lmin_complement),
                    std::abs(hi1 - q.lmax_complement),
                    std::abs(lo2 - q.lmin_proj),
                    std::abs(hi2 - q.lmax_proj)});
      record(r, oracle_resid <= 1e-10, oracle_resid,
             "direct oracle disagrees on " + inst.desc, dump_of(inst));
    } catch (const Error& e) {
      record(r, false, 1.0, std::string("exception: ") + e.what());
    }
  }
  return r;
}

SuiteResult suite_bounds(int count_per_cell, std::uint64_t seed) {
  SuiteResult r{"bounds"};
  const Regime regimes[3] = {Regime::BetaLe1, Regime::Straddle,
                             Regime::AlphaGt1};
  for (int deficient = 0; deficient < 2; ++deficient) {
    for (Regime regime : regimes) {
      int reached = 0;
      for (int i = 0; i < 20 * count_per_cell && reached < count_per_cell;
           ++i) {
        try {
          const int idx = i + 1000 * deficient +
                          7000 * static_cast<int>(regime);
          Instance inst = make_instance(seed, idx, Mutation::None, 24);
          Rng rng(mix(inst.seed, 0xb0b0ULL));
          Matrix p = inst.dec.P;
          if (deficient) {
            // Either n_c > n_s makes S^T A P automatically deficient,
            // or we inject a Null(S^T A) column.
            if (inst.dec.n_c() <= inst.dec.n_s() &&
                !make_rank_deficient(inst.dec.A, inst.dec.S, p, rng))
              continue;
          }
          const TwoLevelDecomposition dec(inst.dec.A, inst.dec.S, p);
          const Matrix sap = dec.S.transpose() * dec.A.mat() * dec.P;
          const bool is_def = numerical_rank(sap) < dec.n_c();
          if (is_def != static_cast<bool>(deficient)) continue;

          const SpdMatrix a_c = galerkin_coarse(dec);
          const Vector d = regime_spectrum(regime, dec.n_c(), rng);
          const SpdMatrix b_c = make_b_c(a_c, d, rng);

          const InexactBounds ib = inexact_bounds(dec, inst.smoother, b_c);
          if (ib.regime != regime) continue;  // borderline draw, retry
          ++reached;
          const double slack =
              std::max(std::max(0.0, ib.lower - ib.observed),
                       std::max(0.0, ib.observed - ib.upper));
          record(r, slack <= 1e-10, slack,
                 "sandwich violated on " + inst.desc, dump_of(inst));

          // Classical square-case upper bound, when applicable.
          const auto fvz = fvz_inexact_bound(dec, inst.smoother, b_c);
          if (fvz.has_value())
            record(r, *fvz >= ib.observed - 1e-10,
                   std::max(0.0, ib.observed - *fvz),
                   "classical upper bound beaten on " + inst.desc,
                   dump_of(inst));
        } catch (const Error& e) {
          record(r, false, 1.0, std::string("exception: ") + e.what());
        }
      }
      if (reached < count_per_cell) {
        std::ostringstream oss;
        oss << "cell not reached: rank="
            << (deficient ? "deficient" : "full") << " regime="
            << static_cast<int>(regime) << " (" << reached << "/"
            << count_per_cell << ")";
        record(r, false, 1.0, oss.str());
      }
    }
  }

  // Collapse to the exact identity at B_c = A_c.
  for (int i = 0; i < std::max(3, count_per_cell / 2); ++i) {
    try {
      Instance inst = make_instance(seed, 50000 + i, Mutation::None, 24);
      const SpdMatrix a_c = galerkin_coarse(inst.dec);
      const InexactBounds ib = inexact_bounds(inst.dec, inst.smoother, a_c);
      const double sigma = sigma_tl(inst.dec, inst.smoother);
      const double resid = std::max(
          {std::abs(ib.lower - (1.0 - sigma)), std::abs(ib.upper - ib.lower),
           std::abs(ib.observed - (1.0 - sigma))});
      record(r, resid <= 1e-10, resid,
             "exact collapse violated on " + inst.desc, dump_of(inst));
    } catch (const Error& e) {
      record(r, false, 1.0, std::string("exception: ") + e.what());
    }
  }
  return r;
}

SuiteResult suite_preconditioner(int count, std::uint64_t seed) {
  SuiteResult r{"preconditioner"};
  for (int i = 0; i < count; ++i) {
    try {
      Instance inst = make_instance(seed, i, Mutation::None, 32);
      Rng rng(mix(inst.seed, 0xacceULL));
      const bool exact = i % 2 == 0;
      CoarseSolver coarse;
      if (exact) {
        coarse = CoarseSolver::exact();
      } else {
        const SpdMatrix a_c = galerkin_coarse(inst.dec);
        Vector d(inst.dec.n_c());
        for (Eigen::Index k = 0; k < d.size(); ++k)
          d(k) = 0.5 + 1.2 * rng.next_uniform();
        coarse = CoarseSolver::approximate(inst.dec, make_b_c(a_c, d, rng));
      }
      TlhbOperator op(inst.dec, inst.smoother, coarse);
      const Matrix& a = inst.dec.A.mat();
      const Eigen::Index n = inst.dec.n();
      const Matrix e_tl = op.iteration_matrix();

      // Sweep error propagation equals multiplication by the assembled
      // iteration matrix.
      double sweep_resid = 0.0;
      for (int trial = 0; trial < 20; ++trial) {
        const Vector u0 = rng.gaussian_matrix(n, 1);
        const Vector f = rng.gaussian_matrix(n, 1);
        const Vector u_exact = inst.dec.A.solve(f);
        const Vector e0 = u_exact - u0;
        const Vector e1 = u_exact - op.sweep(u0, f);
        sweep_resid = std::max(
            sweep_resid, (e1 - e_tl * e0).norm() / (1.0 + e0.norm()));
      }
      record(r, sweep_resid <= 1e-12, sweep_resid,
             "sweep vs iteration matrix on " + inst.desc, dump_of(inst));

      // Additive vs hierarchical preconditioner forms.
      const Matrix hier = op.hierarchical_preconditioner_matrix();
      Matrix additive(n, n);
      for (Eigen::Index k = 0; k < n; ++k)
        additive.col(k) = op.apply_preconditioner(Vector::Unit(n, k));
      const double form_resid = (hier - additive).cwiseAbs().maxCoeff();
      record(r, form_resid <= 1e-10, form_resid,
             "additive vs hierarchical forms on " + inst.desc, dump_of(inst));

      // E = I - B^{-1} A consistency.
      const Matrix e_from_b = Matrix::Identity(n, n) - hier * a;
      const double eb_resid = (e_tl - e_from_b).cwiseAbs().maxCoeff();
      record(r, eb_resid <= 1e-10, eb_resid,
             "iteration matrix vs I - B^{-1}A on " + inst.desc,
             dump_of(inst));

      // Norm formula via the preconditioner spectrum vs the direct
      // operator A-norm.
      const double via_spec = norm_etl_inexact(op);
      const double direct = operator_a_norm(e_tl, inst.dec.A);
      const double norm_resid = std::abs(via_spec - direct);
      record(r, norm_resid <= 1e-10, norm_resid,
             "norm formula on " + inst.desc, dump_of(inst));

      if (exact) {
        // A^{1/2} E_TL A^{-1/2} is SPSD for the exact coarse solver.
        const Matrix sq = spd_sqrt(inst.dec.A);
        const Matrix sq_inv = spd_sqrt_inv(inst.dec.A);
        Matrix sym = sq * e_tl * sq_inv;
        sym = 0.5 * (sym + sym.transpose().eval());
        const double lmin = sym_eigenvalues(sym).eigenvalues.front();
        record(r, lmin >= -1e-10, std::max(0.0, -lmin),
               "exact E_TL not SPSD in A-form on " + inst.desc,
               dump_of(inst));

        // lambda_min(B^{-1}A) = sigma_TL.
        Matrix t = sq * hier * sq;
        t = 0.5 * (t + t.transpose().eval());
        const double lmin_ba = sym_eigenvalues(t).eigenvalues.front();
        const double sigma = sigma_tl(inst.dec, inst.smoother);
        const double sresid = std::abs(lmin_ba - sigma);
        record(r, sresid <= 1e-10, sresid,
               "lambda_min(B^{-1}A) != sigma on " + inst.desc,
               dump_of(inst));
      }
    } catch (const Error& e) {
      record(r, false, 1.0, std::string("exception: ") + e.what());
    }
  }
  return r;
}

std::vector<SuiteResult> run_all(int count, std::uint64_t seed) {
  std::vector<SuiteResult> out;
  out.push_back(suite_identity(count, seed));
  out.push_back(suite_spectrum(std::max(10, count / 2), seed + 1));
  out.push_back(suite_optimal(std::max(5, count / 10), seed + 2));
  out.push_back(suite_monotonicity(std::max(10, count / 2), seed + 3));
  out.push_back(suite_lemma41(std::max(10, count / 2), seed + 4));
  out.push_back(suite_bounds(std::max(10, count / 10), seed + 5));
  out.push_back(suite_preconditioner(std::max(10, count / 4), seed + 6));
  return out;
}

}  // namespace tlhb::verify
