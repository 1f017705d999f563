#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tlhb/analysis.hpp"
#include "tlhb/matrix_market.hpp"
#include "tlhb/rng.hpp"
#include "tlhb/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tlhb;

namespace {

bool log_enabled() { return std::getenv("TLHB_LOG") != nullptr; }

void log(const std::string& msg) {
  if (log_enabled()) std::cerr << "[tlhb] " << msg << "\n";
}

const char* error_name(const Error& e) {
  if (dynamic_cast<const NonSymmetric*>(&e)) return "NonSymmetric";
  if (dynamic_cast<const NotSpd*>(&e)) return "NotSpd";
  if (dynamic_cast<const DegenerateSpectrum*>(&e)) return "DegenerateSpectrum";
  if (dynamic_cast<const InvalidSize*>(&e)) return "InvalidSize";
  if (dynamic_cast<const RankConditionUnreachable*>(&e))
    return "RankConditionUnreachable";
  if (dynamic_cast<const NotConvergent*>(&e)) return "NotConvergent";
  if (dynamic_cast<const NotSquareCase*>(&e)) return "NotSquareCase";
  if (dynamic_cast<const InvalidCoarseSize*>(&e)) return "InvalidCoarseSize";
  if (dynamic_cast<const NotNested*>(&e)) return "NotNested";
  if (dynamic_cast<const SingularComplement*>(&e)) return "SingularComplement";
  if (dynamic_cast<const BoundViolation*>(&e)) return "BoundViolation";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  return "Error";
}

struct InstanceConfig {
  std::string gallery;
  std::string a_path, s_path, p_path, bc_path;
  // Symmetric Gauss-Seidel always satisfies the convergence certificate
  // (M + M^T - A_s = M + L D^{-1} L^T is SPD), so it is a safe default.
  std::string smoother = "sgs";
  std::string coarse = "exact";
  std::uint64_t seed = 0;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

TwoLevelDecomposition load_decomposition(const InstanceConfig& cfg) {
  if (!cfg.gallery.empty()) {
    const auto parts = split(cfg.gallery, ':');
    const std::string& name = parts[0];
    if (name == "d7") return make_d7();
    if (name == "d7plus") return make_d7_plus();
    if (name == "lap1d") {
      if (parts.size() != 2)
        throw ParseError("gallery lap1d:N requires a size");
      const Eigen::Index n = std::stoll(parts[1]);
      auto hb = classical_hb_splitting(n);
      SpdMatrix a = permute_spd(laplacian_1d(n), hb.perm);
      return TwoLevelDecomposition(std::move(a), std::move(hb.S),
                                   std::move(hb.P));
    }
    if (name == "lap2d") {
      const auto dims = split(parts.size() > 1 ? parts[1] : "", ',');
      if (dims.size() != 2) throw ParseError("gallery lap2d:NX,NY required");
      SpdMatrix a = laplacian_2d(std::stoll(dims[0]), std::stoll(dims[1]));
      const Eigen::Index n = a.dim();
      auto sp = overlapping_splitting(n, n / 2 + 1, n / 2 + 1, cfg.seed);
      return TwoLevelDecomposition(std::move(a), std::move(sp.S),
                                   std::move(sp.P));
    }
    if (name == "random") {
      const auto dims = split(parts.size() > 1 ? parts[1] : "", ',');
      if (dims.size() != 3) throw ParseError("gallery random:N,NS,NC required");
      const Eigen::Index n = std::stoll(dims[0]);
      SpdMatrix a = random_spd(n, cfg.seed, 50.0);
      auto sp = overlapping_splitting(n, std::stoll(dims[1]),
                                      std::stoll(dims[2]), cfg.seed + 1);
      return TwoLevelDecomposition(std::move(a), std::move(sp.S),
                                   std::move(sp.P));
    }
    throw ParseError("unknown gallery instance '" + cfg.gallery + "'");
  }
  if (cfg.a_path.empty() || cfg.s_path.empty() || cfg.p_path.empty())
    throw ParseError("need --gallery or all of --a/--s/--p");
  SpdMatrix a(read_matrix_market_file(cfg.a_path));
  return TwoLevelDecomposition(std::move(a),
                               read_matrix_market_file(cfg.s_path),
                               read_matrix_market_file(cfg.p_path));
}

Smoother load_smoother(const TwoLevelDecomposition& dec,
                       const InstanceConfig& cfg) {
  const auto parts = split(cfg.smoother, ':');
  const std::string& name = parts[0];
  if (name == "exact-as") return build_smoother(dec, SmootherKind::ExactAs);
  if (name == "jacobi") return build_smoother(dec, SmootherKind::Jacobi);
  if (name == "gs") return build_smoother(dec, SmootherKind::GaussSeidel);
  if (name == "sgs") return build_smoother(dec, SmootherKind::SymGaussSeidel);
  if (name == "custom") {
    if (parts.size() != 2) throw ParseError("smoother custom:path required");
    const Matrix m = read_matrix_market_file(parts[1]);
    return build_smoother(dec, SmootherKind::Custom, &m);
  }
  throw ParseError("unknown smoother '" + cfg.smoother + "'");
}

CoarseSolver load_coarse(const TwoLevelDecomposition& dec,
                         const InstanceConfig& cfg) {
  const auto parts = split(cfg.coarse, ':');
  const std::string& name = parts[0];
  if (name == "exact") return CoarseSolver::exact();
  const SpdMatrix a_c = galerkin_coarse(dec);
  if (name == "file") {
    if (parts.size() != 2) throw ParseError("coarse file:path required");
    return CoarseSolver::approximate(dec,
                                     SpdMatrix(read_matrix_market_file(parts[1])));
  }
  if (name == "scaled") {
    if (parts.size() != 2) throw ParseError("coarse scaled:c required");
    const double c = std::stod(parts[1]);
    return CoarseSolver::approximate(dec, SpdMatrix(c * a_c.mat()));
  }
  if (name == "jacobi")
    return CoarseSolver::approximate(
        dec, SpdMatrix(Matrix(a_c.mat().diagonal().asDiagonal())));
  if (!cfg.bc_path.empty())
    return CoarseSolver::approximate(
        dec, SpdMatrix(read_matrix_market_file(cfg.bc_path)));
  throw ParseError("unknown coarse solver '" + cfg.coarse + "'");
}

json tolerances_json() {
  return json{{"symmetry_rel", 1e-12},
              {"identity", 1e-10},
              {"spectrum_entry", 1e-8},
              {"idempotency", 1e-10},
              {"sandwich_slack", 1e-10},
              {"monotonicity_slack", 1e-12}};
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." :
                         path.parent_path());
  std::ofstream out(path);
  out << text;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::BetaLe1: return "beta<=1";
    case Regime::Straddle: return "alpha<=1<beta";
    case Regime::AlphaGt1: return "1<alpha";
  }
  return "?";
}

int cmd_analyze(const InstanceConfig& cfg, const std::string& out_dir) {
  TwoLevelDecomposition dec = load_decomposition(cfg);
  Smoother sm = load_smoother(dec, cfg);
  CoarseSolver coarse = load_coarse(dec, cfg);
  log("analyze: instance loaded, n=" + std::to_string(dec.n()));

  json rep;
  rep["instance"] = cfg.gallery.empty() ? "files" : cfg.gallery;
  rep["seed"] = cfg.seed;
  rep["n"] = dec.n();
  rep["n_s"] = dec.n_s();
  rep["n_c"] = dec.n_c();
  Matrix sp(dec.n(), dec.n_s() + dec.n_c());
  sp << dec.S, dec.P;
  rep["ranks"] = {{"S", numerical_rank(dec.S)},
                  {"P", numerical_rank(dec.P)},
                  {"SP", numerical_rank(sp)},
                  {"StAP", numerical_rank(dec.S.transpose() * dec.A.mat() *
                                          dec.P)}};

  const ExactAnalysis an = analyze_exact(dec, sm);
  rep["gamma"] = an.gamma;
  rep["sigma_tl"] = an.sigma_tl;
  rep["norm_etl"] = an.norm_etl;
  rep["identity_residual"] = std::abs(an.norm_etl - (1.0 - an.sigma_tl));
  rep["spectrum_etl"] = an.spectrum_etl.eigenvalues;
  rep["spectrum_zero_count"] = an.spectrum_etl.zero_count;
  rep["nu"] = an.nu;
  if (an.k_tl.has_value())
    rep["k_tl"] = *an.k_tl;
  else
    rep["k_tl"] = nullptr;

  const Lemma41Quantities lq = lemma41_quantities(dec, sm);
  rep["lemma41"] = {{"lmin_complement", lq.lmin_complement},
                    {"lmax_complement", lq.lmax_complement},
                    {"lmin_proj", lq.lmin_proj},
                    {"lmax_proj", lq.lmax_proj},
                    {"rank_stap", lq.rank_stap}};
  if (lq.theta.has_value())
    rep["lemma41"]["theta"] = *lq.theta;
  else
    rep["lemma41"]["theta"] = nullptr;

  if (!coarse.is_exact()) {
    const InexactBounds ib = inexact_bounds(dec, sm, *coarse.B_c);
    rep["inexact"] = {{"alpha", ib.alpha},
                      {"beta", ib.beta},
                      {"rank_case", ib.rank_case == RankCase::FullRank
                                        ? "full"
                                        : "deficient"},
                      {"regime", regime_name(ib.regime)},
                      {"lower", ib.lower},
                      {"upper", ib.upper},
                      {"observed_norm", ib.observed},
                      {"mu_max", ib.mu_max}};
    const auto fvz = fvz_inexact_bound(dec, sm, *coarse.B_c);
    rep["fvz_bound"] = fvz.has_value() ? json(*fvz) : json(nullptr);
  } else {
    const auto fvz = fvz_inexact_bound(dec, sm, galerkin_coarse(dec));
    rep["fvz_bound"] = fvz.has_value() ? json(*fvz) : json(nullptr);
  }
  rep["tolerances"] = tolerances_json();

  const std::string text = rep.dump(2) + "\n";
  if (out_dir.empty()) {
    std::cout << text;
  } else {
    write_text(fs::path(out_dir) / "analysis.json", text);
    log("analyze: report written to " + out_dir + "/analysis.json");
  }
  return 0;
}

int cmd_solve(const InstanceConfig& cfg, const std::string& f_source,
              double tol, int max_sweeps, const std::string& out_dir) {
  TwoLevelDecomposition dec = load_decomposition(cfg);
  Smoother sm = load_smoother(dec, cfg);
  CoarseSolver coarse = load_coarse(dec, cfg);
  TlhbOperator op(dec, sm, coarse);

  Vector f;
  if (f_source == "random") {
    Rng rng(cfg.seed);
    f = rng.gaussian_matrix(dec.n(), 1);
  } else if (f_source == "ones") {
    f = Vector::Ones(dec.n());
  } else if (f_source == "zero") {
    f = Vector::Zero(dec.n());
  } else {
    f = read_matrix_market_file(f_source);
  }
  const Vector u0 = Vector::Zero(dec.n());
  const SolveResult res = solve(op, f, u0, tol, max_sweeps);

  std::ostringstream csv;
  csv << "sweep,residual,a_norm_error,ratio\n";
  csv.precision(17);
  for (std::size_t k = 0; k < res.history.residual_norms.size(); ++k) {
    csv << k << "," << res.history.residual_norms[k] << ","
        << res.history.a_norm_errors[k] << ",";
    if (k >= 1 && k - 1 < res.history.contraction_ratios.size())
      csv << res.history.contraction_ratios[k - 1];
    csv << "\n";
  }

  const double theoretical = norm_etl_inexact(op);
  double observed_rate = 0.0;
  const auto& ratios = res.history.contraction_ratios;
  if (!ratios.empty()) {
    double log_sum = 0.0;
    int used = 0;
    for (std::size_t k = ratios.size() / 2; k < ratios.size(); ++k) {
      if (ratios[k] > 0.0) {
        log_sum += std::log(ratios[k]);
        ++used;
      }
    }
    if (used > 0) observed_rate = std::exp(log_sum / used);
  }

  json summary;
  summary["converged"] = res.converged;
  summary["sweeps"] = res.sweeps;
  summary["observed_rate"] = observed_rate;
  summary["theoretical_norm"] = theoretical;
  summary["tol"] = tol;
  summary["seed"] = cfg.seed;

  if (out_dir.empty()) {
    std::cout << summary.dump(2) << "\n" << csv.str();
  } else {
    write_text(fs::path(out_dir) / "history.csv", csv.str());
    write_text(fs::path(out_dir) / "solve.json", summary.dump(2) + "\n");
  }
  return res.converged ? 0 : 3;
}

int cmd_optimal_p(const InstanceConfig& cfg, Eigen::Index n_c,
                  const std::string& out_dir) {
  TwoLevelDecomposition dec = load_decomposition(cfg);
  Smoother sm = load_smoother(dec, cfg);
  const OptimalInterpolation oi =
      optimal_interpolation(dec.A, dec.S, sm, n_c);
  TwoLevelDecomposition dec_star(dec.A, dec.S, oi.P_star);
  const double achieved = norm_etl_exact(dec_star, sm);

  json rep;
  rep["n_c"] = n_c;
  rep["mu"] = oi.mu;
  rep["bound"] = oi.bound;
  rep["achieved_norm"] = achieved;
  rep["attainment_residual"] = std::abs(achieved - oi.bound);
  rep["tolerances"] = tolerances_json();

  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  fs::create_directories(dir);
  write_matrix_market_file((dir / "p_star.mtx").string(), oi.P_star);
  write_text(dir / "optimal_p.json", rep.dump(2) + "\n");
  std::cout << rep.dump(2) << "\n";
  return 0;
}

int cmd_gen(const InstanceConfig& cfg, const std::string& out_dir) {
  TwoLevelDecomposition dec = load_decomposition(cfg);
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  fs::create_directories(dir);
  write_matrix_market_file((dir / "a.mtx").string(), dec.A.mat(), true);
  write_matrix_market_file((dir / "s.mtx").string(), dec.S, true);
  write_matrix_market_file((dir / "p.mtx").string(), dec.P, true);
  std::cout << "wrote a.mtx, s.mtx, p.mtx to " << dir.string() << "\n";
  return 0;
}

int cmd_verify(const std::string& suite, int count, std::uint64_t seed,
               const std::string& mutate, const std::string& out_dir) {
  using namespace tlhb::verify;
  const Mutation mutation = mutate == "mtilde-sign"
                                ? Mutation::MTildeSignError
                                : Mutation::None;
  std::vector<SuiteResult> results;
  if (suite == "all") {
    results = run_all(count, seed);
  } else if (suite == "identity") {
    results.push_back(suite_identity(count, seed, mutation));
  } else if (suite == "spectrum") {
    results.push_back(suite_spectrum(count, seed));
  } else if (suite == "optimal") {
    results.push_back(suite_optimal(count, seed));
  } else if (suite == "monotonicity") {
    results.push_back(suite_monotonicity(count, seed));
  } else if (suite == "bounds") {
    results.push_back(suite_bounds(count, seed));
  } else if (suite == "lemma41") {
    results.push_back(suite_lemma41(count, seed));
  } else if (suite == "preconditioner") {
    results.push_back(suite_preconditioner(count, seed));
  } else {
    throw ParseError("unknown suite '" + suite + "'");
  }

  bool all_ok = true;
  for (const auto& r : results) {
    std::cout << (r.ok() ? "PASS" : "FAIL") << " " << r.name << ": "
              << r.passed << " passed, " << r.failed
              << " failed, worst residual " << r.worst_residual << "\n";
    if (!r.ok()) {
      all_ok = false;
      std::cout << "  first failure: " << r.first_failure << "\n";
      if (!r.dump.empty()) {
        const fs::path dir =
            (out_dir.empty() ? fs::path(".") : fs::path(out_dir)) /
            ("failed_" + r.name);
        fs::create_directories(dir);
        for (const auto& [name, m] : r.dump)
          write_matrix_market_file((dir / (name + ".mtx")).string(), m);
        std::cout << "  failing instance dumped to " << dir.string() << "\n";
      }
    }
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level hierarchical basis method: solver and convergence "
               "analysis toolkit"};
  app.require_subcommand(1);

  InstanceConfig cfg;
  std::string out_dir;
  std::string format = "json";

  auto add_instance_flags = [&](CLI::App* sub) {
    sub->add_option("--gallery", cfg.gallery,
                    "d7 | d7plus | lap1d:N | lap2d:NX,NY | random:N,NS,NC");
    sub->add_option("--a", cfg.a_path, "Matrix Market file for A");
    sub->add_option("--s", cfg.s_path, "Matrix Market file for S");
    sub->add_option("--p", cfg.p_path, "Matrix Market file for P");
    sub->add_option("--bc", cfg.bc_path, "Matrix Market file for B_c");
    sub->add_option("--smoother", cfg.smoother,
                    "exact-as|jacobi|gs|sgs|custom:path");
    sub->add_option("--coarse", cfg.coarse, "exact|file:path|scaled:c|jacobi");
    sub->add_option("--seed", cfg.seed, "Seed for generated instances");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--format", format, "json|csv");
  };

  auto* analyze = app.add_subcommand("analyze", "Full convergence analysis");
  add_instance_flags(analyze);

  auto* solve_cmd = app.add_subcommand("solve", "Run the stationary solver");
  add_instance_flags(solve_cmd);
  std::string f_source = "random";
  double tol = 1e-10;
  int max_sweeps = 200;
  solve_cmd->add_option("--f", f_source, "random|ones|zero|<mm file>");
  solve_cmd->add_option("--tol", tol, "Relative residual tolerance");
  solve_cmd->add_option("--max-sweeps", max_sweeps, "Sweep limit");

  auto* optimal = app.add_subcommand("optimal-p",
                                     "Convergence-optimal interpolation");
  add_instance_flags(optimal);
  Eigen::Index n_c = 0;
  optimal->add_option("--nc", n_c, "Number of coarse columns")->required();

  auto* verify_cmd = app.add_subcommand("verify", "Run property suites");
  std::string suite = "all";
  int count = 100;
  std::uint64_t vseed = 7;
  std::string mutate;
  verify_cmd->add_option("suite", suite,
                         "identity|spectrum|optimal|monotonicity|bounds|"
                         "lemma41|preconditioner|all");
  verify_cmd->add_option("--count", count, "Instances per suite");
  verify_cmd->add_option("--seed", vseed, "Master seed");
  verify_cmd->add_option("--mutate", mutate,
                         "Fault injection (mtilde-sign) for self-tests");
  verify_cmd->add_option("--out", out_dir, "Output directory for dumps");

  auto* gen = app.add_subcommand("gen", "Export a gallery instance");
  add_instance_flags(gen);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(cfg, out_dir);
    if (solve_cmd->parsed())
      return cmd_solve(cfg, f_source, tol, max_sweeps, out_dir);
    if (optimal->parsed()) return cmd_optimal_p(cfg, n_c, out_dir);
    if (verify_cmd->parsed())
      return cmd_verify(suite, count, vseed, mutate, out_dir);
    if (gen->parsed()) return cmd_gen(cfg, out_dir);
  } catch (const Error& e) {
    json err{{"error", error_name(e)}, {"message", e.what()}};
    std::cerr << err.dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    json err{{"error", "Error"}, {"message", e.what()}};
    std::cerr << err.dump(2) << "\n";
    return 2;
  }
  return 0;
}
