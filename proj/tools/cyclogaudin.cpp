#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cyclo/config.hpp"

using namespace cyclo;
using nlohmann::ordered_json;

namespace {

struct CheckRow {
  std::string name;
  double residual;
  double tolerance;
  bool pass;
};

struct ReportBuilder {
  ordered_json body = ordered_json::object();
  std::vector<CheckRow> checks;

  void add(const std::string& name, double residual, double tol) {
    checks.push_back({name, residual, tol, residual <= tol});
  }
  void add_flag(const std::string& name, bool ok) {
    checks.push_back({name, ok ? 0.0 : 1.0, 0.5, ok});
  }
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  ordered_json checks_json() const {
    ordered_json arr = ordered_json::array();
    for (const auto& c : checks)
      arr.push_back({{"name", c.name},
                     {"residual", c.residual},
                     {"tolerance", c.tolerance},
                     {"pass", c.pass}});
    return arr;
  }
};

ordered_json vec_json(const Vec& v) {
  ordered_json arr = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(complex_json(v[i]));
  return arr;
}

ordered_json mat_json(const Mat& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

void run_info(const Instance& ins, bool dump_algebra, ReportBuilder& rb) {
  const SimpleLieAlgebra& L = ins.L;
  const Automorphism& A = ins.A;
  ordered_json j;
  j["algebra"] = {{"series", std::string(1, L.series)},
                  {"rank", L.rank},
                  {"dim", L.dim},
                  {"positive_roots", L.npos},
                  {"dual_coxeter", L.dual_coxeter}};
  j["automorphism"] = {{"T", A.T}, {"omega", complex_json(A.omega)}};
  ordered_json dims = ordered_json::array();
  for (int k = 0; k < A.T; ++k) dims.push_back(A.adapted_by_k[k].size());
  j["eigenspace_dims"] = dims;
  Vec l0t = lambda0_trace(L, A), l0r = lambda0_roots(L, A);
  j["Lambda0"] = vec_json(l0t);
  double l0res = (l0t - l0r).cwiseAbs().maxCoeff();
  rb.add("Lambda0_double_derivation", l0res, 1e-12);
  j["K_critical"] = complex_json(ins.ca->K);
  j["F_norm"] = ins.ca->F.cwiseAbs().maxCoeff();
  j["chi_admissibility_residual"] = A.chi_admissibility_residual(ins.chi.chi);
  if (dump_algebra) {
    ordered_json labels = ordered_json::array();
    for (int a = 0; a < L.dim; ++a) labels.push_back(L.label_str(a));
    j["basis"] = labels;
    ordered_json sc = ordered_json::array();
    for (int a = 0; a < L.dim; ++a)
      for (int b = 0; b < L.dim; ++b)
        for (const auto& [c, v] : L.table[std::size_t(a) * L.dim + b])
          sc.push_back(ordered_json::array({a, b, c, v}));
    j["structure_constants"] = sc;
    j["sigma_matrix"] = mat_json(A.sigma_g);
  }
  rb.body["info"] = j;
}

void run_surat(const Instance& ins, ReportBuilder& rb) {
  std::vector<cplx> us = sample_points(*ins.ca, ins.cfg.surat_samples, ins.cfg.seed);
  ordered_json samples = ordered_json::array();
  double worst = 0.0;
  std::vector<double> residuals(us.size());
  parallel_for(us.size(), [&](std::size_t i) { residuals[i] = surat_residual(*ins.ca, us[i]); });
  for (std::size_t i = 0; i < us.size(); ++i) {
    samples.push_back({{"u", complex_json(us[i])}, {"residual", residuals[i]}});
    worst = std::max(worst, residuals[i]);
  }
  rb.body["surat"] = {{"samples", samples}, {"max_residual", worst}};
  rb.add("surat_identity", worst, ins.cfg.tol_identity);
}

void run_commute(Instance& ins, bool dump_matrices, ReportBuilder& rb) {
  HamiltonianSet set = build_hamiltonians(ins.L, ins.A, ins.cfg.z, ins.chi);
  BlockSpace bs =
      make_block_space(ins.L, ins.A, ins.lambdas, ins.lambda0, ins.cfg.block_dim_cap);
  std::vector<const WeightBlock*> blocks = blocks_up_to_height(bs, ins.cfg.block_height_max);

  std::vector<PairResidual> details;
  double commut = check_commutativity(bs, set, blocks, &details);
  double invar = check_invariance(bs, set, ins.chi, blocks);

  ordered_json pairs = ordered_json::array();
  for (const auto& d : details)
    pairs.push_back(
        {{"a", d.a}, {"b", d.b}, {"block", d.block}, {"residual", d.residual}});
  ordered_json blocks_j = ordered_json::array();
  for (const WeightBlock* b : blocks) {
    ordered_json bj = {{"dim", b->dim()}};
    ordered_json key = ordered_json::array();
    for (int i = 0; i < b->drop_T.size(); ++i) key.push_back(b->drop_T[i]);
    bj["drop_T"] = key;
    if (dump_matrices) {
      ordered_json basis = ordered_json::array();
      for (const TensorMonomial& t : b->basis) {
        ordered_json tuple = ordered_json::array();
        for (const Monomial& m : t.f) tuple.push_back(m);
        basis.push_back(tuple);
      }
      bj["basis"] = basis;
      ordered_json ops = ordered_json::object();
      for (std::size_t i = 0; i < set.ops.size(); ++i)
        ops[set.names[i]] = mat_json(realize_uelement(bs, *set.ca, set.ops[i], *b).m);
      bj["operators"] = ops;
    }
    blocks_j.push_back(bj);
  }
  rb.body["commute"] = {{"pairs", pairs},
                        {"blocks", blocks_j},
                        {"max_commutator", commut},
                        {"invariance", invar}};
  rb.add("commutativity", commut, 1e-9);
  rb.add("fixed_point_invariance", invar, 1e-9);
  if (ins.A.T >= 2) rb.add("H_0,0_structural_zero", set.ops_pre[set.find("H_0,0")].norm(), 1e-12);
  if (ins.A.T >= 3)
    rb.add("H_inf,0_structural_zero", set.ops_pre[set.find("H_inf,0")].norm(), 1e-12);
}

BetheProblem problem_of(const Instance& ins) {
  return make_bethe_problem(ins.L, ins.A, ins.cfg.z, ins.lambdas, ins.lambda0, ins.chi,
                            ins.cfg.colors, ins.cfg.tol_solver);
}

SolveReport solve_of(const Instance& ins, const BetheProblem& p) {
  SolveOptions opt;
  opt.starts = ins.cfg.newton_starts;
  opt.seed = ins.cfg.seed;
  return solve_bethe(p, opt);
}

ordered_json roots_json(const std::vector<cplx>& w) {
  ordered_json arr = ordered_json::array();
  for (const cplx& v : w) arr.push_back(complex_json(v));
  return arr;
}

void run_bethe_solve(const Instance& ins, ReportBuilder& rb) {
  BetheProblem p = problem_of(ins);
  SolveReport rep = solve_of(ins, p);
  ordered_json sols = ordered_json::array();
  for (const auto& s : rep.solutions)
    sols.push_back({{"roots", roots_json(s.w)},
                    {"residual", s.residual},
                    {"iterations", s.iterations}});
  rb.body["bethe_solve"] = {{"solutions", sols},
                            {"converged_runs", rep.converged_runs},
                            {"rejected_runs", rep.rejected_runs},
                            {"diagnostic", rep.diagnostic}};
  rb.add_flag("bethe_solutions_found", !rep.solutions.empty());
}

void run_bethe_verify(Instance& ins, bool dump_matrices, ReportBuilder& rb) {
  BetheProblem p = problem_of(ins);
  SolveReport rep = solve_of(ins, p);
  HamiltonianSet set = build_hamiltonians(ins.L, ins.A, ins.cfg.z, ins.chi);
  BlockSpace bs =
      make_block_space(ins.L, ins.A, ins.lambdas, ins.lambda0, ins.cfg.block_dim_cap);

  ordered_json sols = ordered_json::array();
  double worst_eigen = 0.0, worst_singular = 0.0;
  bool any = !rep.solutions.empty();
  for (const auto& s : rep.solutions) {
    ordered_json sj;
    sj["roots"] = roots_json(s.w);
    EigenReport er = verify_eigenvector(p, bs, set, s.w);
    sj["psi_norm"] = er.psi_norm;
    sj["inconclusive"] = er.inconclusive;
    ordered_json checks = ordered_json::array();
    for (const auto& c : er.checks)
      checks.push_back({{"hamiltonian", c.name},
                        {"eigenvalue", complex_json(c.eigenvalue)},
                        {"from_formula", c.formula},
                        {"residual", c.residual},
                        {"sine_angle", c.sine_angle}});
    sj["eigen_checks"] = checks;
    if (!er.inconclusive) worst_eigen = std::max(worst_eigen, er.max_formula_residual);
    double sres = verify_singular(p, bs, s.w);
    sj["singular_residual"] = sres;
    if (p.chi.zero()) worst_singular = std::max(worst_singular, sres);
    ordered_json nu = ordered_json::array();
    for (int j = 0; j < p.m(); ++j) nu.push_back(complex_json(nu_pairing(p, s.w, j)));
    sj["nu_pairings"] = nu;
    if (dump_matrices) {
      const WeightBlock* blk = nullptr;
      Vec psi = weight_function(p, bs, s.w, &blk);
      sj["psi"] = vec_json(psi);
    }
    sols.push_back(sj);
  }
  rb.body["bethe_verify"] = {{"solutions", sols},
                             {"diagnostic", rep.diagnostic}};
  rb.add_flag("bethe_solutions_found", any);
  if (any) {
    rb.add("eigenvector_residual", worst_eigen, ins.cfg.tol_eigen);
    if (p.chi.zero()) rb.add("singular_residual", worst_singular, 1e-9);
  }
}

void run_singular(Instance& ins, ReportBuilder& rb) {
  BetheProblem p = problem_of(ins);
  if (!p.chi.zero()) throw config_error("the singular command requires chi = 0");
  SolveReport rep = solve_of(ins, p);
  BlockSpace bs =
      make_block_space(ins.L, ins.A, ins.lambdas, ins.lambda0, ins.cfg.block_dim_cap);
  ordered_json sols = ordered_json::array();
  double worst = 0.0;
  for (const auto& s : rep.solutions) {
    double r = verify_singular(p, bs, s.w);
    worst = std::max(worst, r);
    sols.push_back({{"roots", roots_json(s.w)}, {"singular_residual", r}});
  }
  rb.body["singular"] = {{"solutions", sols}, {"diagnostic", rep.diagnostic}};
  rb.add_flag("bethe_solutions_found", !rep.solutions.empty());
  if (!rep.solutions.empty()) rb.add("singular_residual", worst, 1e-9);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cyclotomic Gaudin models with one irregular point at infinity"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_path;
  std::uint64_t seed_override = 0;
  bool have_seed = false, dump_matrices = false, dump_algebra = false;
  app.add_option("--config", config_path, "configuration JSON")->required();
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--seed", seed_override, "override the configured RNG seed")
      ->each([&](const std::string&) { have_seed = true; });
  app.add_flag("--dump-matrices", dump_matrices, "include operator matrices in reports");
  app.add_flag("--dump-algebra", dump_algebra, "include basis and structure constants in info");

  std::vector<std::string> names{"info",        "commute",  "surat", "bethe-solve",
                                 "bethe-verify", "singular", "all"};
  std::map<std::string, CLI::App*> subs;
  for (const auto& n : names) subs[n] = app.add_subcommand(n);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  std::string cmd;
  for (const auto& [n, sub] : subs)
    if (sub->parsed()) cmd = n;

  auto t0 = std::chrono::steady_clock::now();
  ReportBuilder rb;
  int rc = 0;
  ordered_json out;
  try {
    RunConfig cfg = parse_config(config_path);
    if (have_seed) cfg.seed = seed_override;
    Instance ins = build_instance(cfg);

    if (cmd == "info" || cmd == "all") run_info(ins, dump_algebra, rb);
    if (cmd == "surat" || cmd == "all") run_surat(ins, rb);
    if (cmd == "commute" || cmd == "all") run_commute(ins, dump_matrices, rb);
    if (cmd == "bethe-solve") run_bethe_solve(ins, rb);
    if (cmd == "bethe-verify" || (cmd == "all" && !cfg.colors.empty()))
      run_bethe_verify(ins, dump_matrices, rb);
    if (cmd == "singular") run_singular(ins, rb);

    out["config_hash"] = cfg.config_hash;
    out["command"] = cmd;
    out["seed"] = cfg.seed;
    out["checks"] = rb.checks_json();
    out["pass"] = rb.pass();
    for (auto& [k, v] : rb.body.items()) out[k] = v;
    rc = rb.pass() ? 0 : 1;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const unsupported_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  auto t1 = std::chrono::steady_clock::now();
  out["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

  std::string text = out.dump(2) + "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "cannot write report to " << out_path << "\n";
      return 2;
    }
    f << text;
  } else {
    std::cout << text;
  }
  return rc;
}
