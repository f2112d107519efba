#pragma once

#include "cyclo/hamiltonians.hpp"

namespace cyclo {

struct BetheProblem {
  const SimpleLieAlgebra* L = nullptr;
  const Automorphism* A = nullptr;
  std::vector<cplx> z;
  std::vector<Vec> lambdas;  // alpha coords
  Vec lambda0;
  Vec Lambda0;               // shift weight of the automorphism
  ChiForm chi;
  std::vector<int> colors;   // Dynkin node per Bethe root, 0-based
  double solver_tol = 1e-10;

  int m() const { return int(colors.size()); }
  int N() const { return int(z.size()); }
  Vec alpha(int j) const;  // simple root of the j-th colour
};

BetheProblem make_bethe_problem(const SimpleLieAlgebra& L, const Automorphism& A,
                                const std::vector<cplx>& z, const std::vector<Vec>& lambdas,
                                const Vec& lambda0, const ChiForm& chi,
                                const std::vector<int>& colors, double solver_tol = 1e-10);

// lambda_inf = lambda0 + sum_i Pi_0 lambda_i - sum_j Pi_0 alpha_{c(j)}
Vec lambda_infinity(const BetheProblem& p);

// pairwise Gamma-orbit disjointness of the roots, and from Gamma z and 0
bool roots_admissible(const BetheProblem& p, const std::vector<cplx>& w, double tol = 1e-7);

Eigen::VectorXcd bethe_residual(const BetheProblem& p, const std::vector<cplx>& w);
Mat bethe_jacobian(const BetheProblem& p, const std::vector<cplx>& w);

struct BetheSolution {
  std::vector<cplx> w;  // sorted canonically within colour classes
  double residual = 0.0;
  int iterations = 0;
};

struct SolveOptions {
  int starts = 200;
  int max_iterations = 100;
  int max_halvings = 40;
  std::uint64_t seed = 12345;
  double dedup_tol = 1e-7;
};

struct SolveReport {
  std::vector<BetheSolution> solutions;
  int converged_runs = 0;
  int rejected_runs = 0;
  std::string diagnostic;  // set when nothing converged
};

SolveReport solve_bethe(const BetheProblem& p, const SolveOptions& opt);

// the recursive weight function, as a vector in the lambda_inf block
Vec weight_function(const BetheProblem& p, BlockSpace& bs, const std::vector<cplx>& w,
                    const WeightBlock** block_out = nullptr);

cplx eigenvalue_Ei(const BetheProblem& p, const std::vector<cplx>& w, int i);

struct EigenCheck {
  std::string name;
  cplx eigenvalue;       // formula value for H_{i,0}, Rayleigh quotient else
  bool formula = false;  // eigenvalue came from advice of the closed form
  double residual = 0.0;
  double sine_angle = 0.0;
};

struct EigenReport {
  bool inconclusive = false;  // weight function numerically zero
  double psi_norm = 0.0;
  std::vector<EigenCheck> checks;
  double max_formula_residual = 0.0;
};

EigenReport verify_eigenvector(const BetheProblem& p, BlockSpace& bs, const HamiltonianSet& set,
                               const std::vector<cplx>& w);

// max over X in n^sigma of ||Delta(X) psi|| / ||psi||, for chi = 0
double verify_singular(const BetheProblem& p, BlockSpace& bs, const std::vector<cplx>& w);

// the h*-valued master function nu(t) and its constant-term pairings at the
// Bethe roots, as diagnostics; res_t nu at 0 equals T lambda0 + Lambda0
Vec nu_of_t(const BetheProblem& p, const std::vector<cplx>& w, cplx t);
cplx nu_pairing(const BetheProblem& p, const std::vector<cplx>& w, int j);

}  // namespace cyclo
