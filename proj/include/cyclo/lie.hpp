#pragma once

#include <map>
#include <string>
#include <vector>

#include "cyclo/types.hpp"

namespace cyclo {

// Basis convention: indices 0..rank-1 are the coroots H_i, then one E per
// positive root, then one F per positive root, with positive roots ordered by
// height and, within a height, lexicographically on their simple-root
// coordinates. Type A is realized through the defining representation
// (E_alpha = e_ij for alpha = alpha_i + ... + alpha_{j-1}, F_alpha = e_ji),
// which fixes all structure-constant signs; every downstream identity is
// tested against this table and never against external sign tables.
enum class GenKind { Cartan, Raise, Lower };

struct BasisLabel {
  GenKind kind;
  int index;  // Dynkin node for Cartan, positive-root index otherwise
};

struct SimpleLieAlgebra {
  char series = 'A';
  int rank = 0;
  int dim = 0;
  int npos = 0;

  Eigen::MatrixXi cartan;          // Cartan matrix A_ij
  std::vector<IVec> pos_roots;     // simple-root coordinates
  std::vector<int> root_height;
  std::vector<BasisLabel> labels;  // per basis index

  // brackets[a*dim+b] = expansion of [B_a, B_b] in the basis (sparse)
  std::vector<std::vector<std::pair<int, double>>> table;

  Eigen::MatrixXd form_g;   // <.,.> on g, long roots of square length 2
  Eigen::MatrixXd form_h;   // induced bilinear form on h* in alpha coords
  Eigen::MatrixXd form_h_inv;
  Eigen::VectorXd rho;      // Weyl vector, alpha coords
  int dual_coxeter = 0;

  std::map<std::vector<int>, int> root_lookup;

  int h_index(int i) const { return i; }
  int e_index(int r) const { return rank + r; }
  int f_index(int r) const { return rank + npos + r; }

  int find_root(const IVec& coords) const;  // -1 if not a positive root

  Vec bracket(const Vec& x, const Vec& y) const;
  cplx form(const Vec& x, const Vec& y) const;

  // bilinear <.,.> on h*, both arguments in alpha coords
  cplx weight_form(const Vec& a, const Vec& b) const;
  // lambda(h) with lambda in alpha coords and h in g coords (Cartan part only)
  cplx weight_eval(const Vec& lambda, const Vec& h) const;

  Vec fundamental_to_alpha(const Vec& fund) const;
  Vec alpha_to_fundamental(const Vec& alpha) const;

  // weight of basis vector in alpha coords (0 for Cartan, +/-root otherwise)
  Vec basis_weight(int a) const;

  std::string label_str(int a) const;
};

SimpleLieAlgebra build_simple_lie_algebra(char series, int rank);

struct DualBasisPair {
  std::vector<Vec> I;       // I_a = standard basis vectors
  std::vector<Vec> I_dual;  // I^a, <I_a, I^b> = delta_a^b
};

DualBasisPair dual_bases(const SimpleLieAlgebra& L);

// Quadratic Casimir eigenvalue <lambda, lambda + 2 rho>/2 on a highest-weight
// module, lambda in alpha coords.
cplx casimir_eigenvalue(const SimpleLieAlgebra& L, const Vec& lambda);

}  // namespace cyclo
