#pragma once

#include "cyclo/blocks.hpp"

namespace cyclo {

// chi in h*, extended by zero on the root spaces; as a functional it only
// sees the Cartan component of Pi_{-1} g.
struct ChiForm {
  const SimpleLieAlgebra* L = nullptr;
  const Automorphism* A = nullptr;
  Vec chi;  // alpha coords

  cplx eval(const Vec& x) const { return L->weight_eval(chi, x); }
  bool zero() const { return chi.cwiseAbs().maxCoeff() == 0.0; }
};

// throws config_error unless L_sigma chi = omega chi (and checks the
// projector compatibility of the extension)
ChiForm make_chi(const SimpleLieAlgebra& L, const Automorphism& A, const Vec& chi_alpha);

// replace every infinity mode of power -1 by its chi value; deeper infinity
// modes are an error
UElement chi_substitute(const CurrentAlgebra& ca, const UElement& e, const ChiForm& chi);

struct HamiltonianSet {
  std::shared_ptr<const CurrentAlgebra> ca;
  ChiForm chi;
  std::vector<std::string> names;
  std::vector<UElement> ops;      // after chi substitution, zero modes only
  std::vector<UElement> ops_pre;  // before chi substitution (n_inf = 2 modes)
  cplx K{0.0};

  int find(const std::string& name) const;
};

// The five quadratic families at regular-singularity orders with one mild
// irregular point at infinity: H_{i,0}, H_{i,1} per site, H_{0,0}, H_{0,1},
// H_{inf,0}. Built directly from their closed forms; an independent route is
// chi_substitute over the partial-fraction families.
HamiltonianSet build_hamiltonians(const SimpleLieAlgebra& L, const Automorphism& A,
                                  const std::vector<cplx>& z, const ChiForm& chi);

struct PairResidual {
  std::string a, b;
  std::vector<int> block;  // drop key of the block the pair was checked on
  double residual;
};

// max_{P,Q in set} ||PQ - QP|| / (1 + ||P|| ||Q||) over the given blocks
double check_commutativity(BlockSpace& bs, const HamiltonianSet& set,
                           const std::vector<const WeightBlock*>& blocks,
                           std::vector<PairResidual>* details = nullptr);

// basis of g^sigma_chi = {X in g^sigma : chi([X, Y]) = 0 for Y in Pi_{-1} g},
// returned as weight-homogeneous components
std::vector<Vec> centralizer_of_chi(const SimpleLieAlgebra& L, const Automorphism& A,
                                    const ChiForm& chi);

// max over H in the set and X in the centralizer basis of ||[H, Delta(X)]||
double check_invariance(BlockSpace& bs, const HamiltonianSet& set, const ChiForm& chi,
                        const std::vector<const WeightBlock*>& blocks);

// all blocks with total drop height <= height_max
std::vector<const WeightBlock*> blocks_up_to_height(BlockSpace& bs, int height_max);

}  // namespace cyclo
