#pragma once

#include <memory>

#include "cyclo/takiff.hpp"
#include "cyclo/verma.hpp"

namespace cyclo {

// One PBW monomial per tensor factor: sites 0..N-1 then the g^sigma factor.
struct TensorMonomial {
  std::vector<Monomial> f;
  friend bool operator<(const TensorMonomial& a, const TensorMonomial& b) { return a.f < b.f; }
  friend bool operator==(const TensorMonomial& a, const TensorMonomial& b) { return a.f == b.f; }
};

using TensorState = std::map<TensorMonomial, cplx>;

// Exact Pi_0-weight block, keyed by the integer vector D = T * Pi_0(weight
// drop from the tensor highest weight).
struct WeightBlock {
  IVec drop_T;
  std::vector<TensorMonomial> basis;
  std::map<TensorMonomial, int> index;
  int dim() const { return int(basis.size()); }
  Vec to_vector(const TensorState& s) const;  // throws on off-block entries
};

struct BlockOperator {
  const WeightBlock* source = nullptr;
  const WeightBlock* target = nullptr;
  Mat m;
};

double op_norm(const Mat& m);  // max absolute entry

// Tensor product of Verma modules over g at the sites and one over g^sigma
// at the origin, with exact block enumeration.
struct BlockSpace {
  const SimpleLieAlgebra* L = nullptr;
  const Automorphism* A = nullptr;
  std::vector<Vec> lambdas;  // alpha coords
  Vec lambda0;
  TriangularAlgebra tri_g, tri_sigma;
  long dim_cap = 200000;

  std::map<std::vector<int>, std::unique_ptr<WeightBlock>> cache;

  int nfactors() const { return int(lambdas.size()) + 1; }

  // Pi_0 of the total highest weight (alpha coords)
  Vec pi0_highest() const;

  const WeightBlock& block_by_drop(const IVec& drop_T);
  // block of Pi_0-weight mu (alpha coords); mu must differ from the highest
  // Pi_0 weight by a Pi_0-projected integer root combination
  const WeightBlock& block_of_weight(const Vec& mu);

  // module of one tensor factor (sites hold g Vermas, the last factor the
  // g^sigma Verma); modules are value types over the owned triangular data
  VermaModule factor_module(int factor) const;

  // act with a g vector (sites) or g^sigma vector (factor == N) on one factor
  TensorState act_factor(int factor, const Vec& x, const TensorMonomial& t) const;

  // integer T*Pi_0 weight of x; throws unless x is weight-homogeneous
  IVec weight_T_of(int factor, const Vec& x) const;
};

BlockSpace make_block_space(const SimpleLieAlgebra& L, const Automorphism& A,
                            const std::vector<Vec>& lambdas, const Vec& lambda0, long dim_cap);

// X acting in tensor slot `site` (1..N) or 0 for the g^sigma factor; X must
// be in g^sigma when site == 0
BlockOperator site_operator(BlockSpace& bs, const Vec& X, int site, const WeightBlock& source);

// sum_i X^{(i)} + X^{(0)} for X in g^sigma
BlockOperator diagonal_action(BlockSpace& bs, const Vec& X, const WeightBlock& source);

// realize a chi-substituted UElement (zero modes only) on a block
BlockOperator realize_uelement(BlockSpace& bs, const CurrentAlgebra& ca, const UElement& e,
                               const WeightBlock& source);

}  // namespace cyclo
