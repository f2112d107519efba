#pragma once

#include <map>
#include <vector>

#include "cyclo/automorphism.hpp"

namespace cyclo {

// A triangular decomposition with raising/lowering/Cartan bases given as
// vectors in g coordinates. Instantiated for g itself (Cartan-Weyl basis) and
// for the fixed-point algebra g^sigma (adapted orbit-sum basis). Lowering
// vectors are ordered by height so that PBW straightening only ever creates
// factors later in the order.
struct TriangularAlgebra {
  const SimpleLieAlgebra* L = nullptr;

  std::vector<Vec> raise_v, lower_v, cartan_v;
  std::vector<Vec> raise_wt;     // h^sigma-weight representative, alpha coords
  std::vector<IVec> raise_wt_T;  // T * Pi_0(weight), integer
  std::vector<int> heights;

  struct Element {
    std::vector<std::pair<int, cplx>> raise, lower;
    Vec cartan_g;  // Cartan part, g coordinates
  };

  // bracket tables in triangular coordinates
  std::vector<std::vector<std::vector<std::pair<int, cplx>>>> lower_lower;
  std::vector<std::vector<Element>> raise_lower;

  Mat basis_cols;  // cartan | raise | lower columns, for decompose()
  Eigen::CompleteOrthogonalDecomposition<Mat> basis_cod;

  int nlower() const { return int(lower_v.size()); }

  // split x (required to lie in the subalgebra) into triangular coordinates
  Element decompose(const Vec& x) const;
};

// full algebra g with its Cartan-Weyl basis; the automorphism fixes the
// T * Pi_0 weight bookkeeping used by block enumeration
TriangularAlgebra triangular_of_g(const SimpleLieAlgebra& L, const Automorphism& A);
// g^sigma with the adapted basis (Pi_0 n^-, h^sigma, Pi_0 n)
TriangularAlgebra triangular_of_fixed_points(const SimpleLieAlgebra& L, const Automorphism& A);

using Monomial = std::vector<int>;  // exponents over the lowering basis
using ModuleState = std::map<Monomial, cplx>;

struct VermaModule {
  const TriangularAlgebra* alg = nullptr;
  Vec lambda;  // highest weight, alpha coords

  IVec drop_T(const Monomial& m) const;  // T * Pi_0 of the weight drop
  int height(const Monomial& m) const;

  ModuleState act_lower(int j, const Monomial& m) const;
  ModuleState act_raise(int r, const Monomial& m) const;
  cplx cartan_eval(const Vec& h_g, const Monomial& m) const;
  ModuleState act_element(const TriangularAlgebra::Element& x, const Monomial& m) const;
  ModuleState act_gvec(const Vec& x, const ModuleState& s) const;
};

// monomials of the exact given height, deterministic (lexicographic) order
std::vector<Monomial> monomials_of_height(const TriangularAlgebra& alg, int h);

// Standalone Verma basis with at most depth_cap lowering factors, ordered by
// depth then lexicographically; for small exact tests.
struct VermaBasis {
  const TriangularAlgebra* alg;
  Vec lambda;
  std::vector<Monomial> basis;
  std::map<Monomial, int> index;
};

VermaBasis verma_basis(const TriangularAlgebra& alg, const Vec& lambda, int depth_cap);

// matrix of x on the span of a VermaBasis; entries that leave the span are
// reported through the overflow flag
Mat matrix_on_basis(const VermaModule& mod, const VermaBasis& vb, const Vec& x, bool* overflow);

}  // namespace cyclo
