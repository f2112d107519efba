#pragma once

#include <vector>

#include "cyclo/lie.hpp"

namespace cyclo {

// A basis of g adapted to sigma: each vector lies in one eigenspace
// Pi_k g and is a weight vector for the fixed-point Cartan h^sigma. Raise and
// lower vectors are orbit sums of root vectors; Cartan vectors are orbit sums
// of coroots.
struct AdaptedVector {
  Vec v;             // g coordinates
  int k = 0;         // sigma eigenvalue omega^k
  GenKind kind = GenKind::Cartan;
  int rep = 0;       // orbit representative: root index or Dynkin node
  IVec weight_T;     // T * Pi_0(weight), integer alpha coords
  int height = 0;    // root height (0 for Cartan)
};

struct Automorphism {
  const SimpleLieAlgebra* L = nullptr;
  int T = 1;
  cplx omega{1.0, 0.0};
  std::vector<int> perm;        // Dynkin diagram permutation
  std::vector<cplx> tau;        // tau_alpha for every positive root
  Mat sigma_g;                  // matrix on g
  Mat sigma_hstar;              // L_sigma on h* in alpha coords
  std::vector<Mat> proj_g;      // Pi_k on g, k = 0..T-1
  std::vector<Mat> proj_hstar;  // Pi_k on h*

  std::vector<AdaptedVector> adapted;   // grouped by k, deterministic order
  std::vector<std::vector<int>> adapted_by_k;
  Mat adapt_cols;      // columns = adapted vectors
  Mat adapt_cols_inv;

  int knorm(long k) const { return int(((k % T) + T) % T); }

  const Mat& projector(long k) const { return proj_g[knorm(k)]; }
  const Mat& projector_hstar(long k) const { return proj_hstar[knorm(k)]; }

  // L_sigma^r eta, eta in alpha coords
  Vec sigma_dual(const Vec& eta, long r = 1) const;

  // expansion of x in the adapted basis (length = dim g)
  Vec expand_adapted(const Vec& x) const;

  // expansion of x, required to lie in Pi_k g: returns (adapted index, coeff)
  // pairs restricted to eigenvalue k; throws internal_error if x has
  // components outside Pi_k g beyond tol.
  std::vector<std::pair<int, cplx>> expand_in_eigenspace(const Vec& x, long k,
                                                         double tol = 1e-9) const;

  bool is_sigma_invariant_weight(const Vec& eta, double tol = 1e-12) const;

  // residual of the admissibility condition L_sigma chi = omega chi
  double chi_admissibility_residual(const Vec& chi) const;
};

// taus: one tau per Dynkin node, each a power of omega. Extension to all
// positive roots is derived by propagating sigma through brackets of root
// vectors; any inconsistency is a hard error.
Automorphism build_automorphism(const SimpleLieAlgebra& L, const std::vector<int>& perm,
                                const std::vector<cplx>& taus, int T, cplx omega);

Automorphism trivial_automorphism(const SimpleLieAlgebra& L);

// F = 1/2 sum_{p=1}^{T-1} omega^p [sigma^p I^a, I_a] / (omega^p - 1)
Vec element_F(const SimpleLieAlgebra& L, const Automorphism& A);

// K = 1/2 sum_{p=1}^{T-1} omega^p <sigma^p I^a, I_a> k_level / (omega^p - 1)^2
cplx scalar_K(const SimpleLieAlgebra& L, const Automorphism& A, cplx k_level);

// The shift weight, via traces over n and via the fixed-root product formula.
// Both return alpha coordinates and must agree to 1e-12.
Vec lambda0_trace(const SimpleLieAlgebra& L, const Automorphism& A);
Vec lambda0_roots(const SimpleLieAlgebra& L, const Automorphism& A);

}  // namespace cyclo
