#pragma once

#include <map>
#include <string>
#include <vector>

#include "cyclo/automorphism.hpp"

namespace cyclo {

// Site tags order the PBW normal form: infinity modes first, then finite
// sites by index, then origin modes. Applying a character to the infinity
// modes is then a left substitution on normal forms.
enum class SiteKind : int { Infinity = 0, Site = 1, Origin = 2 };

struct Mode {
  SiteKind kind = SiteKind::Site;
  int site = 0;   // site index; 0 for infinity/origin
  int power = 0;  // >= 0 at finite sites and origin, <= -1 at infinity
  int idx = 0;    // g basis index at sites, adapted index at origin/infinity

  friend bool operator<(const Mode& a, const Mode& b) {
    if (a.kind != b.kind) return int(a.kind) < int(b.kind);
    if (a.site != b.site) return a.site < b.site;
    if (a.power != b.power) return a.power < b.power;
    return a.idx < b.idx;
  }
  friend bool operator==(const Mode& a, const Mode& b) {
    return a.kind == b.kind && a.site == b.site && a.power == b.power && a.idx == b.idx;
  }
};

std::string mode_str(const SimpleLieAlgebra& L, const Automorphism& A, const Mode& m);

using ModeSum = std::vector<std::pair<Mode, cplx>>;

// g^{++}: truncated currents at N finite points, Gamma-equivariant modes at
// the origin and (with the opposite bracket) at infinity.
struct CurrentAlgebra {
  const SimpleLieAlgebra* L = nullptr;
  const Automorphism* A = nullptr;
  std::vector<cplx> z;
  int n_inf = 1;
  std::vector<int> n_sites;
  int n0 = 1;

  std::vector<Mode> modes;
  DualBasisPair duals;
  Vec F;     // at critical level
  cplx K{0.0};

  int N() const { return int(z.size()); }
  bool slot_exists(SiteKind kind, int site, int power) const;
  Vec mode_gvec(const Mode& m) const;

  // expand a g vector at the given slot; origin/infinity slots require the
  // vector to lie in Pi_{power mod T} g
  ModeSum expand(SiteKind kind, int site, int power, const Vec& x) const;

  // truncated bracket; opposite bracket at infinity, cross-site zero
  ModeSum bracket(const Mode& a, const Mode& b) const;
};

CurrentAlgebra build_current_algebra(const SimpleLieAlgebra& L, const Automorphism& A,
                                     const std::vector<cplx>& z, int n_inf,
                                     const std::vector<int>& n_sites, int n0);

// Degree <= 2 element of the enveloping algebra in PBW normal form:
// quadratic keys are always ordered pairs.
struct UElement {
  cplx constant{0.0};
  std::map<Mode, cplx> linear;
  std::map<std::pair<Mode, Mode>, cplx> quadratic;

  int degree() const {
    if (!quadratic.empty()) return 2;
    return linear.empty() ? 0 : 1;
  }
  UElement& operator+=(const UElement& o);
  UElement& operator*=(cplx s);
  double norm() const;  // max coefficient modulus
  void prune(double eps);
};

UElement u_product(const CurrentAlgebra& ca, const UElement& x, const UElement& y);
double u_distance(const UElement& a, const UElement& b);

// A(u) for X in g: truncated sum of the expansions at all marked points
UElement current_A_of_u(const CurrentAlgebra& ca, const Vec& X, cplx u);

// coeff * sum_a (opA I_a)[pa at slot A] (opB I^a)[pb at slot B]; opB applies
// to the dual basis; null ops mean identity; anti takes 1/2 {.,.}
UElement dual_pair_product(const CurrentAlgebra& ca, cplx coeff, const Mat* opA, SiteKind ka,
                           int sa, int pa, const Mat* opB, SiteKind kb, int sb, int pb,
                           bool anti = false);

// S(u) = 1/2 I_a(u) I^a(u) + F(u)/u + K/u^2 at the critical level
UElement S_of_u(const CurrentAlgebra& ca, cplx u);

// the partial-fraction side: sum over poles of the quadratic Hamiltonians
UElement hamiltonian_pf_sum(const CurrentAlgebra& ca, cplx u);

// Individual Hamiltonian families (k-independent elements).
UElement hamiltonian_site(const CurrentAlgebra& ca, int i, int p);
UElement hamiltonian_origin(const CurrentAlgebra& ca, int p);
UElement hamiltonian_infinity(const CurrentAlgebra& ca, int p);

// admissible sampling points for identity checks: annulus spanning the
// Gamma-translates of z, staying away from all poles
std::vector<cplx> sample_points(const CurrentAlgebra& ca, int count, std::uint64_t seed);

// relative coefficient-wise residual of S(u) - [K/u^2 + pf sum]
double surat_residual(const CurrentAlgebra& ca, cplx u);

// Rational functions with prescribed poles, for the residue-theorem utility.
struct RationalFunction {
  struct Pole {
    cplx x;
    std::vector<cplx> coeffs;  // c_r / (t - x)^r, r = 1..order
  };
  std::vector<Pole> poles;
  std::vector<cplx> poly;  // polynomial part, coefficient of t^k at index k

  cplx eval(cplx t) const;
};

// | -res_{t^-1} t^2 f + sum_i res_{t-x_i} f |, both residues taken by
// numerical contour quadrature
double residue_identity_check(const RationalFunction& f);

}  // namespace cyclo
