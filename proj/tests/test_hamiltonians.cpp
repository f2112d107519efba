#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cyclo/hamiltonians.hpp"

using namespace cyclo;

namespace {

struct Setup {
  SimpleLieAlgebra L;
  Automorphism A;
  std::vector<cplx> z;
  Setup(int rank, int which, std::vector<cplx> zz) : L(build_simple_lie_algebra('A', rank)), z(zz) {
    if (which == 0)
      A = trivial_automorphism(L);
    else if (which == 1)
      A = build_automorphism(L, {0}, {cplx(-1.0)}, 2, cplx(-1.0));
    else
      A = build_automorphism(L, {1, 0}, {cplx(1.0), cplx(1.0)}, 2, cplx(-1.0));
  }
};

Vec sl3_chi(double c) {
  Vec chi(2);
  chi << cplx(c), cplx(-c);
  return chi;
}

}  // namespace

TEST_CASE("chi form validation") {
  Setup s(2, 2, {cplx(1.0, 0.2)});
  CHECK_NOTHROW(make_chi(s.L, s.A, sl3_chi(0.4)));
  Vec bad(2);
  bad << cplx(0.4), cplx(0.4);
  CHECK_THROWS_AS(make_chi(s.L, s.A, bad), config_error);

  // at T=1 every chi is admissible
  Setup s1(1, 0, {cplx(1.0)});
  CHECK_NOTHROW(make_chi(s1.L, s1.A, Vec::Constant(1, cplx(0.7, 0.1))));
}

TEST_CASE("chi substitution") {
  Setup s(2, 2, {cplx(1.0, 0.2)});
  ChiForm chi0 = make_chi(s.L, s.A, Vec::Zero(2));
  ChiForm chi = make_chi(s.L, s.A, sl3_chi(0.4));
  CurrentAlgebra ca = build_current_algebra(s.L, s.A, s.z, 2, {1}, 1);

  // chi = 0 sends every infinity mode to zero
  UElement e;
  int inf_idx = s.A.adapted_by_k[s.A.knorm(-1)][0];
  e.linear[Mode{SiteKind::Infinity, 0, -1, inf_idx}] = cplx(2.0, 1.0);
  e.linear[Mode{SiteKind::Site, 0, 0, s.L.e_index(0)}] = cplx(1.0);
  UElement r0 = chi_substitute(ca, e, chi0);
  CHECK(r0.constant == cplx(0.0));
  CHECK(r0.linear.size() == 1);

  // H_inf,0 before substitution maps to (T^2/2) chi(I_a) chi(I^a)
  HamiltonianSet set = build_hamiltonians(s.L, s.A, s.z, chi);
  int hi = set.find("H_inf,0");
  REQUIRE(hi >= 0);
  UElement sub = chi_substitute(*set.ca, set.ops_pre[hi], chi);
  CHECK(std::abs(sub.constant - set.ops[hi].constant) <= 1e-13);
  CHECK(sub.linear.empty());
  CHECK(std::abs(set.ops[hi].constant) > 1e-6);  // genuinely non-zero at T=2

  // deeper infinity modes are rejected
  CurrentAlgebra deep = build_current_algebra(s.L, s.A, s.z, 3, {1}, 1);
  UElement bad;
  int idx2 = s.A.adapted_by_k[s.A.knorm(-2)][0];
  bad.linear[Mode{SiteKind::Infinity, 0, -2, idx2}] = 1.0;
  CHECK_THROWS_AS(chi_substitute(deep, bad, chi), evaluation_error);
}

TEST_CASE("classical limit: T=1, N=2, chi=0 site Hamiltonian") {
  Setup s(1, 0, {cplx(1.0), cplx(2.5)});
  ChiForm chi = make_chi(s.L, s.A, Vec::Zero(1));
  HamiltonianSet set = build_hamiltonians(s.L, s.A, s.z, chi);
  // H_{1,0} = sum_a I_a^{(1)} I^{a(2)}/(z1 - z2) + I_a^{(1)} I^{a(0)}/z1
  const CurrentAlgebra& ca = *set.ca;
  UElement expect = dual_pair_product(ca, 1.0 / (s.z[0] - s.z[1]), nullptr, SiteKind::Site, 0, 0,
                                      nullptr, SiteKind::Site, 1, 0);
  expect += dual_pair_product(ca, 1.0 / s.z[0], nullptr, SiteKind::Site, 0, 0, nullptr,
                              SiteKind::Origin, 0, 0);
  CHECK(u_distance(set.ops[set.find("H_1,0")], expect) <= 1e-13);
}

TEST_CASE("direct displays equal the chi-substituted partial-fraction families") {
  auto compare = [](const Setup& s, const Vec& chiv) {
    ChiForm chi = make_chi(s.L, s.A, chiv);
    HamiltonianSet set = build_hamiltonians(s.L, s.A, s.z, chi);
    CurrentAlgebra ca =
        build_current_algebra(s.L, s.A, s.z, 2, std::vector<int>(s.z.size(), 1), 1);
    double worst = 0.0;
    for (int i = 1; i <= int(s.z.size()); ++i) {
      UElement a = chi_substitute(ca, hamiltonian_site(ca, i - 1, 0), chi);
      worst = std::max(worst,
                       u_distance(a, set.ops[set.find("H_" + std::to_string(i) + ",0")]));
      UElement b = chi_substitute(ca, hamiltonian_site(ca, i - 1, 1), chi);
      worst = std::max(worst,
                       u_distance(b, set.ops[set.find("H_" + std::to_string(i) + ",1")]));
    }
    worst = std::max(worst, u_distance(chi_substitute(ca, hamiltonian_origin(ca, 0), chi),
                                       set.ops[set.find("H_0,0")]));
    worst = std::max(worst, u_distance(chi_substitute(ca, hamiltonian_origin(ca, 1), chi),
                                       set.ops[set.find("H_0,1")]));
    worst = std::max(worst, u_distance(chi_substitute(ca, hamiltonian_infinity(ca, 0), chi),
                                       set.ops[set.find("H_inf,0")]));
    // pre-substitution elements agree with the families as well
    for (int i = 1; i <= int(s.z.size()); ++i)
      worst = std::max(worst, u_distance(hamiltonian_site(ca, i - 1, 0),
                                         set.ops_pre[set.find("H_" + std::to_string(i) + ",0")]));
    worst = std::max(worst, u_distance(hamiltonian_origin(ca, 0),
                                       set.ops_pre[set.find("H_0,0")]));
    worst = std::max(worst, u_distance(hamiltonian_infinity(ca, 0),
                                       set.ops_pre[set.find("H_inf,0")]));
    return worst;
  };
  CHECK(compare(Setup(1, 0, {cplx(1.0), cplx(-0.7, 0.8)}), Vec::Zero(1)) <= 1e-10);
  CHECK(compare(Setup(1, 0, {cplx(1.0), cplx(-0.7, 0.8)}), Vec::Constant(1, cplx(0.6, 0.2))) <=
        1e-10);
  CHECK(compare(Setup(1, 1, {cplx(1.0), cplx(1.6)}), Vec::Zero(1)) <= 1e-10);
  CHECK(compare(Setup(2, 2, {cplx(1.0), cplx(0.8, 0.6)}), sl3_chi(0.4)) <= 1e-10);
}

TEST_CASE("Cartan directions of the symmetry algebra act diagonally") {
  Setup s(2, 2, {cplx(1.0), cplx(0.8, 0.6)});
  ChiForm chi = make_chi(s.L, s.A, sl3_chi(0.4));
  HamiltonianSet set = build_hamiltonians(s.L, s.A, s.z, chi);
  std::vector<Vec> lambdas{s.L.fundamental_to_alpha(Vec(Vec::Constant(2, cplx(1.0)))),
                           s.L.fundamental_to_alpha(Vec(Vec::Constant(2, cplx(0.5, 0.3))))};
  Vec lambda0(2);
  lambda0 << cplx(0.4, 0.1), cplx(0.4, 0.1);
  BlockSpace bs = make_block_space(s.L, s.A, lambdas, lambda0, 20000);
  for (const WeightBlock* blk : blocks_up_to_height(bs, 3)) {
    for (int idx : s.A.adapted_by_k[0]) {
      if (s.A.adapted[idx].kind != GenKind::Cartan) continue;
      BlockOperator dx = diagonal_action(bs, s.A.adapted[idx].v, *blk);
      for (const UElement& op : set.ops) {
        Mat h = realize_uelement(bs, *set.ca, op, *blk).m;
        CHECK(op_norm(dx.m * h - h * dx.m) <= 1e-12 * (1.0 + op_norm(h) * op_norm(dx.m)));
      }
    }
  }
}

TEST_CASE("chi substitution is multiplicative on normal forms") {
  // infinity modes sit leftmost in the PBW order and commute at n_inf = 2,
  // so substituting before or after a product gives the same element
  Setup s(2, 2, {cplx(1.0, 0.2)});
  ChiForm chi = make_chi(s.L, s.A, sl3_chi(0.4));
  CurrentAlgebra ca = build_current_algebra(s.L, s.A, s.z, 2, {1}, 1);
  std::vector<Mode> pool;
  for (const Mode& m : ca.modes) pool.push_back(m);
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 40; ++trial) {
    UElement x, y;
    x.linear[pool[gen() % pool.size()]] = cplx(0.7, -0.2);
    x.linear[pool[gen() % pool.size()]] += cplx(-0.1, 0.4);
    y.linear[pool[gen() % pool.size()]] = cplx(0.3, 0.9);
    UElement lhs = chi_substitute(ca, u_product(ca, x, y), chi);
    UElement rhs = u_product(ca, chi_substitute(ca, x, chi), chi_substitute(ca, y, chi));
    CHECK(u_distance(lhs, rhs) <= 1e-12 * (1.0 + lhs.norm()));
  }
}

TEST_CASE("structural zeros") {
  Setup s2(1, 1, {cplx(1.0)});
  ChiForm chi0 = make_chi(s2.L, s2.A, Vec::Zero(1));
  HamiltonianSet set2 = build_hamiltonians(s2.L, s2.A, s2.z, chi0);
  CHECK(set2.ops_pre[set2.find("H_0,0")].norm() <= 1e-13);
  CHECK(set2.ops[set2.find("H_0,0")].norm() <= 1e-13);

  // T = 4: H_inf,0 vanishes too
  SimpleLieAlgebra L = build_simple_lie_algebra('A', 1);
  Automorphism A4 = build_automorphism(L, {0}, {cplx(0.0, 1.0)}, 4, cplx(0.0, 1.0));
  ChiForm chi4 = make_chi(L, A4, Vec::Zero(1));
  HamiltonianSet set4 = build_hamiltonians(L, A4, {cplx(1.0)}, chi4);
  CHECK(set4.ops_pre[set4.find("H_inf,0")].norm() <= 1e-13);
  CHECK(set4.ops_pre[set4.find("H_0,0")].norm() <= 1e-13);
}

TEST_CASE("site Casimir acts as its scalar") {
  Setup s(2, 2, {cplx(1.0), cplx(0.8, 0.6)});
  ChiForm chi = make_chi(s.L, s.A, sl3_chi(0.4));
  HamiltonianSet set = build_hamiltonians(s.L, s.A, s.z, chi);
  std::vector<Vec> lambdas{s.L.fundamental_to_alpha(Vec(Vec::Constant(2, cplx(1.0)))),
                           s.L.fundamental_to_alpha(Vec(Vec::Constant(2, cplx(0.5, 0.3))))};
  Vec lambda0(2);
  lambda0 << cplx(0.4, 0.1), cplx(0.4, 0.1);
  BlockSpace bs = make_block_space(s.L, s.A, lambdas, lambda0, 20000);
  for (const WeightBlock* blk : blocks_up_to_height(bs, 3)) {
    for (int i = 1; i <= 2; ++i) {
      BlockOperator op =
          realize_uelement(bs, *set.ca, set.ops[set.find("H_" + std::to_string(i) + ",1")], *blk);
      cplx cas = casimir_eigenvalue(s.L, lambdas[i - 1]);
      CHECK(op_norm(op.m - cas * Mat::Identity(blk->dim(), blk->dim())) <= 1e-11);
    }
  }
}

TEST_CASE("commutativity") {
  // classical Gaudin with a module at the origin
  {
    Setup s(1, 0, {cplx(1.0), cplx(2.5)});
    ChiForm chi = make_chi(s.L, s.A, Vec::Zero(1));
    HamiltonianSet set = build_hamiltonians(s.L, s.A, s.z, chi);
    BlockSpace bs = make_block_space(
        s.L, s.A, {Vec::Constant(1, cplx(0.5)), Vec::Constant(1, cplx(1.0))},
        Vec::Constant(1, cplx(0.4, 0.2)), 20000);
    std::vector<const WeightBlock*> blocks = blocks_up_to_height(bs, 4);
    CHECK(check_commutativity(bs, set, blocks) <= 1e-10);
  }
  // sl3 flip with twisted boundary
  {
    Setup s(2, 2, {cplx(1.0), cplx(0.8, 0.6)});
    ChiForm chi = make_chi(s.L, s.A, sl3_chi(0.4));
    HamiltonianSet set = build_hamiltonians(s.L, s.A, s.z, chi);
    std::vector<Vec> lambdas{s.L.fundamental_to_alpha(Vec(Vec::Constant(2, cplx(1.0)))),
                             s.L.fundamental_to_alpha(Vec(Vec::Constant(2, cplx(0.5, 0.3))))};
    Vec lambda0(2);
    lambda0 << cplx(0.4, 0.1), cplx(0.4, 0.1);
    BlockSpace bs = make_block_space(s.L, s.A, lambdas, lambda0, 20000);
    std::vector<const WeightBlock*> blocks = blocks_up_to_height(bs, 3);
    std::vector<PairResidual> details;
    CHECK(check_commutativity(bs, set, blocks, &details) <= 1e-9);
    CHECK(!details.empty());
  }
}

TEST_CASE("fixed-point invariance") {
  Setup s(2, 2, {cplx(1.0), cplx(0.8, 0.6)});
  std::vector<Vec> lambdas{s.L.fundamental_to_alpha(Vec(Vec::Constant(2, cplx(1.0)))),
                           s.L.fundamental_to_alpha(Vec(Vec::Constant(2, cplx(0.5, 0.3))))};
  Vec lambda0(2);
  lambda0 << cplx(0.4, 0.1), cplx(0.4, 0.1);

  // chi = 0: the full fixed-point algebra is a symmetry
  ChiForm chi0 = make_chi(s.L, s.A, Vec::Zero(2));
  CHECK(centralizer_of_chi(s.L, s.A, chi0).size() >= 3);
  {
    HamiltonianSet set = build_hamiltonians(s.L, s.A, s.z, chi0);
    BlockSpace bs = make_block_space(s.L, s.A, lambdas, lambda0, 20000);
    std::vector<const WeightBlock*> blocks = blocks_up_to_height(bs, 2);
    CHECK(check_invariance(bs, set, chi0, blocks) <= 1e-9);
  }

  // chi != 0: the centralizer is strictly smaller and still a symmetry
  ChiForm chi = make_chi(s.L, s.A, sl3_chi(0.4));
  std::vector<Vec> cent = centralizer_of_chi(s.L, s.A, chi);
  CHECK(cent.size() == 1);  // only the fixed Cartan direction survives
  for (const Vec& X : cent)
    CHECK((s.A.projector(0) * X - X).cwiseAbs().maxCoeff() <= 1e-10);
  {
    HamiltonianSet set = build_hamiltonians(s.L, s.A, s.z, chi);
    BlockSpace bs = make_block_space(s.L, s.A, lambdas, lambda0, 20000);
    std::vector<const WeightBlock*> blocks = blocks_up_to_height(bs, 2);
    CHECK(check_invariance(bs, set, chi, blocks) <= 1e-9);
  }
}
