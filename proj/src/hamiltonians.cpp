#include "cyclo/hamiltonians.hpp"

#include <algorithm>
#include <set>

namespace cyclo {

ChiForm make_chi(const SimpleLieAlgebra& L, const Automorphism& A, const Vec& chi_alpha) {
  ChiForm c{&L, &A, chi_alpha};
  double res = A.chi_admissibility_residual(chi_alpha);
  if (res > 1e-12)
    throw config_error("chi violates L_sigma chi = omega chi (residual " + std::to_string(res) +
                       ")");
  // the zero extension sees only Pi_{-1} g
  for (int a = 0; a < L.dim; ++a) {
    for (int k = 0; k < A.T; ++k) {
      if (A.knorm(k) == A.knorm(-1)) continue;
      cplx v = c.eval(A.projector(k) * Vec::Unit(L.dim, a));
      if (std::abs(v) > 1e-9 * (1.0 + chi_alpha.cwiseAbs().maxCoeff()))
        throw internal_error("chi extension leaks outside Pi_{-1} g");
    }
  }
  return c;
}

UElement chi_substitute(const CurrentAlgebra& ca, const UElement& e, const ChiForm& chi) {
  auto value = [&](const Mode& m) -> cplx {
    if (m.power != -1)
      throw evaluation_error("chi substitution requires infinity modes of power -1 only");
    return chi.eval(ca.mode_gvec(m));
  };
  UElement out;
  out.constant = e.constant;
  for (const auto& [m, c] : e.linear) {
    if (m.kind == SiteKind::Infinity)
      out.constant += c * value(m);
    else
      out.linear[m] += c;
  }
  for (const auto& [k, c] : e.quadratic) {
    bool a_inf = k.first.kind == SiteKind::Infinity;
    bool b_inf = k.second.kind == SiteKind::Infinity;
    if (a_inf && b_inf)
      out.constant += c * value(k.first) * value(k.second);
    else if (a_inf)
      out.linear[k.second] += c * value(k.first);
    else if (b_inf)
      out.linear[k.first] += c * value(k.second);  // unreachable in normal form
    else
      out.quadratic[k] += c;
  }
  return out;
}

int HamiltonianSet::find(const std::string& name) const {
  for (int i = 0; i < int(names.size()); ++i)
    if (names[i] == name) return i;
  return -1;
}

HamiltonianSet build_hamiltonians(const SimpleLieAlgebra& L, const Automorphism& A,
                                  const std::vector<cplx>& z, const ChiForm& chi) {
  // regular singularities everywhere plus one mild irregular point at infinity
  auto cap = std::make_shared<CurrentAlgebra>(
      build_current_algebra(L, A, z, 2, std::vector<int>(z.size(), 1), 1));
  const CurrentAlgebra& ca = *cap;
  const int T = A.T;
  const int N = int(z.size());
  const double Td = double(T);

  std::vector<Mat> sig(T);
  sig[0] = Mat::Identity(L.dim, L.dim);
  for (int l = 1; l < T; ++l) sig[l] = A.sigma_g * sig[l - 1];

  HamiltonianSet set;
  set.ca = cap;
  set.chi = chi;
  set.K = cap->K;

  auto chi_linear_term = [&](int site, bool chi_on_first, cplx coeff) {
    // coeff * sum_a chi(Pi_{-1} I_a) I^a[0]_site (or with a <-> dual swapped)
    UElement e;
    for (int a = 0; a < L.dim; ++a) {
      Vec first = chi_on_first ? ca.duals.I[a] : ca.duals.I_dual[a];
      Vec second = chi_on_first ? ca.duals.I_dual[a] : ca.duals.I[a];
      cplx cv = chi.eval(A.projector(-1) * first);
      if (cv == cplx(0.0)) continue;
      SiteKind kind = site == 0 ? SiteKind::Origin : SiteKind::Site;
      Vec vsec = site == 0 ? Vec(A.projector(0) * second) : second;
      for (const auto& [m, c] : ca.expand(kind, site == 0 ? 0 : site - 1, 0, vsec))
        e.linear[m] += coeff * cv * c;
    }
    return e;
  };
  auto inf_pair_term = [&](int site, bool inf_on_first, cplx coeff) {
    // same term before substitution: (Pi_{-1} .)[-1]_inf against a zero mode
    const Mat& pm1 = A.projector(-1);
    SiteKind kind = site == 0 ? SiteKind::Origin : SiteKind::Site;
    int s = site == 0 ? 0 : site - 1;
    const Mat* op_other = site == 0 ? &A.projector(0) : nullptr;
    if (inf_on_first)
      return dual_pair_product(ca, coeff, &pm1, SiteKind::Infinity, 0, -1, op_other, kind, s, 0);
    return dual_pair_product(ca, coeff, op_other, kind, s, 0, &pm1, SiteKind::Infinity, 0, -1);
  };

  for (int i = 1; i <= N; ++i) {
    UElement H, Hpre;
    for (int j = 1; j <= N; ++j) {
      if (j == i) continue;
      for (int l = 0; l < T; ++l) {
        cplx coeff = 1.0 / (z[i - 1] - ipow(A.omega, -l) * z[j - 1]);
        H += dual_pair_product(ca, coeff, nullptr, SiteKind::Site, i - 1, 0, &sig[l],
                               SiteKind::Site, j - 1, 0);
      }
    }
    for (int l = 1; l < T; ++l) {
      cplx coeff = 1.0 / ((1.0 - ipow(A.omega, -l)) * z[i - 1]);
      H += dual_pair_product(ca, coeff, &sig[l], SiteKind::Site, i - 1, 0, nullptr, SiteKind::Site,
                             i - 1, 0);
    }
    H += dual_pair_product(ca, Td / z[i - 1], nullptr, SiteKind::Site, i - 1, 0, &A.projector(0),
                           SiteKind::Origin, 0, 0);
    Hpre = H;
    H += chi_linear_term(i, true, Td);        // T I^{a(i)} chi(Pi_{-1} I_a)
    Hpre += inf_pair_term(i, true, Td);
    H.prune(1e-14 * (1.0 + H.norm()));
    Hpre.prune(1e-14 * (1.0 + Hpre.norm()));
    set.names.push_back("H_" + std::to_string(i) + ",0");
    set.ops.push_back(H);
    set.ops_pre.push_back(Hpre);
  }
  for (int i = 1; i <= N; ++i) {
    UElement H = dual_pair_product(ca, cplx(0.5), nullptr, SiteKind::Site, i - 1, 0, nullptr,
                                   SiteKind::Site, i - 1, 0);
    set.names.push_back("H_" + std::to_string(i) + ",1");
    set.ops.push_back(H);
    set.ops_pre.push_back(H);
  }
  {
    UElement H, Hpre;
    for (int i = 1; i <= N; ++i) {
      cplx coeff = -Td * Td / z[i - 1];
      H += dual_pair_product(ca, coeff, &A.projector(-1), SiteKind::Site, i - 1, 0,
                             &A.projector(0), SiteKind::Origin, 0, 0);
    }
    Hpre = H;
    H += chi_linear_term(0, false, Td * Td);  // T^2 (Pi_0 I_a)^{(0)} chi(Pi_{-1} I^a)
    Hpre += inf_pair_term(0, false, Td * Td);
    H.prune(1e-13 * (1.0 + H.norm()));
    Hpre.prune(1e-13 * (1.0 + Hpre.norm()));
    set.names.push_back("H_0,0");
    set.ops.push_back(H);
    set.ops_pre.push_back(Hpre);
  }
  {
    UElement H = dual_pair_product(ca, cplx(Td * Td / 2.0), &A.projector(0), SiteKind::Origin, 0,
                                   0, &A.projector(0), SiteKind::Origin, 0, 0);
    for (const auto& [m, c] : ca.expand(SiteKind::Origin, 0, 0, ca.F)) H.linear[m] += Td * c;
    H.prune(1e-13 * (1.0 + H.norm()));
    set.names.push_back("H_0,1");
    set.ops.push_back(H);
    set.ops_pre.push_back(H);
  }
  {
    UElement H, Hpre;
    cplx acc = 0.0;
    for (int a = 0; a < L.dim; ++a)
      acc += chi.eval(A.projector(-1) * ca.duals.I[a]) *
             chi.eval(A.projector(-1) * ca.duals.I_dual[a]);
    H.constant = Td * Td / 2.0 * acc;
    Hpre = dual_pair_product(ca, cplx(Td * Td / 2.0), &A.projector(-1), SiteKind::Infinity, 0, -1,
                             &A.projector(-1), SiteKind::Infinity, 0, -1);
    Hpre.prune(1e-13 * (1.0 + Hpre.norm()));
    if (std::abs(H.constant) < 1e-13) H.constant = 0.0;
    set.names.push_back("H_inf,0");
    set.ops.push_back(H);
    set.ops_pre.push_back(Hpre);
  }
  return set;
}

double check_commutativity(BlockSpace& bs, const HamiltonianSet& set,
                           const std::vector<const WeightBlock*>& blocks,
                           std::vector<PairResidual>* details) {
  // the set is weight-preserving, so realization only looks up blocks that
  // are already in the cache and the per-block work can run fork-join
  std::vector<std::vector<PairResidual>> rows(blocks.size());
  parallel_for(blocks.size(), [&](std::size_t b) {
    const WeightBlock* blk = blocks[b];
    if (blk->dim() == 0) return;
    std::vector<Mat> mats(set.ops.size());
    for (std::size_t i = 0; i < set.ops.size(); ++i)
      mats[i] = realize_uelement(bs, *set.ca, set.ops[i], *blk).m;
    std::vector<int> key(blk->drop_T.data(), blk->drop_T.data() + blk->drop_T.size());
    for (std::size_t i = 0; i < mats.size(); ++i) {
      for (std::size_t j = i + 1; j < mats.size(); ++j) {
        double r = op_norm(mats[i] * mats[j] - mats[j] * mats[i]) /
                   (1.0 + op_norm(mats[i]) * op_norm(mats[j]));
        rows[b].push_back({set.names[i], set.names[j], key, r});
      }
    }
  });
  double worst = 0.0;
  for (const auto& row : rows)
    for (const auto& pr : row) {
      worst = std::max(worst, pr.residual);
      if (details) details->push_back(pr);
    }
  return worst;
}

std::vector<Vec> centralizer_of_chi(const SimpleLieAlgebra& L, const Automorphism& A,
                                    const ChiForm& chi) {
  const auto& fixed = A.adapted_by_k[0];
  const auto& minus = A.adapted_by_k[A.knorm(-1)];

  std::vector<Vec> raw;
  if (chi.zero() || minus.empty()) {
    for (int idx : fixed) raw.push_back(A.adapted[idx].v);
  } else {
    Mat M(minus.size(), fixed.size());
    for (std::size_t y = 0; y < minus.size(); ++y)
      for (std::size_t b = 0; b < fixed.size(); ++b)
        M(y, b) = chi.eval(L.bracket(A.adapted[fixed[b]].v, A.adapted[minus[y]].v));
    Eigen::FullPivLU<Mat> lu(M);
    lu.setThreshold(1e-10);
    Mat ker = lu.kernel();
    for (int c = 0; c < ker.cols(); ++c) {
      Vec v = Vec::Zero(L.dim);
      for (std::size_t b = 0; b < fixed.size(); ++b) v += ker(b, c) * A.adapted[fixed[b]].v;
      raw.push_back(v);
    }
  }

  // split into h^sigma-weight-homogeneous components for block realization
  std::vector<Vec> out;
  for (const Vec& v : raw) {
    std::map<std::vector<int>, Vec> groups;
    Vec coords = A.expand_adapted(v);
    double scale = 1.0 + v.cwiseAbs().maxCoeff();
    for (int a = 0; a < L.dim; ++a) {
      if (std::abs(coords[a]) <= 1e-12 * scale) continue;
      const AdaptedVector& av = A.adapted[a];
      std::vector<int> key(av.weight_T.data(), av.weight_T.data() + av.weight_T.size());
      key.push_back(av.kind == GenKind::Cartan ? 0 : 1);
      auto [it, fresh] = groups.emplace(key, Vec::Zero(L.dim));
      (void)fresh;
      it->second += coords[a] * av.v;
    }
    for (auto& [k, g] : groups) out.push_back(g);
  }
  return out;
}

double check_invariance(BlockSpace& bs, const HamiltonianSet& set, const ChiForm& chi,
                        const std::vector<const WeightBlock*>& blocks) {
  std::vector<Vec> basis = centralizer_of_chi(*bs.L, *bs.A, chi);
  double worst = 0.0;
  for (const WeightBlock* blk : blocks) {
    if (blk->dim() == 0) continue;
    for (const Vec& X : basis) {
      BlockOperator dx = diagonal_action(bs, X, *blk);
      for (std::size_t i = 0; i < set.ops.size(); ++i) {
        Mat h_src = realize_uelement(bs, *set.ca, set.ops[i], *blk).m;
        Mat h_tgt = realize_uelement(bs, *set.ca, set.ops[i], *dx.target).m;
        double r = op_norm(dx.m * h_src - h_tgt * dx.m) /
                   (1.0 + op_norm(h_src) * op_norm(dx.m));
        worst = std::max(worst, r);
      }
    }
  }
  return worst;
}

std::vector<const WeightBlock*> blocks_up_to_height(BlockSpace& bs, int height_max) {
  std::vector<std::pair<IVec, int>> gens;  // (weight_T drop, height)
  if (!bs.lambdas.empty())
    for (std::size_t r = 0; r < bs.tri_g.raise_wt_T.size(); ++r)
      gens.push_back({bs.tri_g.raise_wt_T[r], bs.tri_g.heights[r]});
  for (std::size_t r = 0; r < bs.tri_sigma.raise_wt_T.size(); ++r)
    gens.push_back({bs.tri_sigma.raise_wt_T[r], bs.tri_sigma.heights[r]});

  std::set<std::vector<int>> keys;
  std::function<void(std::size_t, IVec, int)> rec = [&](std::size_t g, IVec acc, int h) {
    keys.insert(std::vector<int>(acc.data(), acc.data() + acc.size()));
    if (g == gens.size()) return;
    for (int n = 1; h + n * gens[g].second <= height_max; ++n)
      rec(g + 1, IVec(acc + n * gens[g].first), h + n * gens[g].second);
    rec(g + 1, acc, h);
  };
  rec(0, IVec::Zero(bs.L->rank), 0);

  std::vector<const WeightBlock*> out;
  for (const auto& k : keys) {
    IVec d(int(k.size()));
    for (std::size_t i = 0; i < k.size(); ++i) d[int(i)] = k[i];
    const WeightBlock& blk = bs.block_by_drop(d);
    if (blk.dim() > 0) out.push_back(&blk);
  }
  return out;
}

}  // namespace cyclo
