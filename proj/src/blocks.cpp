#include "cyclo/blocks.hpp"

#include <algorithm>

namespace cyclo {

Vec WeightBlock::to_vector(const TensorState& s) const {
  Vec out = Vec::Zero(dim());
  for (const auto& [t, c] : s) {
    auto it = index.find(t);
    if (it == index.end()) throw internal_error("state has off-block entries");
    out[it->second] += c;
  }
  return out;
}

double op_norm(const Mat& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

Vec BlockSpace::pi0_highest() const {
  Vec total = lambda0;
  for (const auto& l : lambdas) total += l;
  return A->projector_hstar(0) * total;
}

const WeightBlock& BlockSpace::block_by_drop(const IVec& drop_T) {
  std::vector<int> key(drop_T.data(), drop_T.data() + drop_T.size());
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto blk = std::make_unique<WeightBlock>();
  blk->drop_T = drop_T;
  long total_h_T = 0;
  for (int i = 0; i < drop_T.size(); ++i) total_h_T += drop_T[i];
  if (total_h_T >= 0 && total_h_T % A->T == 0) {
    int h_tot = int(total_h_T / A->T);
    std::vector<const TriangularAlgebra*> algs;
    algs.reserve(lambdas.size() + 1);
    for (int i = 0; i < int(lambdas.size()); ++i) algs.push_back(&tri_g);
    algs.push_back(&tri_sigma);

    TensorMonomial cur;
    cur.f.resize(algs.size());
    IVec acc = IVec::Zero(drop_T.size());
    std::function<void(int, int)> rec = [&](int factor, int h_rem) {
      if (factor == int(algs.size())) {
        if (h_rem == 0 && acc == drop_T) {
          blk->basis.push_back(cur);
          if (long(blk->basis.size()) > dim_cap)
            throw resource_error("weight block exceeds the dimension safety cap");
        }
        return;
      }
      const TriangularAlgebra& alg = *algs[factor];
      VermaModule probe{&alg, Vec::Zero(L->rank)};
      for (int h = 0; h <= h_rem; ++h) {
        for (const auto& m : monomials_of_height(alg, h)) {
          cur.f[factor] = m;
          IVec d = probe.drop_T(m);
          acc += d;
          rec(factor + 1, h_rem - h);
          acc -= d;
        }
      }
      cur.f[factor].assign(alg.nlower(), 0);
    };
    rec(0, h_tot);
  }
  std::sort(blk->basis.begin(), blk->basis.end());
  for (int i = 0; i < int(blk->basis.size()); ++i) blk->index[blk->basis[i]] = i;
  auto [pos, ok] = cache.emplace(std::move(key), std::move(blk));
  (void)ok;
  return *pos->second;
}

const WeightBlock& BlockSpace::block_of_weight(const Vec& mu) {
  Vec diff = double(A->T) * (pi0_highest() - mu);
  IVec d(L->rank);
  for (int i = 0; i < L->rank; ++i) {
    double re = diff[i].real();
    long r = std::lround(re);
    if (std::abs(diff[i].imag()) > 1e-6 || std::abs(re - double(r)) > 1e-6)
      throw config_error("requested weight is not an integral Pi_0 drop from the highest weight");
    d[i] = int(r);
  }
  return block_by_drop(d);
}

VermaModule BlockSpace::factor_module(int factor) const {
  if (factor < int(lambdas.size())) return VermaModule{&tri_g, lambdas[factor]};
  return VermaModule{&tri_sigma, lambda0};
}

TensorState BlockSpace::act_factor(int factor, const Vec& x, const TensorMonomial& t) const {
  VermaModule mod = factor_module(factor);
  ModuleState s = mod.act_gvec(x, {{t.f[factor], cplx(1.0)}});
  TensorState out;
  for (const auto& [m, c] : s) {
    TensorMonomial nt = t;
    nt.f[factor] = m;
    out[nt] += c;
  }
  return out;
}

IVec BlockSpace::weight_T_of(int factor, const Vec& x) const {
  const TriangularAlgebra& alg = factor < int(lambdas.size()) ? tri_g : tri_sigma;
  TriangularAlgebra::Element e = alg.decompose(x);
  bool have = false;
  IVec w = IVec::Zero(L->rank);
  auto absorb = [&](const IVec& cand) {
    if (!have) {
      w = cand;
      have = true;
    } else if (w != cand) {
      throw internal_error("vector is not weight-homogeneous");
    }
  };
  if (e.cartan_g.cwiseAbs().maxCoeff() > 0.0) absorb(IVec::Zero(L->rank));
  for (const auto& [r, c] : e.raise) absorb(alg.raise_wt_T[r]);
  for (const auto& [l, c] : e.lower) absorb(IVec(-alg.raise_wt_T[l]));
  return w;
}

BlockSpace make_block_space(const SimpleLieAlgebra& L, const Automorphism& A,
                            const std::vector<Vec>& lambdas, const Vec& lambda0, long dim_cap) {
  if (!A.is_sigma_invariant_weight(lambda0))
    throw config_error("lambda0 must be sigma-invariant");
  BlockSpace bs;
  bs.L = &L;
  bs.A = &A;
  bs.lambdas = lambdas;
  bs.lambda0 = lambda0;
  bs.tri_g = triangular_of_g(L, A);
  bs.tri_sigma = triangular_of_fixed_points(L, A);
  bs.dim_cap = dim_cap;
  return bs;
}

namespace {

int factor_of_site(const BlockSpace& bs, int site) {
  if (site == 0) return int(bs.lambdas.size());
  if (site < 1 || site > int(bs.lambdas.size()))
    throw config_error("site index out of range");
  return site - 1;
}

}  // namespace

BlockOperator site_operator(BlockSpace& bs, const Vec& X, int site, const WeightBlock& source) {
  int factor = factor_of_site(bs, site);
  if (site == 0) {
    Vec px = bs.A->projector(0) * X;
    if ((px - X).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + X.cwiseAbs().maxCoeff()))
      throw config_error("operator at the origin factor must lie in g^sigma");
  }
  IVec dT = bs.weight_T_of(factor, X);
  BlockOperator op;
  op.source = &source;
  op.target = &bs.block_by_drop(source.drop_T - dT);
  op.m = Mat::Zero(op.target->dim(), source.dim());
  for (int c = 0; c < source.dim(); ++c) {
    for (const auto& [t, v] : bs.act_factor(factor, X, source.basis[c])) {
      auto it = op.target->index.find(t);
      if (it == op.target->index.end()) throw internal_error("off-block entry in site operator");
      op.m(it->second, c) += v;
    }
  }
  return op;
}

BlockOperator diagonal_action(BlockSpace& bs, const Vec& X, const WeightBlock& source) {
  BlockOperator total = site_operator(bs, X, 0, source);
  for (int i = 1; i <= int(bs.lambdas.size()); ++i) {
    BlockOperator op = site_operator(bs, X, i, source);
    if (op.target != total.target) throw internal_error("diagonal action has mixed targets");
    total.m += op.m;
  }
  return total;
}

namespace {

struct RealizedMode {
  int factor;
  Vec x;
  IVec dT;
};

RealizedMode realize_mode(BlockSpace& bs, const CurrentAlgebra& ca, const Mode& m) {
  if (m.kind == SiteKind::Infinity)
    throw evaluation_error("unrealizable mode (apply chi first): " +
                           mode_str(*bs.L, *bs.A, m));
  if (m.power != 0)
    throw evaluation_error("unrealizable mode (power beyond the module): " +
                           mode_str(*bs.L, *bs.A, m));
  RealizedMode rm;
  rm.factor = m.kind == SiteKind::Site ? m.site : int(bs.lambdas.size());
  rm.x = ca.mode_gvec(m);
  if (m.kind == SiteKind::Site) {
    const BasisLabel& lb = bs.L->labels[m.idx];
    IVec w = IVec::Zero(bs.L->rank);
    if (lb.kind != GenKind::Cartan) {
      IVec cr = bs.L->pos_roots[lb.index];
      for (int r = 0; r < bs.A->T; ++r) {
        w += cr;
        IVec nx = IVec::Zero(bs.L->rank);
        for (int i = 0; i < bs.L->rank; ++i) nx[bs.A->perm[i]] = cr[i];
        cr = nx;
      }
      if (lb.kind == GenKind::Lower) w = -w;
    }
    rm.dT = w;
  } else {
    rm.dT = bs.A->adapted[m.idx].weight_T;
  }
  return rm;
}

}  // namespace

BlockOperator realize_uelement(BlockSpace& bs, const CurrentAlgebra& ca, const UElement& e,
                               const WeightBlock& source) {
  bool have_shift = false;
  IVec shift = IVec::Zero(bs.L->rank);
  auto absorb = [&](const IVec& s) {
    if (!have_shift) {
      shift = s;
      have_shift = true;
    } else if (shift != s) {
      throw internal_error("UElement is not Pi_0-weight homogeneous");
    }
  };

  std::map<Mode, RealizedMode> rm;
  auto realized = [&](const Mode& m) -> const RealizedMode& {
    auto it = rm.find(m);
    if (it == rm.end()) it = rm.emplace(m, realize_mode(bs, ca, m)).first;
    return it->second;
  };

  const double floor = 1e-14 * (1.0 + e.norm());
  auto live = [&](cplx c) { return std::abs(c) > floor; };
  if (live(e.constant)) absorb(IVec::Zero(bs.L->rank));
  for (const auto& [m, c] : e.linear)
    if (live(c)) absorb(realized(m).dT);
  for (const auto& [k, c] : e.quadratic)
    if (live(c)) absorb(IVec(realized(k.first).dT + realized(k.second).dT));

  BlockOperator op;
  op.source = &source;
  op.target = &bs.block_by_drop(source.drop_T - shift);
  op.m = Mat::Zero(op.target->dim(), source.dim());

  auto land = [&](int col, const TensorState& s, cplx coeff) {
    for (const auto& [t, v] : s) {
      auto it = op.target->index.find(t);
      if (it == op.target->index.end())
        throw internal_error("off-block entry while realizing a UElement");
      op.m(it->second, col) += coeff * v;
    }
  };

  for (int c = 0; c < source.dim(); ++c) {
    const TensorMonomial& t = source.basis[c];
    if (live(e.constant)) land(c, {{t, cplx(1.0)}}, e.constant);
    for (const auto& [m, cf] : e.linear) {
      if (!live(cf)) continue;
      const RealizedMode& r = realized(m);
      land(c, bs.act_factor(r.factor, r.x, t), cf);
    }
    for (const auto& [k, cf] : e.quadratic) {
      if (!live(cf)) continue;
      const RealizedMode& ra = realized(k.first);
      const RealizedMode& rb = realized(k.second);
      TensorState mid = bs.act_factor(rb.factor, rb.x, t);
      TensorState fin;
      for (const auto& [tm, v] : mid)
        for (const auto& [tf, vf] : bs.act_factor(ra.factor, ra.x, tm)) fin[tf] += v * vf;
      land(c, fin, cf);
    }
  }
  return op;
}

}  // namespace cyclo
