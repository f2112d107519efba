#include "cyclo/verma.hpp"

#include <algorithm>

namespace cyclo {

namespace {

void add_state(ModuleState& s, const Monomial& m, cplx c) {
  if (c == cplx(0.0)) return;
  s[m] += c;
}

void merge_scaled(ModuleState& into, const ModuleState& from, cplx c) {
  for (const auto& [m, v] : from) into[m] += c * v;
}

}  // namespace

TriangularAlgebra::Element TriangularAlgebra::decompose(const Vec& x) const {
  Element e;
  e.cartan_g = Vec::Zero(L->dim);
  double scale = 1.0 + x.cwiseAbs().maxCoeff();

  Vec sol = basis_cod.solve(x);
  Vec resid = basis_cols * sol - x;
  if (resid.cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw internal_error("vector does not lie in the triangular subalgebra");

  int c = 0;
  for (std::size_t i = 0; i < cartan_v.size(); ++i, ++c)
    if (std::abs(sol[c]) > 1e-13 * scale) e.cartan_g += sol[c] * cartan_v[i];
  for (std::size_t i = 0; i < raise_v.size(); ++i, ++c)
    if (std::abs(sol[c]) > 1e-13 * scale) e.raise.push_back({int(i), sol[c]});
  for (std::size_t i = 0; i < lower_v.size(); ++i, ++c)
    if (std::abs(sol[c]) > 1e-13 * scale) e.lower.push_back({int(i), sol[c]});
  return e;
}

namespace {

TriangularAlgebra finish_tables(TriangularAlgebra alg) {
  const SimpleLieAlgebra& L = *alg.L;
  int nl = alg.nlower(), nr = int(alg.raise_v.size());
  int total = int(alg.cartan_v.size()) + nr + nl;
  alg.basis_cols = Mat(L.dim, total);
  {
    int c = 0;
    for (const auto& v : alg.cartan_v) alg.basis_cols.col(c++) = v;
    for (const auto& v : alg.raise_v) alg.basis_cols.col(c++) = v;
    for (const auto& v : alg.lower_v) alg.basis_cols.col(c++) = v;
  }
  alg.basis_cod.compute(alg.basis_cols);
  alg.lower_lower.assign(nl, std::vector<std::vector<std::pair<int, cplx>>>(nl));
  alg.raise_lower.assign(nr, std::vector<TriangularAlgebra::Element>(nl));
  for (int i = 0; i < nl; ++i) {
    for (int j = 0; j < nl; ++j) {
      Vec br = L.bracket(alg.lower_v[i], alg.lower_v[j]);
      if (br.cwiseAbs().maxCoeff() < 1e-13) continue;
      TriangularAlgebra::Element e = alg.decompose(br);
      if (!e.raise.empty() || e.cartan_g.cwiseAbs().maxCoeff() > 1e-12)
        throw internal_error("lowering subalgebra is not closed");
      alg.lower_lower[i][j] = e.lower;
    }
  }
  for (int r = 0; r < nr; ++r)
    for (int j = 0; j < nl; ++j) {
      Vec br = L.bracket(alg.raise_v[r], alg.lower_v[j]);
      if (br.cwiseAbs().maxCoeff() < 1e-13) continue;
      alg.raise_lower[r][j] = alg.decompose(br);
    }
  return alg;
}

}  // namespace

TriangularAlgebra triangular_of_g(const SimpleLieAlgebra& L, const Automorphism& A) {
  TriangularAlgebra alg;
  alg.L = &L;
  for (int i = 0; i < L.rank; ++i) alg.cartan_v.push_back(Vec::Unit(L.dim, L.h_index(i)));
  for (int r = 0; r < L.npos; ++r) {
    alg.raise_v.push_back(Vec::Unit(L.dim, L.e_index(r)));
    alg.lower_v.push_back(Vec::Unit(L.dim, L.f_index(r)));
    alg.raise_wt.push_back(L.pos_roots[r].cast<double>().cast<cplx>());
    IVec wT = IVec::Zero(L.rank);
    IVec cr = L.pos_roots[r];
    for (int m = 0; m < A.T; ++m) {
      wT += cr;
      IVec nx = IVec::Zero(L.rank);
      for (int i = 0; i < L.rank; ++i) nx[A.perm[i]] = cr[i];
      cr = nx;
    }
    alg.raise_wt_T.push_back(wT);
    alg.heights.push_back(L.root_height[r]);
  }
  return finish_tables(std::move(alg));
}

TriangularAlgebra triangular_of_fixed_points(const SimpleLieAlgebra& L, const Automorphism& A) {
  TriangularAlgebra alg;
  alg.L = &L;
  for (int idx : A.adapted_by_k[0]) {
    const AdaptedVector& av = A.adapted[idx];
    switch (av.kind) {
      case GenKind::Cartan:
        alg.cartan_v.push_back(av.v);
        break;
      case GenKind::Raise: {
        alg.raise_v.push_back(av.v);
        Vec w = A.projector_hstar(0) * L.pos_roots[av.rep].cast<double>().cast<cplx>();
        alg.raise_wt.push_back(w);
        alg.raise_wt_T.push_back(av.weight_T);
        alg.heights.push_back(av.height);
        break;
      }
      case GenKind::Lower:
        alg.lower_v.push_back(av.v);
        break;
    }
  }
  if (alg.raise_v.size() != alg.lower_v.size())
    throw internal_error("fixed-point algebra has mismatched raise/lower counts");
  return finish_tables(std::move(alg));
}

IVec VermaModule::drop_T(const Monomial& m) const {
  IVec d = IVec::Zero(alg->L->rank);
  for (std::size_t j = 0; j < m.size(); ++j)
    if (m[j]) d += m[j] * alg->raise_wt_T[j];
  return d;
}

int VermaModule::height(const Monomial& m) const {
  int h = 0;
  for (std::size_t j = 0; j < m.size(); ++j) h += m[j] * alg->heights[j];
  return h;
}

namespace {

// F_j . normal form, straightening brackets towards heavier factors
ModuleState insert_lower(const TriangularAlgebra& alg, int j, const Monomial& m) {
  int lead = -1;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) {
      lead = int(i);
      break;
    }
  if (lead < 0 || j <= lead) {
    Monomial out = m;
    out[j] += 1;
    return {{out, cplx(1.0)}};
  }
  Monomial rest = m;
  rest[lead] -= 1;
  ModuleState s;
  for (const auto& [mm, c] : insert_lower(alg, j, rest)) {
    Monomial out = mm;
    out[lead] += 1;
    add_state(s, out, c);
  }
  for (const auto& [l, cl] : alg.lower_lower[j][lead])
    merge_scaled(s, insert_lower(alg, l, rest), cl);
  return s;
}

}  // namespace

ModuleState VermaModule::act_lower(int j, const Monomial& m) const {
  return insert_lower(*alg, j, m);
}

cplx VermaModule::cartan_eval(const Vec& h_g, const Monomial& m) const {
  Vec wt = lambda;
  for (std::size_t j = 0; j < m.size(); ++j)
    if (m[j]) wt -= double(m[j]) * alg->raise_wt[j];
  return alg->L->weight_eval(wt, h_g);
}

ModuleState VermaModule::act_element(const TriangularAlgebra::Element& x,
                                     const Monomial& m) const {
  ModuleState s;
  if (x.cartan_g.size() && x.cartan_g.cwiseAbs().maxCoeff() > 0.0)
    add_state(s, m, cartan_eval(x.cartan_g, m));
  for (const auto& [j, c] : x.lower) merge_scaled(s, act_lower(j, m), c);
  for (const auto& [r, c] : x.raise) merge_scaled(s, act_raise(r, m), c);
  return s;
}

ModuleState VermaModule::act_raise(int r, const Monomial& m) const {
  int lead = -1;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) {
      lead = int(i);
      break;
    }
  if (lead < 0) return {};  // raising kills the highest vector
  Monomial rest = m;
  rest[lead] -= 1;
  ModuleState s;
  for (const auto& [mm, c] : act_raise(r, rest))
    merge_scaled(s, insert_lower(*alg, lead, mm), c);
  merge_scaled(s, act_element(alg->raise_lower[r][lead], rest), cplx(1.0));
  return s;
}

ModuleState VermaModule::act_gvec(const Vec& x, const ModuleState& s) const {
  TriangularAlgebra::Element e = alg->decompose(x);
  ModuleState out;
  for (const auto& [m, c] : s) merge_scaled(out, act_element(e, m), c);
  return out;
}

std::vector<Monomial> monomials_of_height(const TriangularAlgebra& alg, int h) {
  std::vector<Monomial> out;
  Monomial cur(alg.nlower(), 0);
  // lexicographic DFS over exponents
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    if (pos >= alg.nlower()) return;
    int hj = alg.heights[pos];
    for (int e = remaining / hj; e >= 0; --e) {
      cur[pos] = e;
      rec(pos + 1, remaining - e * hj);
    }
    cur[pos] = 0;
  };
  rec(0, h);
  std::sort(out.begin(), out.end());
  return out;
}

VermaBasis verma_basis(const TriangularAlgebra& alg, const Vec& lambda, int depth_cap) {
  if (depth_cap < 0) throw config_error("depth cap must be non-negative");
  VermaBasis vb;
  vb.alg = &alg;
  vb.lambda = lambda;
  // all exponent vectors with at most depth_cap lowering factors
  Monomial cur(alg.nlower(), 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == alg.nlower()) {
      vb.basis.push_back(cur);
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      cur[pos] = e;
      rec(pos + 1, remaining - e);
    }
    cur[pos] = 0;
  };
  rec(0, depth_cap);
  std::sort(vb.basis.begin(), vb.basis.end(), [&](const Monomial& a, const Monomial& b) {
    int da = 0, db = 0;
    for (int v : a) da += v;
    for (int v : b) db += v;
    if (da != db) return da < db;
    return a < b;
  });
  for (int i = 0; i < int(vb.basis.size()); ++i) vb.index[vb.basis[i]] = i;
  return vb;
}

Mat matrix_on_basis(const VermaModule& mod, const VermaBasis& vb, const Vec& x, bool* overflow) {
  // the overflow flag is sticky: callers reset it between unrelated uses
  Mat out = Mat::Zero(vb.basis.size(), vb.basis.size());
  for (int c = 0; c < int(vb.basis.size()); ++c) {
    ModuleState s = mod.act_gvec(x, {{vb.basis[c], cplx(1.0)}});
    for (const auto& [m, v] : s) {
      auto it = vb.index.find(m);
      if (it == vb.index.end()) {
        if (overflow) *overflow = true;
        continue;
      }
      out(it->second, c) += v;
    }
  }
  return out;
}

}  // namespace cyclo
