#include "cyclo/automorphism.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cyclo {

namespace {

constexpr double kTol = 1e-10;

std::vector<std::vector<int>> orbits_of(const std::vector<int>& perm) {
  int n = int(perm.size());
  std::vector<bool> seen(n, false);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::vector<int> orb;
    int j = i;
    while (!seen[j]) {
      seen[j] = true;
      orb.push_back(j);
      j = perm[j];
    }
    out.push_back(std::move(orb));
  }
  return out;
}

}  // namespace

Vec Automorphism::sigma_dual(const Vec& eta, long r) const {
  int steps = knorm(r);
  Vec out = eta;
  for (int s = 0; s < steps; ++s) out = sigma_hstar * out;
  return out;
}

Vec Automorphism::expand_adapted(const Vec& x) const { return adapt_cols_inv * x; }

std::vector<std::pair<int, cplx>> Automorphism::expand_in_eigenspace(const Vec& x, long k,
                                                                     double tol) const {
  int kk = knorm(k);
  Vec c = expand_adapted(x);
  double scale = 1.0 + x.cwiseAbs().maxCoeff();
  std::vector<std::pair<int, cplx>> out;
  for (int a = 0; a < int(adapted.size()); ++a) {
    if (std::abs(c[a]) <= 1e-14 * scale) continue;
    if (adapted[a].k != kk) {
      if (std::abs(c[a]) <= tol * scale) continue;  // projection round-off
      throw internal_error("vector has components outside the requested eigenspace");
    }
    out.push_back({a, c[a]});
  }
  return out;
}

bool Automorphism::is_sigma_invariant_weight(const Vec& eta, double tol) const {
  return (sigma_hstar * eta - eta).cwiseAbs().maxCoeff() <= tol * (1.0 + eta.cwiseAbs().maxCoeff());
}

double Automorphism::chi_admissibility_residual(const Vec& chi) const {
  Vec r = sigma_hstar * chi - omega * chi;
  return r.cwiseAbs().maxCoeff() / (1.0 + chi.cwiseAbs().maxCoeff());
}

Automorphism build_automorphism(const SimpleLieAlgebra& L, const std::vector<int>& perm,
                                const std::vector<cplx>& taus, int T, cplx omega) {
  if (T < 1) throw config_error("automorphism order T must be >= 1");
  if (int(perm.size()) != L.rank || int(taus.size()) != L.rank)
    throw config_error("diagram permutation / tau list must have one entry per node");
  if (std::abs(ipow(omega, T) - 1.0) > kTol)
    throw config_error("omega is not a T-th root of unity");
  for (int j = 1; j < T; ++j)
    if (std::abs(ipow(omega, j) - 1.0) < kTol)
      throw config_error("omega is not a primitive T-th root of unity");

  // perm must be a Dynkin diagram symmetry
  {
    std::vector<bool> hit(L.rank, false);
    for (int i = 0; i < L.rank; ++i) {
      if (perm[i] < 0 || perm[i] >= L.rank) throw config_error("diagram permutation out of range");
      hit[perm[i]] = true;
    }
    for (int i = 0; i < L.rank; ++i)
      if (!hit[i]) throw config_error("diagram permutation is not a bijection");
    for (int i = 0; i < L.rank; ++i)
      for (int j = 0; j < L.rank; ++j)
        if (L.cartan(perm[i], perm[j]) != L.cartan(i, j))
          throw config_error("diagram permutation does not preserve the Cartan matrix");
  }
  for (const cplx& t : taus)
    if (std::abs(ipow(t, T) - 1.0) > kTol || std::abs(std::abs(t) - 1.0) > kTol)
      throw config_error("tau values must lie in the group generated by omega");

  Automorphism A;
  A.L = &L;
  A.T = T;
  A.omega = omega;
  A.perm = perm;

  // permutation action on positive roots
  std::vector<int> root_perm(L.npos);
  for (int r = 0; r < L.npos; ++r) {
    IVec img = IVec::Zero(L.rank);
    for (int i = 0; i < L.rank; ++i) img[perm[i]] = L.pos_roots[r][i];
    int s = L.find_root(img);
    if (s < 0) throw internal_error("diagram symmetry does not permute positive roots");
    root_perm[r] = s;
  }

  A.sigma_g = Mat::Zero(L.dim, L.dim);
  A.tau.assign(L.npos, cplx(0.0));
  std::vector<bool> have(L.npos, false);

  for (int i = 0; i < L.rank; ++i) A.sigma_g(L.h_index(perm[i]), L.h_index(i)) = 1.0;
  for (int r = 0; r < L.npos; ++r) {
    if (L.root_height[r] != 1) continue;
    int node = -1;
    for (int i = 0; i < L.rank; ++i)
      if (L.pos_roots[r][i] == 1) node = i;
    A.tau[r] = taus[node];
    have[r] = true;
    A.sigma_g(L.e_index(root_perm[r]), L.e_index(r)) = taus[node];
    A.sigma_g(L.f_index(root_perm[r]), L.f_index(r)) = 1.0 / taus[node];
  }

  // propagate to non-simple roots through brackets, checking that every
  // decomposition gamma = beta + alpha_i gives the same answer
  std::vector<int> order(L.npos);
  for (int r = 0; r < L.npos; ++r) order[r] = r;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return L.root_height[a] < L.root_height[b]; });
  for (int r : order) {
    if (have[r]) continue;
    bool first = true;
    for (int i = 0; i < L.rank; ++i) {
      IVec rest = L.pos_roots[r];
      rest[i] -= 1;
      if ((rest.array() < 0).any()) continue;
      int b = L.find_root(rest);
      if (b < 0) continue;
      int ai = L.find_root(IVec::Unit(L.rank, i));

      auto unitv = [&](int idx) {
        Vec v = Vec::Zero(L.dim);
        v[idx] = 1.0;
        return v;
      };
      // raising part
      Vec br = L.bracket(unitv(L.e_index(b)), unitv(L.e_index(ai)));
      cplx N = br[L.e_index(r)];
      if (std::abs(N) < kTol) continue;
      Vec img = L.bracket(A.sigma_g * unitv(L.e_index(b)), A.sigma_g * unitv(L.e_index(ai))) / N;
      // lowering part
      Vec brf = L.bracket(unitv(L.f_index(b)), unitv(L.f_index(ai)));
      cplx Nf = brf[L.f_index(r)];
      if (std::abs(Nf) < kTol) throw internal_error("degenerate lowering structure constant");
      Vec imgf = L.bracket(A.sigma_g * unitv(L.f_index(b)), A.sigma_g * unitv(L.f_index(ai))) / Nf;

      int s = root_perm[r];
      cplx tau_e = img[L.e_index(s)];
      cplx tau_f = imgf[L.f_index(s)];
      double off = 0.0;
      for (int a = 0; a < L.dim; ++a) {
        if (a != L.e_index(s)) off = std::max(off, std::abs(img[a]));
        if (a != L.f_index(s)) off = std::max(off, std::abs(imgf[a]));
      }
      if (off > kTol || std::abs(tau_e * tau_f - 1.0) > kTol)
        throw config_error("extension of sigma violates the automorphism property");
      if (first) {
        A.tau[r] = tau_e;
        have[r] = true;
        A.sigma_g.col(L.e_index(r)) = img;
        A.sigma_g.col(L.f_index(r)) = imgf;
        first = false;
      } else if ((A.sigma_g.col(L.e_index(r)) - img).cwiseAbs().maxCoeff() > kTol ||
                 (A.sigma_g.col(L.f_index(r)) - imgf).cwiseAbs().maxCoeff() > kTol) {
        throw config_error("inconsistent tau propagation across root decompositions");
      }
    }
    if (!have[r]) throw internal_error("positive root without simple-root decomposition");
  }

  // sigma^T = id
  Mat p = Mat::Identity(L.dim, L.dim);
  for (int s = 0; s < T; ++s) p = A.sigma_g * p;
  if ((p - Mat::Identity(L.dim, L.dim)).cwiseAbs().maxCoeff() > kTol)
    throw config_error("automorphism order does not divide T");

  // automorphism property and form invariance on all basis pairs
  for (int a = 0; a < L.dim; ++a) {
    for (int b = 0; b < L.dim; ++b) {
      Vec x = Vec::Zero(L.dim), y = Vec::Zero(L.dim);
      x[a] = 1.0;
      y[b] = 1.0;
      Vec lhs = A.sigma_g * L.bracket(x, y);
      Vec rhs = L.bracket(A.sigma_g * x, A.sigma_g * y);
      if ((lhs - rhs).cwiseAbs().maxCoeff() > kTol * (1.0 + lhs.cwiseAbs().maxCoeff()))
        throw config_error("sigma is not a Lie algebra automorphism");
      if (std::abs(L.form(A.sigma_g * x, A.sigma_g * y) - L.form(x, y)) > kTol)
        throw config_error("sigma does not preserve the invariant form");
    }
  }

  // L_sigma on h*: alpha_i -> alpha_{perm(i)}
  A.sigma_hstar = Mat::Zero(L.rank, L.rank);
  for (int i = 0; i < L.rank; ++i) A.sigma_hstar(perm[i], i) = 1.0;

  A.proj_g.resize(T);
  A.proj_hstar.resize(T);
  for (int k = 0; k < T; ++k) {
    Mat pg = Mat::Zero(L.dim, L.dim), ph = Mat::Zero(L.rank, L.rank);
    Mat powg = Mat::Identity(L.dim, L.dim), powh = Mat::Identity(L.rank, L.rank);
    for (int m = 0; m < T; ++m) {
      cplx w = ipow(omega, -long(m) * k);
      pg += w * powg;
      ph += w * powh;
      powg = A.sigma_g * powg;
      powh = A.sigma_hstar * powh;
    }
    A.proj_g[k] = pg / double(T);
    A.proj_hstar[k] = ph / double(T);
  }

  // adapted basis: Cartan orbit sums, then raise orbit sums, then lower
  auto push_orbit_sums = [&](const std::vector<int>& orbit, GenKind kind) {
    int t = int(orbit.size());
    int rep = orbit[0];
    Vec v0 = Vec::Zero(L.dim);
    int rep_idx = kind == GenKind::Cartan  ? L.h_index(rep)
                  : kind == GenKind::Raise ? L.e_index(rep)
                                           : L.f_index(rep);
    v0[rep_idx] = 1.0;
    // sigma^t fixes the rep line; its coefficient selects admissible k
    Vec cyc = v0;
    for (int s = 0; s < t; ++s) cyc = A.sigma_g * cyc;
    cplx c = cyc[rep_idx];
    for (int k = 0; k < T; ++k) {
      if (std::abs(ipow(omega, long(k) * t) - c) > kTol) continue;
      AdaptedVector av;
      av.k = k;
      av.kind = kind;
      av.rep = rep;
      av.v = Vec::Zero(L.dim);
      Vec cur = v0;
      for (int j = 0; j < t; ++j) {
        av.v += ipow(omega, -long(k) * j) * cur;
        cur = A.sigma_g * cur;
      }
      if (kind != GenKind::Cartan) {
        av.height = L.root_height[rep];
        IVec wT = IVec::Zero(L.rank);
        IVec cr = L.pos_roots[rep];
        for (int m = 0; m < T; ++m) {
          wT += cr;
          IVec nx = IVec::Zero(L.rank);
          for (int i = 0; i < L.rank; ++i) nx[perm[i]] = cr[i];
          cr = nx;
        }
        av.weight_T = kind == GenKind::Raise ? wT : IVec(-wT);
      } else {
        av.weight_T = IVec::Zero(L.rank);
      }
      A.adapted.push_back(std::move(av));
    }
  };

  for (const auto& orb : orbits_of(perm)) push_orbit_sums(orb, GenKind::Cartan);
  for (const auto& orb : orbits_of(root_perm)) push_orbit_sums(orb, GenKind::Raise);
  for (const auto& orb : orbits_of(root_perm)) push_orbit_sums(orb, GenKind::Lower);

  if (int(A.adapted.size()) != L.dim) throw internal_error("adapted basis has wrong size");
  A.adapt_cols = Mat::Zero(L.dim, L.dim);
  for (int a = 0; a < L.dim; ++a) A.adapt_cols.col(a) = A.adapted[a].v;
  Eigen::FullPivLU<Mat> lu(A.adapt_cols);
  if (!lu.isInvertible()) throw internal_error("adapted basis is degenerate");
  A.adapt_cols_inv = lu.inverse();

  A.adapted_by_k.assign(T, {});
  for (int a = 0; a < L.dim; ++a) {
    A.adapted_by_k[A.adapted[a].k].push_back(a);
    if ((A.projector(A.adapted[a].k) * A.adapted[a].v - A.adapted[a].v).cwiseAbs().maxCoeff() >
        1e-9)
      throw internal_error("adapted vector is not in its eigenspace");
  }

  return A;
}

Automorphism trivial_automorphism(const SimpleLieAlgebra& L) {
  std::vector<int> id(L.rank);
  for (int i = 0; i < L.rank; ++i) id[i] = i;
  return build_automorphism(L, id, std::vector<cplx>(L.rank, cplx(1.0)), 1, cplx(1.0));
}

Vec element_F(const SimpleLieAlgebra& L, const Automorphism& A) {
  Vec F = Vec::Zero(L.dim);
  DualBasisPair d = dual_bases(L);
  for (int p = 1; p < A.T; ++p) {
    cplx wp = ipow(A.omega, p);
    Mat sp = Mat::Identity(L.dim, L.dim);
    for (int s = 0; s < p; ++s) sp = A.sigma_g * sp;
    Vec acc = Vec::Zero(L.dim);
    for (int a = 0; a < L.dim; ++a) acc += L.bracket(sp * d.I_dual[a], d.I[a]);
    F += 0.5 * wp / (wp - 1.0) * acc;
  }
  if (A.T > 1 && (A.sigma_g * F - F).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + F.cwiseAbs().maxCoeff()))
    throw internal_error("F is not sigma-invariant");
  return F;
}

cplx scalar_K(const SimpleLieAlgebra& L, const Automorphism& A, cplx k_level) {
  cplx K = 0.0;
  DualBasisPair d = dual_bases(L);
  for (int p = 1; p < A.T; ++p) {
    cplx wp = ipow(A.omega, p);
    Mat sp = Mat::Identity(L.dim, L.dim);
    for (int s = 0; s < p; ++s) sp = A.sigma_g * sp;
    cplx acc = 0.0;
    for (int a = 0; a < L.dim; ++a) acc += L.form(sp * d.I_dual[a], d.I[a]);
    K += 0.5 * wp * acc * k_level / ((wp - 1.0) * (wp - 1.0));
  }
  return K;
}

Vec lambda0_trace(const SimpleLieAlgebra& L, const Automorphism& A) {
  Vec vals = Vec::Zero(L.rank);
  for (int i = 0; i < L.rank; ++i) {
    cplx total = 0.0;
    for (int r = 1; r < A.T; ++r) {
      // tr over n of sigma^{-r} ad_{H_i}; ad_{H_i} is diagonal on root vectors
      Mat s = Mat::Identity(L.dim, L.dim);
      for (int m = 0; m < A.knorm(-r); ++m) s = A.sigma_g * s;
      cplx tr = 0.0;
      for (int b = 0; b < L.npos; ++b) {
        cplx beta_h = L.weight_form(L.pos_roots[b].cast<double>().cast<cplx>(),
                                    Vec::Unit(L.rank, i));
        tr += s(L.e_index(b), L.e_index(b)) * beta_h;
      }
      total += tr / (1.0 - ipow(A.omega, r));
    }
    vals[i] = total;
  }
  return L.form_h_inv.cast<cplx>() * vals;
}

Vec lambda0_roots(const SimpleLieAlgebra& L, const Automorphism& A) {
  // rebuild the root permutation from L_sigma
  std::vector<int> root_perm(L.npos);
  for (int r = 0; r < L.npos; ++r) {
    IVec img = IVec::Zero(L.rank);
    for (int i = 0; i < L.rank; ++i) img[A.perm[i]] = L.pos_roots[r][i];
    root_perm[r] = L.find_root(img);
  }
  Vec out = Vec::Zero(L.rank);
  for (int r = 1; r < A.T; ++r) {
    cplx pref = 1.0 / (1.0 - ipow(A.omega, r));
    for (int b = 0; b < L.npos; ++b) {
      int img = b;
      for (int s = 0; s < r; ++s) img = root_perm[img];
      if (img != b) continue;
      cplx taup = 1.0;
      int cur = b;
      for (int p = 0; p < r; ++p) {
        taup *= 1.0 / A.tau[cur];
        cur = root_perm[cur];
      }
      out += pref * taup * L.pos_roots[b].cast<double>().cast<cplx>();
    }
  }
  return out;
}

}  // namespace cyclo
