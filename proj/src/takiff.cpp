#include "cyclo/takiff.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace cyclo {

namespace {

double uniform01(std::mt19937_64& g) {
  // portable in place of uniform_real_distribution
  return double(g() >> 11) * 0x1.0p-53;
}

UElement from_modes(const ModeSum& ms, cplx scale = cplx(1.0)) {
  UElement e;
  for (const auto& [m, c] : ms) e.linear[m] += c * scale;
  return e;
}

}  // namespace

std::string mode_str(const SimpleLieAlgebra& L, const Automorphism& A, const Mode& m) {
  std::ostringstream os;
  if (m.kind == SiteKind::Site) {
    os << L.label_str(m.idx) << "[" << m.power << "]_z" << (m.site + 1);
  } else {
    const AdaptedVector& av = A.adapted[m.idx];
    os << (av.kind == GenKind::Cartan ? "H" : av.kind == GenKind::Raise ? "E" : "F") << "{k="
       << av.k << ",#" << m.idx << "}[" << m.power << "]_"
       << (m.kind == SiteKind::Origin ? "0" : "inf");
  }
  return os.str();
}

bool CurrentAlgebra::slot_exists(SiteKind kind, int site, int power) const {
  switch (kind) {
    case SiteKind::Site:
      return site >= 0 && site < N() && power >= 0 && power < n_sites[site];
    case SiteKind::Origin:
      return power >= 0 && power < n0;
    case SiteKind::Infinity:
      return power <= -1 && -power <= n_inf - 1;
  }
  return false;
}

Vec CurrentAlgebra::mode_gvec(const Mode& m) const {
  if (m.kind == SiteKind::Site) return Vec::Unit(L->dim, m.idx);
  return A->adapted[m.idx].v;
}

ModeSum CurrentAlgebra::expand(SiteKind kind, int site, int power, const Vec& x) const {
  if (!slot_exists(kind, site, power)) throw internal_error("expansion at truncated slot");
  ModeSum out;
  double scale = 1.0 + x.cwiseAbs().maxCoeff();
  if (kind == SiteKind::Site) {
    for (int a = 0; a < L->dim; ++a)
      if (std::abs(x[a]) > 1e-14 * scale) out.push_back({Mode{kind, site, power, a}, x[a]});
    return out;
  }
  for (const auto& [idx, c] : A->expand_in_eigenspace(x, power))
    out.push_back({Mode{kind, 0, power, idx}, c});
  return out;
}

ModeSum CurrentAlgebra::bracket(const Mode& a, const Mode& b) const {
  if (a.kind != b.kind || a.site != b.site) return {};
  int p = a.power + b.power;
  if (!slot_exists(a.kind, a.site, p)) return {};
  Vec xa = mode_gvec(a), xb = mode_gvec(b);
  Vec br = a.kind == SiteKind::Infinity ? L->bracket(xb, xa) : L->bracket(xa, xb);
  if (br.cwiseAbs().maxCoeff() < 1e-14) return {};
  return expand(a.kind, a.site, p, br);
}

CurrentAlgebra build_current_algebra(const SimpleLieAlgebra& L, const Automorphism& A,
                                     const std::vector<cplx>& z, int n_inf,
                                     const std::vector<int>& n_sites, int n0) {
  if (n_inf < 1 || n0 < 1) throw config_error("truncation orders must be >= 1");
  if (n_sites.size() != z.size()) throw config_error("one truncation order per marked point");
  for (int n : n_sites)
    if (n < 1) throw config_error("truncation orders must be >= 1");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (std::abs(z[i]) < 1e-12) throw config_error("marked points must be non-zero");
    for (std::size_t j = i + 1; j < z.size(); ++j)
      for (int k = 0; k < A.T; ++k)
        if (std::abs(z[i] - ipow(A.omega, k) * z[j]) < 1e-9 * (1.0 + std::abs(z[i])))
          throw config_error("marked points have colliding Gamma-orbits");
  }

  CurrentAlgebra ca;
  ca.L = &L;
  ca.A = &A;
  ca.z = z;
  ca.n_inf = n_inf;
  ca.n_sites = n_sites;
  ca.n0 = n0;
  ca.duals = dual_bases(L);
  ca.F = element_F(L, A);
  ca.K = scalar_K(L, A, cplx(-double(L.dual_coxeter)));

  for (int q = 1; q <= n_inf - 1; ++q)
    for (int idx : A.adapted_by_k[A.knorm(-q)])
      ca.modes.push_back(Mode{SiteKind::Infinity, 0, -q, idx});
  for (int i = 0; i < int(z.size()); ++i)
    for (int p = 0; p < n_sites[i]; ++p)
      for (int a = 0; a < L.dim; ++a) ca.modes.push_back(Mode{SiteKind::Site, i, p, a});
  for (int p = 0; p < n0; ++p)
    for (int idx : A.adapted_by_k[A.knorm(p)]) ca.modes.push_back(Mode{SiteKind::Origin, 0, p, idx});
  return ca;
}

UElement& UElement::operator+=(const UElement& o) {
  constant += o.constant;
  for (const auto& [m, c] : o.linear) linear[m] += c;
  for (const auto& [k, c] : o.quadratic) quadratic[k] += c;
  return *this;
}

UElement& UElement::operator*=(cplx s) {
  constant *= s;
  for (auto& [m, c] : linear) c *= s;
  for (auto& [k, c] : quadratic) c *= s;
  return *this;
}

double UElement::norm() const {
  double n = std::abs(constant);
  for (const auto& [m, c] : linear) n = std::max(n, std::abs(c));
  for (const auto& [k, c] : quadratic) n = std::max(n, std::abs(c));
  return n;
}

void UElement::prune(double eps) {
  for (auto it = linear.begin(); it != linear.end();)
    it = std::abs(it->second) <= eps ? linear.erase(it) : std::next(it);
  for (auto it = quadratic.begin(); it != quadratic.end();)
    it = std::abs(it->second) <= eps ? quadratic.erase(it) : std::next(it);
  if (std::abs(constant) <= eps) constant = 0.0;
}

UElement u_product(const CurrentAlgebra& ca, const UElement& x, const UElement& y) {
  if (x.degree() + y.degree() > 2) throw unsupported_error("u_product: degree above 2");
  UElement out;
  out.constant = x.constant * y.constant;
  if (y.constant != cplx(0.0)) {
    for (const auto& [m, c] : x.linear) out.linear[m] += c * y.constant;
    for (const auto& [k, c] : x.quadratic) out.quadratic[k] += c * y.constant;
  }
  if (x.constant != cplx(0.0)) {
    for (const auto& [m, c] : y.linear) out.linear[m] += c * x.constant;
    for (const auto& [k, c] : y.quadratic) out.quadratic[k] += c * x.constant;
  }
  for (const auto& [a, cxa] : x.linear) {
    for (const auto& [b, cyb] : y.linear) {
      cplx c = cxa * cyb;
      if (b < a) {
        out.quadratic[{b, a}] += c;
        for (const auto& [m, cm] : ca.bracket(a, b)) out.linear[m] += c * cm;
      } else {
        out.quadratic[{a, b}] += c;
      }
    }
  }
  return out;
}

double u_distance(const UElement& a, const UElement& b) {
  UElement d = a;
  UElement nb = b;
  nb *= cplx(-1.0);
  d += nb;
  return d.norm();
}

UElement current_A_of_u(const CurrentAlgebra& ca, const Vec& X, cplx u) {
  const Automorphism& A = *ca.A;
  const int T = A.T;
  double scale = 0.0;
  for (const cplx& zi : ca.z) scale = std::max(scale, std::abs(zi));
  for (int i = 0; i < ca.N(); ++i)
    for (int k = 0; k < T; ++k)
      if (std::abs(u - ipow(A.omega, -k) * ca.z[i]) < 1e-9 * (1.0 + scale))
        throw evaluation_error("evaluation point lies on a pole");
  if (std::abs(u) < 1e-9 * (1.0 + scale)) throw evaluation_error("evaluation point lies on a pole");

  UElement out;
  for (int i = 0; i < ca.N(); ++i) {
    Vec sX = X;
    for (int k = 0; k < T; ++k) {
      for (int n = 0; n < ca.n_sites[i]; ++n) {
        cplx coeff = ipow(A.omega, -long(k) * n) / ipow(u - ipow(A.omega, -k) * ca.z[i], n + 1);
        for (const auto& [m, c] : ca.expand(SiteKind::Site, i, n, sX)) out.linear[m] += coeff * c;
      }
      sX = A.sigma_g * sX;
    }
  }
  for (int n = 0; n < ca.n0; ++n) {
    cplx coeff = double(T) / ipow(u, n + 1);
    Vec px = A.projector(n) * X;
    for (const auto& [m, c] : ca.expand(SiteKind::Origin, 0, n, px)) out.linear[m] += coeff * c;
  }
  for (int n = 0; n + 1 <= ca.n_inf - 1; ++n) {
    cplx coeff = double(T) * ipow(u, n);
    Vec px = A.projector(-n - 1) * X;
    for (const auto& [m, c] : ca.expand(SiteKind::Infinity, 0, -n - 1, px))
      out.linear[m] += coeff * c;
  }
  return out;
}

UElement S_of_u(const CurrentAlgebra& ca, cplx u) {
  UElement out;
  std::vector<UElement> Ia(ca.L->dim), Id(ca.L->dim);
  for (int a = 0; a < ca.L->dim; ++a) {
    Ia[a] = current_A_of_u(ca, ca.duals.I[a], u);
    Id[a] = current_A_of_u(ca, ca.duals.I_dual[a], u);
  }
  for (int a = 0; a < ca.L->dim; ++a) {
    UElement p = u_product(ca, Ia[a], Id[a]);
    p *= cplx(0.5);
    out += p;
  }
  UElement fu = current_A_of_u(ca, ca.F, u);
  fu *= 1.0 / u;
  out += fu;
  out.constant += ca.K / (u * u);
  return out;
}

UElement dual_pair_product(const CurrentAlgebra& ca, cplx coeff, const Mat* opA, SiteKind ka,
                           int sa, int pa, const Mat* opB, SiteKind kb, int sb, int pb,
                           bool anti) {
  UElement out;
  if (!ca.slot_exists(ka, sa, pa) || !ca.slot_exists(kb, sb, pb)) return out;
  for (int a = 0; a < ca.L->dim; ++a) {
    Vec xa = opA ? Vec((*opA) * ca.duals.I[a]) : ca.duals.I[a];
    Vec xb = opB ? Vec((*opB) * ca.duals.I_dual[a]) : ca.duals.I_dual[a];
    UElement ua = from_modes(ca.expand(ka, sa, pa, xa));
    UElement ub = from_modes(ca.expand(kb, sb, pb, xb));
    UElement p = u_product(ca, ua, ub);
    if (anti) {
      p += u_product(ca, ub, ua);
      p *= cplx(0.5);
    }
    p *= coeff;
    out += p;
  }
  return out;
}

UElement hamiltonian_site(const CurrentAlgebra& ca, int i, int p) {
  const Automorphism& A = *ca.A;
  const int T = A.T;
  const int ni = ca.n_sites[i];
  const cplx zi = ca.z[i];
  UElement H;

  std::vector<Mat> sig(T);
  sig[0] = Mat::Identity(ca.L->dim, ca.L->dim);
  for (int l = 1; l < T; ++l) sig[l] = A.sigma_g * sig[l - 1];

  // pairs with the other sites
  for (int j = 0; j < ca.N(); ++j) {
    if (j == i) continue;
    for (int l = 0; l < T; ++l) {
      for (int n = 0; n + p < ni; ++n) {
        for (int m = 0; m < ca.n_sites[j]; ++m) {
          cplx den = ipow(zi - ipow(A.omega, -l) * ca.z[j], n + m + 1);
          cplx coeff =
              ipow(A.omega, -long(l) * m) * std::pow(-1.0, n) * binom(n + m, m) / den;
          H += dual_pair_product(ca, coeff, nullptr, SiteKind::Site, i, n + p, &sig[l], SiteKind::Site,
                            j, m);
        }
      }
    }
  }
  // same site, other Gamma copies (anticommutator)
  for (int l = 1; l < T; ++l) {
    for (int r = 0; r + p < ni; ++r) {
      for (int m = 0; m < ni; ++m) {
        cplx den = ipow((1.0 - ipow(A.omega, -l)) * zi, r + m + 1);
        cplx coeff = ipow(A.omega, -long(l) * m) * std::pow(-1.0, r) * binom(r + m, m) / den;
        H += dual_pair_product(ca, coeff, nullptr, SiteKind::Site, i, r + p, &sig[l], SiteKind::Site, i,
                          m, true);
      }
    }
  }
  // on-diagonal part of the double pole
  for (int n = 0; n <= p - 1; ++n) {
    if (n >= ni || p - n - 1 >= ni) continue;
    H += dual_pair_product(ca, cplx(0.5), nullptr, SiteKind::Site, i, n, nullptr, SiteKind::Site, i,
                      p - n - 1);
  }
  // pairs with the origin
  for (int n = 0; n + p < ni; ++n) {
    for (int m = 0; m < ca.n0; ++m) {
      cplx coeff = double(T) * std::pow(-1.0, n) * binom(n + m, m) / ipow(zi, n + m + 1);
      H += dual_pair_product(ca, coeff, nullptr, SiteKind::Site, i, n + p, &A.projector(m),
                        SiteKind::Origin, 0, m);
    }
  }
  // F term
  for (int n = 0; n + p < ni; ++n) {
    cplx coeff = std::pow(-1.0, n) / ipow(zi, n + 1);
    for (const auto& [m, c] : ca.expand(SiteKind::Site, i, n + p, ca.F)) H.linear[m] += coeff * c;
  }
  // pairs with infinity
  for (int n = 0; n < ca.n_inf; ++n) {
    for (int m = 0; m + p < ni; ++m) {
      if (n + m + 1 > ca.n_inf - 1) continue;
      cplx coeff = double(T) * ipow(zi, n) * binom(n + m, m);
      H += dual_pair_product(ca, coeff, &A.projector(-n - m - 1), SiteKind::Infinity, 0, -n - m - 1,
                        nullptr, SiteKind::Site, i, p + m);
    }
  }
  H.prune(1e-13 * (1.0 + H.norm()));
  return H;
}

UElement hamiltonian_origin(const CurrentAlgebra& ca, int p) {
  const Automorphism& A = *ca.A;
  const double T2 = double(A.T) * double(A.T);
  UElement H;

  // u-pole part of the site x origin cross terms: the coefficient of
  // 1/u^{p+1} in 1/((u-z)^{n+1} u^{m+1}) is (-1)^{n+1} binom(n+m-p, n) /
  // z^{n+m-p+1}, present for m >= p only
  for (int i = 0; i < ca.N(); ++i) {
    for (int n = 0; n < ca.n_sites[i]; ++n) {
      for (int m = p; m < ca.n0; ++m) {
        cplx coeff = T2 * std::pow(-1.0, n + 1) * binom(n + m - p, n) / ipow(ca.z[i], n + m - p + 1);
        H += dual_pair_product(ca, coeff, &A.projector(p - m - 1), SiteKind::Site, i, n,
                          &A.projector(m), SiteKind::Origin, 0, m);
      }
    }
  }
  // origin x infinity cross terms of the double expansion
  for (int n = 0; n + p < ca.n0 && n + 1 <= ca.n_inf - 1; ++n) {
    H += dual_pair_product(ca, cplx(T2), &A.projector(n + p), SiteKind::Origin, 0, n + p,
                      &A.projector(-n - 1), SiteKind::Infinity, 0, -n - 1);
  }
  for (int n = 0; n <= p - 1; ++n) {
    if (n >= ca.n0 || p - n - 1 >= ca.n0) continue;
    H += dual_pair_product(ca, cplx(T2 / 2.0), &A.projector(n), SiteKind::Origin, 0, n,
                      &A.projector(p - n - 1), SiteKind::Origin, 0, p - n - 1);
  }
  if (p >= 1 && p - 1 < ca.n0) {
    Vec pf = A.projector(p - 1) * ca.F;
    for (const auto& [m, c] : ca.expand(SiteKind::Origin, 0, p - 1, pf))
      H.linear[m] += double(A.T) * c;
  }
  H.prune(1e-13 * (1.0 + H.norm()));
  return H;
}

UElement hamiltonian_infinity(const CurrentAlgebra& ca, int p) {
  const Automorphism& A = *ca.A;
  const double T2 = double(A.T) * double(A.T);
  UElement H;

  for (int i = 0; i < ca.N(); ++i) {
    for (int m = 0; m + 1 <= ca.n_inf - 1; ++m) {
      for (int n = 0; n < ca.n_sites[i] && n <= m - 1 - p; ++n) {
        cplx coeff = T2 * ipow(ca.z[i], m - n - 1 - p) * binom(m - 1 - p, n);
        H += dual_pair_product(ca, coeff, &A.projector(-m - 1), SiteKind::Infinity, 0, -m - 1,
                          &A.projector(m - p - 1), SiteKind::Site, i, n);
      }
    }
  }
  for (int n = 0; n < ca.n0 && p + n + 2 <= ca.n_inf - 1; ++n) {
    H += dual_pair_product(ca, cplx(T2), &A.projector(n), SiteKind::Origin, 0, n,
                      &A.projector(-p - n - 2), SiteKind::Infinity, 0, -p - n - 2);
  }
  for (int n = 0; n <= p; ++n) {
    if (n + 1 > ca.n_inf - 1 || p - n + 1 > ca.n_inf - 1) continue;
    H += dual_pair_product(ca, cplx(T2 / 2.0), &A.projector(-n - 1), SiteKind::Infinity, 0, -n - 1,
                      &A.projector(n - p - 1), SiteKind::Infinity, 0, n - p - 1);
  }
  if (p + 2 <= ca.n_inf - 1) {
    Vec pf = A.projector(-p - 2) * ca.F;
    for (const auto& [m, c] : ca.expand(SiteKind::Infinity, 0, -p - 2, pf))
      H.linear[m] += double(A.T) * c;
  }
  H.prune(1e-13 * (1.0 + H.norm()));
  return H;
}

UElement hamiltonian_pf_sum(const CurrentAlgebra& ca, cplx u) {
  const Automorphism& A = *ca.A;
  const int T = A.T;
  UElement out;
  out.constant = ca.K / (u * u);

  for (int i = 0; i < ca.N(); ++i) {
    for (int p = 0; p <= 2 * ca.n_sites[i] - 1; ++p) {
      UElement H = hamiltonian_site(ca, i, p);
      if (H.norm() == 0.0) continue;
      for (int k = 0; k < T; ++k) {
        cplx coeff = ipow(A.omega, -long(k) * p + k) / ipow(u - ipow(A.omega, -k) * ca.z[i], p + 1);
        UElement t = H;
        t *= coeff;
        out += t;
      }
    }
  }
  int p0max = std::max(2 * ca.n0, ca.n0 + ca.n_inf);
  for (int i = 0; i < ca.N(); ++i) p0max = std::max(p0max, ca.n_sites[i]);
  for (int p = 0; p <= p0max; ++p) {
    if (((p - 1) % T + T) % T != 0) continue;  // p = 1 mod T
    UElement H = hamiltonian_origin(ca, p);
    if (H.norm() == 0.0) continue;
    H *= 1.0 / ipow(u, p + 1);
    out += H;
  }
  int pimax = std::max(2 * ca.n_inf, 1);
  for (int p = 0; p <= pimax; ++p) {
    if (((p + 2) % T + T) % T != 0) continue;  // p = -2 mod T
    UElement H = hamiltonian_infinity(ca, p);
    if (H.norm() == 0.0) continue;
    H *= ipow(u, p);
    out += H;
  }
  return out;
}

std::vector<cplx> sample_points(const CurrentAlgebra& ca, int count, std::uint64_t seed) {
  std::vector<cplx> poles{cplx(0.0)};
  for (const cplx& zi : ca.z)
    for (int k = 0; k < ca.A->T; ++k) poles.push_back(ipow(ca.A->omega, -k) * zi);

  double rmin = 1e300, rmax = 0.0;
  for (const cplx& zi : ca.z) {
    rmin = std::min(rmin, std::abs(zi));
    rmax = std::max(rmax, std::abs(zi));
  }
  if (ca.z.empty()) rmin = rmax = 1.0;
  double gap = rmin;
  for (std::size_t a = 0; a < poles.size(); ++a)
    for (std::size_t b = a + 1; b < poles.size(); ++b)
      gap = std::min(gap, std::abs(poles[a] - poles[b]));

  std::mt19937_64 gen(seed);
  std::vector<cplx> out;
  while (int(out.size()) < count) {
    double r = 0.5 * rmin + (1.8 * rmax - 0.5 * rmin) * uniform01(gen);
    double th = 2.0 * kPi * uniform01(gen);
    cplx u = std::polar(r, th);
    bool ok = true;
    for (const cplx& pz : poles)
      if (std::abs(u - pz) < 0.1 * gap) ok = false;
    if (ok) out.push_back(u);
  }
  return out;
}

double surat_residual(const CurrentAlgebra& ca, cplx u) {
  UElement s = S_of_u(ca, u);
  UElement pf = hamiltonian_pf_sum(ca, u);
  double scale = 1.0 + std::max(s.norm(), pf.norm());
  return u_distance(s, pf) / scale;
}

cplx RationalFunction::eval(cplx t) const {
  cplx v = 0.0;
  for (const auto& pole : poles) {
    cplx d = t - pole.x;
    cplx dp = d;
    for (std::size_t r = 0; r < pole.coeffs.size(); ++r) {
      v += pole.coeffs[r] / dp;
      dp *= d;
    }
  }
  cplx tp = 1.0;
  for (const cplx& c : poly) {
    v += c * tp;
    tp *= t;
  }
  return v;
}

double residue_identity_check(const RationalFunction& f) {
  const int M = 256;
  auto circle_integral = [&](cplx center, double radius) {
    cplx acc = 0.0;
    for (int m = 0; m < M; ++m) {
      double th = 2.0 * kPi * m / M;
      cplx e = std::polar(radius, th);
      acc += f.eval(center + e) * e;
    }
    return acc / double(M);
  };

  double rmax = 0.0;
  for (const auto& p : f.poles) rmax = std::max(rmax, std::abs(p.x));
  double gap = 1.0 + rmax;
  for (std::size_t a = 0; a < f.poles.size(); ++a)
    for (std::size_t b = a + 1; b < f.poles.size(); ++b)
      gap = std::min(gap, std::abs(f.poles[a].x - f.poles[b].x));

  cplx total = 0.0;
  for (const auto& p : f.poles) total += circle_integral(p.x, 0.35 * gap);
  // -res_{t^-1} t^2 f is minus the coefficient of 1/t at infinity
  cplx at_inf = circle_integral(cplx(0.0), 3.0 * (1.0 + rmax));
  return std::abs(total - at_inf);
}

}  // namespace cyclo
