#include "cyclo/bethe.hpp"

#include <algorithm>
#include <random>

namespace cyclo {

namespace {

double uniform01(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

double vnorm(const Eigen::VectorXcd& v) {
  return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

Vec BetheProblem::alpha(int j) const {
  return L->pos_roots[L->find_root(IVec::Unit(L->rank, colors[j]))].cast<double>().cast<cplx>();
}

BetheProblem make_bethe_problem(const SimpleLieAlgebra& L, const Automorphism& A,
                                const std::vector<cplx>& z, const std::vector<Vec>& lambdas,
                                const Vec& lambda0, const ChiForm& chi,
                                const std::vector<int>& colors, double solver_tol) {
  if (lambdas.size() != z.size()) throw config_error("one weight per marked point required");
  for (int c : colors)
    if (c < 0 || c >= L.rank) throw config_error("colour index out of range");
  if (!A.is_sigma_invariant_weight(lambda0))
    throw config_error("lambda0 must be sigma-invariant");
  BetheProblem p;
  p.L = &L;
  p.A = &A;
  p.z = z;
  p.lambdas = lambdas;
  p.lambda0 = lambda0;
  Vec l0a = lambda0_trace(L, A), l0b = lambda0_roots(L, A);
  if ((l0a - l0b).cwiseAbs().maxCoeff() > 1e-10)
    throw internal_error("Lambda0 cross-derivation mismatch");
  p.Lambda0 = l0a;
  p.chi = chi;
  p.colors = colors;
  p.solver_tol = solver_tol;
  return p;
}

Vec lambda_infinity(const BetheProblem& p) {
  const Mat& pi0 = p.A->projector_hstar(0);
  Vec out = p.lambda0;
  for (const auto& l : p.lambdas) out += pi0 * l;
  for (int j = 0; j < p.m(); ++j) out -= pi0 * p.alpha(j);
  return out;
}

bool roots_admissible(const BetheProblem& p, const std::vector<cplx>& w, double tol) {
  for (std::size_t a = 0; a < w.size(); ++a) {
    if (std::abs(w[a]) < tol) return false;
    for (int r = 0; r < p.A->T; ++r) {
      cplx wr = ipow(p.A->omega, r) * w[a];
      for (std::size_t b = a + 1; b < w.size(); ++b)
        if (std::abs(wr - w[b]) < tol) return false;
      for (const cplx& zi : p.z)
        if (std::abs(wr - zi) < tol) return false;
    }
  }
  return true;
}

Eigen::VectorXcd bethe_residual(const BetheProblem& p, const std::vector<cplx>& w) {
  const int m = p.m(), T = p.A->T;
  if (int(w.size()) != m) throw config_error("root count does not match the colour list");
  Eigen::VectorXcd res(m);
  for (int j = 0; j < m; ++j) {
    Vec aj = p.alpha(j);
    cplx v = 0.0;
    for (int r = 0; r < T; ++r) {
      for (int i = 0; i < p.N(); ++i) {
        cplx den = w[j] - ipow(p.A->omega, r) * p.z[i];
        if (std::abs(den) < 1e-12) throw evaluation_error("Bethe root collides with Gamma z");
        v += p.L->weight_form(aj, p.A->sigma_dual(p.lambdas[i], r)) / den;
      }
      for (int k = 0; k < m; ++k) {
        if (k == j) continue;
        cplx den = w[j] - ipow(p.A->omega, r) * w[k];
        if (std::abs(den) < 1e-12) throw evaluation_error("Bethe roots collide");
        v -= p.L->weight_form(aj, p.A->sigma_dual(p.alpha(k), r)) / den;
      }
    }
    cplx self = 0.0;
    for (int r = 1; r < T; ++r) self += p.L->weight_form(aj, p.A->sigma_dual(aj, r));
    if (std::abs(w[j]) < 1e-12) throw evaluation_error("Bethe root collides with the origin");
    v += (-0.5 * self + p.L->weight_form(aj, double(T) * p.lambda0 + p.Lambda0)) / w[j];
    v += double(T) * p.L->weight_form(aj, p.chi.chi);
    res[j] = v;
  }
  return res;
}

Mat bethe_jacobian(const BetheProblem& p, const std::vector<cplx>& w) {
  const int m = p.m(), T = p.A->T;
  Mat J = Mat::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    Vec aj = p.alpha(j);
    cplx diag = 0.0;
    for (int r = 0; r < T; ++r) {
      for (int i = 0; i < p.N(); ++i) {
        cplx den = w[j] - ipow(p.A->omega, r) * p.z[i];
        diag -= p.L->weight_form(aj, p.A->sigma_dual(p.lambdas[i], r)) / (den * den);
      }
      for (int k = 0; k < m; ++k) {
        if (k == j) continue;
        cplx wr = ipow(p.A->omega, r);
        cplx den = w[j] - wr * w[k];
        cplx pair = p.L->weight_form(aj, p.A->sigma_dual(p.alpha(k), r));
        diag += pair / (den * den);
        J(j, k) -= pair * wr / (den * den);
      }
    }
    cplx self = 0.0;
    for (int r = 1; r < T; ++r) self += p.L->weight_form(aj, p.A->sigma_dual(aj, r));
    diag -= (-0.5 * self + p.L->weight_form(aj, double(T) * p.lambda0 + p.Lambda0)) / (w[j] * w[j]);
    J(j, j) = diag;
  }
  return J;
}

namespace {

// canonical representative: roots are sorted within each colour class, so
// solutions differing by a permutation of equal colours coincide
std::vector<cplx> canonical_roots(const BetheProblem& p, std::vector<cplx> w) {
  std::map<int, std::vector<int>> classes;
  for (std::size_t i = 0; i < w.size(); ++i) classes[p.colors[i]].push_back(int(i));
  for (auto& [c, ps] : classes) {
    std::vector<cplx> vals;
    for (int i : ps) vals.push_back(w[i]);
    std::sort(vals.begin(), vals.end(), [](cplx a, cplx b) {
      double tol = 1e-9 * (1.0 + std::abs(a) + std::abs(b));
      if (std::abs(a.real() - b.real()) > tol) return a.real() < b.real();
      if (std::abs(a.imag() - b.imag()) > tol) return a.imag() < b.imag();
      return false;
    });
    for (std::size_t k = 0; k < ps.size(); ++k) w[ps[k]] = vals[k];
  }
  return w;
}

bool same_solution(const std::vector<cplx>& a, const std::vector<cplx>& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace

SolveReport solve_bethe(const BetheProblem& p, const SolveOptions& opt) {
  if (p.m() < 1) throw config_error("solve_bethe requires at least one Bethe root");
  SolveReport rep;

  double rmin = 1e300, rmax = 0.0;
  for (const cplx& zi : p.z) {
    rmin = std::min(rmin, std::abs(zi));
    rmax = std::max(rmax, std::abs(zi));
  }
  if (p.z.empty()) rmin = rmax = 1.0;

  std::mt19937_64 gen(opt.seed);
  std::vector<std::vector<cplx>> starts;
  for (int s = 0; s < opt.starts; ++s) {
    std::vector<cplx> w(p.m());
    for (int j = 0; j < p.m(); ++j) {
      double r = 0.3 * rmin + (2.0 * rmax - 0.3 * rmin) * uniform01(gen);
      w[j] = std::polar(r, 2.0 * kPi * uniform01(gen));
    }
    starts.push_back(std::move(w));
  }

  std::vector<int> outcome(starts.size(), 0);  // 0 fail, 1 converged
  std::vector<BetheSolution> found(starts.size());
  parallel_for(starts.size(), [&](std::size_t s) {
    std::vector<cplx> w = starts[s];
    if (!roots_admissible(p, w, 1e-6)) return;  // a start on a pole is rejected
    try {
      Eigen::VectorXcd res = bethe_residual(p, w);
      int it = 0;
      for (; it < opt.max_iterations; ++it) {
        if (vnorm(res) <= p.solver_tol) break;
        Mat J = bethe_jacobian(p, w);
        Eigen::VectorXcd step = J.fullPivLu().solve(-res);
        if (!step.allFinite()) return;
        double alpha = 1.0;
        bool moved = false;
        for (int h = 0; h <= opt.max_halvings; ++h, alpha *= 0.5) {
          std::vector<cplx> trial = w;
          for (int j = 0; j < p.m(); ++j) trial[j] += alpha * step[j];
          try {
            Eigen::VectorXcd tres = bethe_residual(p, trial);
            if (vnorm(tres) < vnorm(res)) {
              w = trial;
              res = tres;
              moved = true;
              break;
            }
          } catch (const evaluation_error&) {
            // damped step fell on a pole, halve again
          }
        }
        if (!moved) return;
      }
      // weighted acceptance: the raw residual decays like 1/|w| at infinity,
      // so Newton can stall on spurious far-away roots; weighting by
      // (1 + |w_j|) removes them without touching genuine finite roots
      double zscale = 1.0;
      for (const cplx& zi : p.z) zscale = std::max(zscale, std::abs(zi));
      bool ok = vnorm(res) <= p.solver_tol;
      for (int j = 0; j < p.m() && ok; ++j)
        if ((1.0 + std::abs(w[j])) * std::abs(res[j]) > p.solver_tol * 10.0 * zscale) ok = false;
      if (ok && roots_admissible(p, w, 1e-7)) {
        found[s].w = canonical_roots(p, w);
        found[s].residual = vnorm(res);
        found[s].iterations = it;
        outcome[s] = 1;
      }
    } catch (const evaluation_error&) {
    }
  });

  for (std::size_t s = 0; s < starts.size(); ++s) {
    if (!outcome[s]) {
      rep.rejected_runs++;
      continue;
    }
    rep.converged_runs++;
    bool dup = false;
    for (const auto& sol : rep.solutions)
      if (same_solution(sol.w, found[s].w, opt.dedup_tol)) dup = true;
    if (!dup) rep.solutions.push_back(found[s]);
  }
  std::sort(rep.solutions.begin(), rep.solutions.end(),
            [](const BetheSolution& a, const BetheSolution& b) {
              for (std::size_t i = 0; i < a.w.size(); ++i) {
                if (a.w[i].real() != b.w[i].real()) return a.w[i].real() < b.w[i].real();
                if (a.w[i].imag() != b.w[i].imag()) return a.w[i].imag() < b.w[i].imag();
              }
              return false;
            });
  if (rep.solutions.empty())
    rep.diagnostic = "no start converged to an admissible solution (" +
                     std::to_string(starts.size()) + " starts)";
  return rep;
}

Vec weight_function(const BetheProblem& p, BlockSpace& bs, const std::vector<cplx>& w,
                    const WeightBlock** block_out) {
  const int m = p.m(), T = p.A->T;
  if (int(w.size()) != m) throw config_error("root count does not match the colour list");
  const WeightBlock& blk = bs.block_of_weight(lambda_infinity(p));
  if (block_out) *block_out = &blk;

  TensorMonomial top;
  for (int i = 0; i < p.N(); ++i) top.f.push_back(Monomial(bs.tri_g.nlower(), 0));
  top.f.push_back(Monomial(bs.tri_sigma.nlower(), 0));

  TensorState result;
  // y vectors in g coordinates, lowered recursively through the theta maps
  std::function<void(int, std::vector<Vec>&, const TensorMonomial&, cplx)> dfs =
      [&](int s, std::vector<Vec>& ys, const TensorMonomial& t, cplx coeff) {
        if (s == 0) {
          result[t] += coeff;
          return;
        }
        const Vec y = ys[s - 1];
        // origin factor gets T Pi_0 y
        {
          if (std::abs(w[s - 1]) < 1e-12)
            throw evaluation_error("Bethe root collides with the origin");
          Vec py = double(T) * (p.A->projector(0) * y);
          if (py.cwiseAbs().maxCoeff() > 1e-14) {
            for (const auto& [t2, c2] : bs.act_factor(p.N(), py, t))
              dfs(s - 1, ys, t2, coeff * c2 / w[s - 1]);
          }
        }
        // site factors get sigma^j y
        Vec sy = y;
        for (int j = 0; j < T; ++j) {
          for (int i = 0; i < p.N(); ++i) {
            cplx den = w[s - 1] - ipow(p.A->omega, -j) * p.z[i];
            if (std::abs(den) < 1e-12)
              throw evaluation_error("Bethe root collides with Gamma z");
            for (const auto& [t2, c2] : bs.act_factor(i, sy, t))
              dfs(s - 1, ys, t2, coeff * c2 / den);
          }
          sy = p.A->sigma_g * sy;
        }
        // earlier y slots absorb the bracket [sigma^j y_s, y_i]
        for (int i = 0; i < s - 1; ++i) {
          Vec sy2 = y;
          for (int j = 0; j < T; ++j) {
            cplx den = w[s - 1] - ipow(p.A->omega, -j) * w[i];
            if (std::abs(den) < 1e-12) throw evaluation_error("Bethe roots collide");
            Vec br = p.L->bracket(sy2, ys[i]);
            if (br.cwiseAbs().maxCoeff() > 1e-14) {
              Vec saved = ys[i];
              ys[i] = br;
              dfs(s - 1, ys, t, coeff / den);
              ys[i] = saved;
            }
            sy2 = p.A->sigma_g * sy2;
          }
        }
      };

  std::vector<Vec> ys;
  for (int j = 0; j < m; ++j) {
    int r = p.L->find_root(IVec::Unit(p.L->rank, p.colors[j]));
    ys.push_back(Vec::Unit(p.L->dim, p.L->f_index(r)));
  }
  cplx sign = (m % 2 == 0) ? cplx(1.0) : cplx(-1.0);
  dfs(m, ys, top, sign);

  return blk.to_vector(result);
}

cplx eigenvalue_Ei(const BetheProblem& p, const std::vector<cplx>& w, int i) {
  const int T = p.A->T;
  const Vec& li = p.lambdas[i];
  cplx v = 0.0;
  for (int s = 0; s < T; ++s) {
    for (int j = 0; j < p.N(); ++j) {
      if (j == i) continue;
      v += p.L->weight_form(li, p.A->sigma_dual(p.lambdas[j], s)) /
           (p.z[i] - ipow(p.A->omega, s) * p.z[j]);
    }
    for (int j = 0; j < p.m(); ++j)
      v -= p.L->weight_form(li, p.A->sigma_dual(p.alpha(j), s)) /
           (p.z[i] - ipow(p.A->omega, s) * w[j]);
  }
  cplx self = 0.0;
  for (int s = 1; s < T; ++s) self += p.L->weight_form(li, p.A->sigma_dual(li, s));
  v += (p.L->weight_form(li, double(T) * p.lambda0 + p.Lambda0) + 0.5 * self) / p.z[i];
  v += double(T) * p.L->weight_form(li, p.chi.chi);
  return v;
}

EigenReport verify_eigenvector(const BetheProblem& p, BlockSpace& bs, const HamiltonianSet& set,
                               const std::vector<cplx>& w) {
  EigenReport rep;
  const WeightBlock* blk = nullptr;
  Vec psi = weight_function(p, bs, w, &blk);
  rep.psi_norm = psi.norm();
  double scale = 0.0;
  for (int i = 0; i < psi.size(); ++i) scale = std::max(scale, std::abs(psi[i]));
  if (rep.psi_norm <= 1e-13 * (1.0 + scale)) {
    rep.inconclusive = true;  // vanishing of the weight function is not ruled out
    return rep;
  }
  for (std::size_t h = 0; h < set.ops.size(); ++h) {
    BlockOperator op = realize_uelement(bs, *set.ca, set.ops[h], *blk);
    Vec hpsi = op.m * psi;
    EigenCheck chk;
    chk.name = set.names[h];
    // the displayed eigenvalue formula covers exactly the H_{i,0}, i >= 1
    std::string body = set.names[h].substr(2);
    std::size_t comma = body.find(',');
    bool site_ham = comma != std::string::npos && body.substr(comma) == ",0" &&
                    comma > 0 && body.find_first_not_of("0123456789") == comma &&
                    body[0] != '0';
    if (site_ham) {
      int i = std::stoi(body.substr(0, comma));
      chk.eigenvalue = eigenvalue_Ei(p, w, i - 1);
      chk.formula = true;
    } else {
      chk.eigenvalue = psi.dot(hpsi) / psi.dot(psi);  // Rayleigh quotient
      chk.formula = false;
    }
    Vec resv = hpsi - chk.eigenvalue * psi;
    chk.residual = resv.norm() / rep.psi_norm;
    double hn = hpsi.norm();
    chk.sine_angle = hn > 1e-300 ? resv.norm() / hn : 0.0;
    if (chk.formula) rep.max_formula_residual = std::max(rep.max_formula_residual, chk.residual);
    rep.checks.push_back(chk);
  }
  return rep;
}

double verify_singular(const BetheProblem& p, BlockSpace& bs, const std::vector<cplx>& w) {
  // the singular-vector theorem needs chi = 0; for chi != 0 the residual is
  // still computed and reported as a diagnostic, generically non-zero
  const WeightBlock* blk = nullptr;
  Vec psi = weight_function(p, bs, w, &blk);
  double pn = psi.norm();
  if (pn == 0.0) return 0.0;
  double worst = 0.0;
  for (int idx : p.A->adapted_by_k[0]) {
    const AdaptedVector& av = p.A->adapted[idx];
    if (av.kind != GenKind::Raise) continue;
    BlockOperator dx = diagonal_action(bs, av.v, *blk);
    worst = std::max(worst, (dx.m * psi).norm() / pn);
  }
  return worst;
}

Vec nu_of_t(const BetheProblem& p, const std::vector<cplx>& w, cplx t) {
  const int T = p.A->T;
  Vec v = p.chi.chi;
  for (int r = 0; r < T; ++r) {
    for (int i = 0; i < p.N(); ++i)
      v += p.A->sigma_dual(p.lambdas[i], r) / (t - ipow(p.A->omega, r) * p.z[i]);
    for (int j = 0; j < p.m(); ++j)
      v -= p.A->sigma_dual(p.alpha(j), r) / (t - ipow(p.A->omega, r) * w[j]);
  }
  v += (double(T) * p.lambda0 + p.Lambda0) / t;
  return v;
}

cplx nu_pairing(const BetheProblem& p, const std::vector<cplx>& w, int j) {
  const int T = p.A->T;
  Vec v = p.chi.chi;
  for (int r = 0; r < T; ++r) {
    for (int i = 0; i < p.N(); ++i)
      v += p.A->sigma_dual(p.lambdas[i], r) / (w[j] - ipow(p.A->omega, r) * p.z[i]);
    for (int k = 0; k < p.m(); ++k) {
      if (k == j && r == 0) continue;  // the singular term is removed
      v -= p.A->sigma_dual(p.alpha(k), r) / (w[j] - ipow(p.A->omega, r) * w[k]);
    }
  }
  v += (double(T) * p.lambda0 + p.Lambda0) / w[j];
  return p.L->weight_form(v, p.alpha(j));
}

}  // namespace cyclo
