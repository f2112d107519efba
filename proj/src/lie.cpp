#include "cyclo/lie.hpp"

#include <algorithm>
#include <sstream>

namespace cyclo {

namespace {

std::vector<int> to_std(const IVec& v) {
  return std::vector<int>(v.data(), v.data() + v.size());
}

}  // namespace

int SimpleLieAlgebra::find_root(const IVec& coords) const {
  auto it = root_lookup.find(to_std(coords));
  return it == root_lookup.end() ? -1 : it->second;
}

Vec SimpleLieAlgebra::bracket(const Vec& x, const Vec& y) const {
  Vec z = Vec::Zero(dim);
  for (int a = 0; a < dim; ++a) {
    if (x[a] == cplx(0.0)) continue;
    for (int b = 0; b < dim; ++b) {
      cplx c = x[a] * y[b];
      if (c == cplx(0.0)) continue;
      for (const auto& [idx, v] : table[a * dim + b]) z[idx] += c * v;
    }
  }
  return z;
}

cplx SimpleLieAlgebra::form(const Vec& x, const Vec& y) const {
  return x.transpose() * form_g.cast<cplx>() * y;
}

cplx SimpleLieAlgebra::weight_form(const Vec& a, const Vec& b) const {
  return a.transpose() * form_h.cast<cplx>() * b;
}

cplx SimpleLieAlgebra::weight_eval(const Vec& lambda, const Vec& h) const {
  // lambda(H_i) = <lambda, alpha_i> for simply-laced types
  cplx r = 0.0;
  Vec pair = form_h.cast<cplx>() * lambda;
  for (int i = 0; i < rank; ++i) r += h[h_index(i)] * pair[i];
  return r;
}

Vec SimpleLieAlgebra::fundamental_to_alpha(const Vec& fund) const {
  return form_h_inv.cast<cplx>() * fund;
}

Vec SimpleLieAlgebra::alpha_to_fundamental(const Vec& alpha) const {
  return form_h.cast<cplx>() * alpha;
}

Vec SimpleLieAlgebra::basis_weight(int a) const {
  Vec w = Vec::Zero(rank);
  const BasisLabel& lb = labels[a];
  if (lb.kind == GenKind::Cartan) return w;
  double sgn = lb.kind == GenKind::Raise ? 1.0 : -1.0;
  for (int i = 0; i < rank; ++i) w[i] = sgn * double(pos_roots[lb.index][i]);
  return w;
}

std::string SimpleLieAlgebra::label_str(int a) const {
  std::ostringstream os;
  const BasisLabel& lb = labels[a];
  if (lb.kind == GenKind::Cartan) {
    os << "H" << (lb.index + 1);
    return os.str();
  }
  os << (lb.kind == GenKind::Raise ? "E" : "F") << "(";
  for (int i = 0; i < rank; ++i) {
    if (i) os << ",";
    os << pos_roots[lb.index][i];
  }
  os << ")";
  return os.str();
}

SimpleLieAlgebra build_simple_lie_algebra(char series, int rank) {
  if (series != 'A' || rank < 1 || rank > 4)
    throw unsupported_error("unsupported algebra series/rank (supported: A1..A4)");

  SimpleLieAlgebra L;
  L.series = series;
  L.rank = rank;
  L.npos = rank * (rank + 1) / 2;
  L.dim = rank + 2 * L.npos;

  L.cartan = Eigen::MatrixXi::Zero(rank, rank);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j)
      L.cartan(i, j) = i == j ? 2 : (std::abs(i - j) == 1 ? -1 : 0);

  // positive roots alpha_i + ... + alpha_{j-1} as matrix positions (i, j)
  struct RootPos {
    int i, j;
  };
  std::vector<RootPos> pos;
  for (int h = 1; h <= rank; ++h)
    for (int i = 0; i + h <= rank; ++i) pos.push_back({i, i + h});
  for (int r = 0; r < L.npos; ++r) {
    IVec c = IVec::Zero(rank);
    for (int k = pos[r].i; k < pos[r].j; ++k) c[k] = 1;
    L.pos_roots.push_back(c);
    L.root_height.push_back(pos[r].j - pos[r].i);
    L.root_lookup[to_std(c)] = r;
  }

  for (int i = 0; i < rank; ++i) L.labels.push_back({GenKind::Cartan, i});
  for (int r = 0; r < L.npos; ++r) L.labels.push_back({GenKind::Raise, r});
  for (int r = 0; r < L.npos; ++r) L.labels.push_back({GenKind::Lower, r});

  // defining representation on C^{rank+1}
  int n = rank + 1;
  auto unit = [&](int i, int j) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m(i, j) = 1.0;
    return m;
  };
  std::vector<Eigen::MatrixXd> rep(L.dim);
  for (int i = 0; i < rank; ++i) rep[L.h_index(i)] = unit(i, i) - unit(i + 1, i + 1);
  for (int r = 0; r < L.npos; ++r) {
    rep[L.e_index(r)] = unit(pos[r].i, pos[r].j);
    rep[L.f_index(r)] = unit(pos[r].j, pos[r].i);
  }

  // decompose a traceless matrix back into basis coordinates
  auto decompose = [&](const Eigen::MatrixXd& m) {
    std::vector<std::pair<int, double>> out;
    double acc = 0.0;
    for (int i = 0; i < rank; ++i) {
      acc += m(i, i);
      if (acc != 0.0) out.push_back({L.h_index(i), acc});
    }
    for (int r = 0; r < L.npos; ++r) {
      double e = m(pos[r].i, pos[r].j);
      double f = m(pos[r].j, pos[r].i);
      if (e != 0.0) out.push_back({L.e_index(r), e});
      if (f != 0.0) out.push_back({L.f_index(r), f});
    }
    return out;
  };

  L.table.resize(std::size_t(L.dim) * L.dim);
  for (int a = 0; a < L.dim; ++a)
    for (int b = 0; b < L.dim; ++b)
      L.table[std::size_t(a) * L.dim + b] = decompose(rep[a] * rep[b] - rep[b] * rep[a]);

  // trace form in the defining rep already gives long roots square length 2
  L.form_g = Eigen::MatrixXd::Zero(L.dim, L.dim);
  for (int a = 0; a < L.dim; ++a)
    for (int b = a; b < L.dim; ++b)
      L.form_g(a, b) = L.form_g(b, a) = (rep[a] * rep[b]).trace();

  L.form_h = L.cartan.cast<double>();
  L.form_h_inv = L.form_h.inverse();

  L.rho = Eigen::VectorXd::Zero(rank);
  for (int r = 0; r < L.npos; ++r) L.rho += 0.5 * L.pos_roots[r].cast<double>();

  L.dual_coxeter = 1 + L.root_height[L.npos - 1];
  return L;
}

DualBasisPair dual_bases(const SimpleLieAlgebra& L) {
  DualBasisPair d;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(L.form_g);
  if (!lu.isInvertible()) throw internal_error("singular invariant form");
  Eigen::MatrixXd ginv = lu.inverse();
  for (int a = 0; a < L.dim; ++a) {
    Vec e = Vec::Zero(L.dim);
    e[a] = 1.0;
    d.I.push_back(e);
    d.I_dual.push_back(ginv.col(a).cast<cplx>());
  }
  return d;
}

cplx casimir_eigenvalue(const SimpleLieAlgebra& L, const Vec& lambda) {
  Vec shifted = lambda + 2.0 * L.rho.cast<cplx>();
  return 0.5 * L.weight_form(lambda, shifted);
}

}  // namespace cyclo
