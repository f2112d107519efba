#include "cyclo/config.hpp"

#include <fstream>

namespace cyclo {

using nlohmann::json;

nlohmann::ordered_json complex_json(const cplx& v) {
  return nlohmann::ordered_json::array({v.real(), v.imag()});
}

cplx complex_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw config_error("field '" + field + "': complex numbers are [re, im] pairs");
  return cplx(j[0].get<double>(), j[1].get<double>());
}

namespace {

Vec vec_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw config_error("field '" + field + "': expected an array");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[i] = complex_from_json(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

const json& need(const json& j, const std::string& key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw config_error("field '" + ctx + key + "' is missing");
  return *it;
}

}  // namespace

RunConfig parse_config_json(const json& j) {
  RunConfig c;
  const json& alg = need(j, "algebra", "");
  std::string series = need(alg, "series", "algebra.").get<std::string>();
  if (series.size() != 1) throw config_error("field 'algebra.series': single letter expected");
  c.series = series[0];
  c.rank = need(alg, "rank", "algebra.").get<int>();

  const json& au = need(j, "automorphism", "");
  c.T = need(au, "T", "automorphism.").get<int>();
  if (c.T < 1) throw config_error("field 'automorphism.T': order must be >= 1");
  for (const auto& v : need(au, "diagram_perm", "automorphism.")) {
    int node = v.get<int>();
    if (node < 1 || node > c.rank)
      throw config_error("field 'automorphism.diagram_perm': nodes are 1-based Dynkin labels");
    c.diagram_perm.push_back(node - 1);
  }
  for (const auto& v : need(au, "tau_powers", "automorphism.")) c.tau_powers.push_back(v.get<int>());

  if (j.contains("omega")) c.omega_override = complex_from_json(j["omega"], "omega");

  for (std::size_t i = 0; i < need(j, "points", "").size(); ++i)
    c.z.push_back(complex_from_json(j["points"][i], "points[" + std::to_string(i) + "]"));

  const json& w = need(j, "weights", "");
  for (std::size_t i = 0; i < need(w, "lambda", "weights.").size(); ++i)
    c.lambda_fund.push_back(
        vec_from_json(w["lambda"][i], "weights.lambda[" + std::to_string(i) + "]"));
  c.lambda0_fund = vec_from_json(need(w, "lambda0", "weights."), "weights.lambda0");

  c.chi_fund = j.contains("chi") ? vec_from_json(j["chi"], "chi") : Vec(Vec::Zero(c.rank));

  if (j.contains("colors"))
    for (const auto& v : j["colors"]) {
      int node = v.get<int>();
      if (node < 1 || node > c.rank)
        throw config_error("field 'colors': 1-based Dynkin labels expected");
      c.colors.push_back(node - 1);
    }

  const json& tr = need(j, "truncation", "");
  c.n_inf = need(tr, "n_inf", "truncation.").get<int>();
  for (const auto& v : need(tr, "n_sites", "truncation.")) c.n_sites.push_back(v.get<int>());
  c.n0 = need(tr, "n0", "truncation.").get<int>();
  if (c.n_sites.size() != c.z.size())
    throw config_error("field 'truncation.n_sites': one order per marked point");

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (t.contains("identity")) c.tol_identity = t["identity"].get<double>();
    if (t.contains("eigen")) c.tol_eigen = t["eigen"].get<double>();
    if (t.contains("solver")) c.tol_solver = t["solver"].get<double>();
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("block_height_max")) c.block_height_max = j["block_height_max"].get<int>();
  if (j.contains("block_dim_cap")) c.block_dim_cap = j["block_dim_cap"].get<long>();
  if (j.contains("surat_samples")) c.surat_samples = j["surat_samples"].get<int>();
  if (j.contains("newton_starts")) c.newton_starts = j["newton_starts"].get<int>();

  c.config_hash = hex64(fnv1a(j.dump()));
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config_json(j);
}

Instance build_instance(const RunConfig& cfg) {
  Instance ins;
  ins.cfg = cfg;
  ins.L = build_simple_lie_algebra(cfg.series, cfg.rank);

  cplx omega = cfg.omega_override
                   ? *cfg.omega_override
                   : std::exp(cplx(0.0, 2.0 * kPi / double(cfg.T)));
  if (cfg.T == 1) omega = 1.0;
  std::vector<cplx> taus;
  for (int p : cfg.tau_powers) taus.push_back(ipow(omega, p));
  if (int(cfg.diagram_perm.size()) != ins.L.rank)
    throw config_error("field 'automorphism.diagram_perm': one entry per Dynkin node");
  if (int(taus.size()) != ins.L.rank)
    throw config_error("field 'automorphism.tau_powers': one entry per Dynkin node");
  ins.A = build_automorphism(ins.L, cfg.diagram_perm, taus, cfg.T, omega);

  if (int(cfg.lambda_fund.size()) != int(cfg.z.size()))
    throw config_error("field 'weights.lambda': one weight per marked point");
  for (const auto& lf : cfg.lambda_fund) {
    if (lf.size() != ins.L.rank)
      throw config_error("field 'weights.lambda': fundamental coordinates of length rank");
    ins.lambdas.push_back(ins.L.fundamental_to_alpha(lf));
  }
  if (cfg.lambda0_fund.size() != ins.L.rank)
    throw config_error("field 'weights.lambda0': fundamental coordinates of length rank");
  ins.lambda0 = ins.L.fundamental_to_alpha(cfg.lambda0_fund);
  if (!ins.A.is_sigma_invariant_weight(ins.lambda0))
    throw config_error("field 'weights.lambda0': weight is not sigma-invariant");

  if (cfg.chi_fund.size() != ins.L.rank)
    throw config_error("field 'chi': fundamental coordinates of length rank");
  ins.chi = make_chi(ins.L, ins.A, ins.L.fundamental_to_alpha(cfg.chi_fund));

  ins.ca = std::make_shared<CurrentAlgebra>(
      build_current_algebra(ins.L, ins.A, cfg.z, cfg.n_inf, cfg.n_sites, cfg.n0));
  return ins;
}

}  // namespace cyclo
