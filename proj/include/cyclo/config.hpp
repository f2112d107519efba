#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "cyclo/bethe.hpp"

namespace cyclo {

struct RunConfig {
  char series = 'A';
  int rank = 1;
  std::vector<int> diagram_perm;  // 0-based
  std::vector<int> tau_powers;    // tau_i = omega^power
  int T = 1;
  std::optional<cplx> omega_override;
  std::vector<cplx> z;
  std::vector<Vec> lambda_fund;
  Vec lambda0_fund;
  Vec chi_fund;
  std::vector<int> colors;  // 0-based
  int n_inf = 1;
  std::vector<int> n_sites;
  int n0 = 1;
  double tol_identity = 1e-8;
  double tol_eigen = 1e-8;
  double tol_solver = 1e-10;
  std::uint64_t seed = 12345;
  int block_height_max = 4;
  long block_dim_cap = 20000;
  int surat_samples = 8;
  int newton_starts = 200;

  std::string config_hash;  // FNV-1a of the canonical JSON dump
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_json(const nlohmann::json& j);

// Built objects for one configuration. Construction performs every
// precondition check (orbit disjointness, chi admissibility, order
// divisibility, sigma-invariance of lambda0).
struct Instance {
  RunConfig cfg;
  SimpleLieAlgebra L;
  Automorphism A;
  std::vector<Vec> lambdas;  // alpha coords
  Vec lambda0;
  ChiForm chi;
  std::shared_ptr<CurrentAlgebra> ca;  // at the configured truncation orders
};

Instance build_instance(const RunConfig& cfg);

nlohmann::ordered_json complex_json(const cplx& v);
cplx complex_from_json(const nlohmann::json& j, const std::string& field);

}  // namespace cyclo
