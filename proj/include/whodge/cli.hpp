#pragma once

// Batch driver: JSON run configurations, check dispatch across a mesh
// refinement ladder, and the report / CSV emitters behind tools/whodge.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "whodge/verify.hpp"

namespace whodge::cli {

struct ConfigFlag {
  std::string path;
  std::string message;
};

struct Tolerances {
  double identity = kIdentityTol;
  double inequality_abs = kInequalityAbsTol;
  double inequality_rel = kInequalityRelTol;
  double variance = kVarianceTol;
  double intertwining = 1e-10;
  double hodge = 1e-8;
  double duality = 1e-6;
};

struct RunConfig {
  nlohmann::json domain_echo;
  DomainSpec domain;
  nlohmann::json potential_echo;
  Potential potential;  // h_param applied
  double h_param = 1.0;
  std::vector<int> degrees{0};
  std::vector<Realization> realizations{Realization::normal};
  std::vector<double> N_list{kInf};
  std::vector<std::string> checks;
  double mesh_h = 0.2;
  int refinements = 0;  // levels = refinements + 1, h halves per level
  int quad_order = 8;           // analytic quadrature
  int assembly_quad_order = 4;  // mass matrices
  Tolerances tol;
  std::uint64_t seed = kDefaultSeed;
  int eigen_count = 4;
  int samples = 10;
  std::vector<double> h_list{1.0, 0.5, 0.25};
  std::vector<std::string> forms;  // catalog names; empty runs the built-in suites
  std::vector<FormVariant> variants{FormVariant::coclosed};
  bool timing = false;
  std::string output;
  std::vector<ConfigFlag> flags;  // parse-time notes (inadmissible N, ...)

  // Normalized echo with every default spelled out.
  nlohmann::json to_json() const;
};

// Throws ValidationError whose field() is the offending key path.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

struct ConvergenceTable {
  std::string check_id;
  std::string case_name;
  std::string variable;  // "h" or "quad_order"
  std::vector<double> x, err;
  std::optional<double> observed_order;
  std::string note;
  nlohmann::json to_json() const;
};

// Least-squares slope of log err against log x over the positive finite
// entries; empty with fewer than 3 of them.
std::optional<double> observed_order(const std::vector<double>& x, const std::vector<double>& err);

struct Report {
  nlohmann::json config;
  nlohmann::json version;
  std::vector<ConfigFlag> flags;
  std::vector<CheckRecord> records;
  std::vector<ConvergenceTable> tables;
  int n_pass = 0, n_fail = 0, n_na = 0;

  nlohmann::json to_json() const;
  std::string dump() const;  // pretty JSON with a trailing newline
  std::string csv() const;
  int exit_code() const { return n_fail > 0 ? 1 : 0; }
};

// `convergence` fits orders per check and adds quadrature-order sweeps for
// the analytic identities; it needs refinements >= 3.
Report run(const RunConfig& cfg, bool convergence = false);

const std::vector<std::string>& check_ids();
std::string list_presets();

}  // namespace whodge::cli
