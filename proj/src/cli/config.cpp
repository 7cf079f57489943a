#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "whodge/cli.hpp"
#include "whodge/curvature.hpp"
#include "whodge/error.hpp"
#include "whodge/util.hpp"

namespace whodge::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ValidationError(path, msg); }

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path.empty() ? "config" : path, "must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
}

double get_real(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return parse_extended_real(j.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  fail(path, "expected a number or \"inf\"/\"-inf\"");
}

double get_finite(const json& j, const std::string& path) {
  const double v = get_real(j, path);
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

double get_positive(const json& j, const std::string& path) {
  const double v = get_finite(j, path);
  if (!(v > 0)) fail(path, "must be positive");
  return v;
}

int get_int(const json& j, const std::string& path, int lo, int hi) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < lo || v > hi) fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

const json& get_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

DomainSpec parse_domain(const json& j, json& echo) {
  if (j.is_string()) {
    DomainSpec s;
    try {
      s = domain_preset(j.get<std::string>());
    } catch (const ValidationError& e) {
      fail("domain", "unknown preset '" + j.get<std::string>() + "'");
    }
    echo = {{"preset", j.get<std::string>()}};
    echo["kind"] = to_string(s.kind);
    echo["parameters"] = s.parameters;
    echo["fillet"] = s.fillet;
    return s;
  }
  require_keys(j, "domain", {"preset", "kind", "parameters", "fillet"});
  if (j.contains("preset")) {
    if (j.contains("kind") || j.contains("parameters") || j.contains("fillet"))
      fail("domain.preset", "a preset cannot be combined with kind/parameters/fillet");
    return parse_domain(j.at("preset"), echo);
  }
  if (!j.contains("kind")) fail("domain", "needs a preset or a kind");
  DomainSpec s;
  try {
    s.kind = domain_kind_from_string(get_string(j.at("kind"), "domain.kind"));
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    fail("domain.kind", e.what());
  }
  if (!j.contains("parameters")) fail("domain.parameters", "missing");
  const json& ps = get_array(j.at("parameters"), "domain.parameters");
  for (std::size_t i = 0; i < ps.size(); ++i) s.parameters.push_back(get_finite(ps[i], idx("domain.parameters", i)));
  s.ambient_dim = (s.kind == DomainKind::interval || s.kind == DomainKind::circle) ? 1 : 2;
  if (j.contains("fillet")) s.fillet = get_finite(j.at("fillet"), "domain.fillet");
  try {
    s.validate();
  } catch (const ValidationError& e) {
    fail("domain." + e.field(), e.what());
  }
  echo = {{"kind", to_string(s.kind)}, {"parameters", s.parameters}, {"fillet", s.fillet}};
  return s;
}

Potential parse_potential(const json& j, json& echo) {
  if (j.is_string()) {
    try {
      Potential v = Potential::parse(j.get<std::string>());
      echo = j;
      return v;
    } catch (const std::exception& e) {
      fail("potential", "cannot parse '" + j.get<std::string>() + "'");
    }
  }
  require_keys(j, "potential", {"polynomial"});
  if (!j.contains("polynomial")) fail("potential", "expected a preset string or {\"polynomial\": [[i, j, c], ...]}");
  const json& rows = get_array(j.at("polynomial"), "potential.polynomial");
  std::vector<Potential::Term> terms;
  json out = json::array();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string path = idx("potential.polynomial", r);
    if (!rows[r].is_array() || rows[r].size() != 3) fail(path, "expected [i, j, c]");
    Potential::Term t;
    t.i = get_int(rows[r][0], path + "[0]", 0, 8);
    t.j = get_int(rows[r][1], path + "[1]", 0, 8);
    t.c = get_finite(rows[r][2], path + "[2]");
    terms.push_back(t);
    out.push_back({t.i, t.j, t.c});
  }
  echo = {{"polynomial", out}};
  return Potential::polynomial(std::move(terms));
}

std::vector<std::string> string_list(const json& j, const std::string& path) {
  std::vector<std::string> out;
  const json& a = get_array(j, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(get_string(a[i], idx(path, i)));
  return out;
}

json real_list_echo(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(json_real(x));
  return a;
}

}  // namespace

const std::vector<std::string>& check_ids() {
  static const std::vector<std::string> ids = {
      "eigen_spectrum",  "intertwining",        "variance_identity", "hodge_decomposition", "duality",
      "decomposition_identity", "green_identity", "bochner_identity", "gamma2",             "bl_scalar",
      "bl_forms",        "gap_lower_bound",     "semiclassical_sweep", "hypothesis_check"};
  return ids;
}

RunConfig parse_config(const json& j) {
  require_keys(j, "",
               {"domain", "potential", "h_param", "degrees", "realizations", "N", "checks", "mesh", "quad_order",
                "assembly_quad_order", "tolerances", "seed", "eigen_count", "samples", "h_list", "forms",
                "variants", "timing", "output"});
  RunConfig c;
  if (!j.contains("domain")) fail("domain", "missing");
  c.domain = parse_domain(j.at("domain"), c.domain_echo);
  const int n = c.domain.ambient_dim;

  Potential base;
  c.potential_echo = "zero";
  if (j.contains("potential")) base = parse_potential(j.at("potential"), c.potential_echo);
  if (j.contains("h_param")) c.h_param = get_positive(j.at("h_param"), "h_param");
  c.potential = base.with_h(c.h_param);

  if (j.contains("degrees")) {
    c.degrees.clear();
    const json& a = get_array(j.at("degrees"), "degrees");
    for (std::size_t i = 0; i < a.size(); ++i) c.degrees.push_back(get_int(a[i], idx("degrees", i), 0, n));
  }
  if (j.contains("realizations")) {
    c.realizations.clear();
    const auto names = string_list(j.at("realizations"), "realizations");
    for (std::size_t i = 0; i < names.size(); ++i) {
      Realization b;
      if (names[i] == "normal" || names[i] == "n") b = Realization::normal;
      else if (names[i] == "tangential" || names[i] == "t") b = Realization::tangential;
      else if (names[i] == "none") b = Realization::none;
      else fail(idx("realizations", i), "expected normal, tangential or none");
      if ((b == Realization::none) == c.domain.has_boundary())
        fail(idx("realizations", i), b == Realization::none ? "'none' needs a boundaryless domain"
                                                            : "a boundaryless domain only takes 'none'");
      c.realizations.push_back(b);
    }
  } else if (!c.domain.has_boundary()) {
    c.realizations = {Realization::none};
  }
  if (j.contains("N")) {
    c.N_list.clear();
    const json& a = get_array(j.at("N"), "N");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double N = get_real(a[i], idx("N", i));
      if (std::isnan(N)) fail(idx("N", i), "must not be NaN");
      c.N_list.push_back(N);
    }
  }
  for (std::size_t i = 0; i < c.N_list.size(); ++i) {
    try {
      check_admissible_N(c.N_list[i], n, c.potential);
    } catch (const std::exception& e) {
      c.flags.push_back({idx("N", i), std::string("inadmissible, dependent checks are not_applicable: ") + e.what()});
    }
  }
  if (j.contains("checks")) {
    c.checks = string_list(j.at("checks"), "checks");
    const auto& ids = check_ids();
    for (std::size_t i = 0; i < c.checks.size(); ++i)
      if (std::find(ids.begin(), ids.end(), c.checks[i]) == ids.end())
        fail(idx("checks", i), "unknown check_id '" + c.checks[i] + "'");
  }
  if (j.contains("mesh")) {
    const json& m = j.at("mesh");
    require_keys(m, "mesh", {"h", "refinements"});
    if (m.contains("h")) c.mesh_h = get_positive(m.at("h"), "mesh.h");
    if (m.contains("refinements")) c.refinements = get_int(m.at("refinements"), "mesh.refinements", 0, 6);
  }
  if (j.contains("quad_order")) c.quad_order = get_int(j.at("quad_order"), "quad_order", 1, 24);
  if (j.contains("assembly_quad_order"))
    c.assembly_quad_order = get_int(j.at("assembly_quad_order"), "assembly_quad_order", 1, 12);
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    require_keys(t, "tolerances",
                 {"identity", "inequality_abs", "inequality_rel", "variance", "intertwining", "hodge", "duality"});
    auto set = [&](const char* key, double& dst) {
      if (t.contains(key)) dst = get_positive(t.at(key), std::string("tolerances.") + key);
    };
    set("identity", c.tol.identity);
    set("inequality_abs", c.tol.inequality_abs);
    set("inequality_rel", c.tol.inequality_rel);
    set("variance", c.tol.variance);
    set("intertwining", c.tol.intertwining);
    set("hodge", c.tol.hodge);
    set("duality", c.tol.duality);
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("eigen_count")) c.eigen_count = get_int(j.at("eigen_count"), "eigen_count", 1, 64);
  if (j.contains("samples")) c.samples = get_int(j.at("samples"), "samples", 1, 1000);
  if (j.contains("h_list")) {
    c.h_list.clear();
    const json& a = get_array(j.at("h_list"), "h_list");
    for (std::size_t i = 0; i < a.size(); ++i) {
      c.h_list.push_back(get_positive(a[i], idx("h_list", i)));
      if (i > 0 && !(c.h_list[i] < c.h_list[i - 1])) fail(idx("h_list", i), "must be strictly descending");
    }
  }
  if (j.contains("forms")) {
    c.forms = string_list(j.at("forms"), "forms");
    for (std::size_t i = 0; i < c.forms.size(); ++i) {
      AnalyticForm w;
      try {
        w = catalog_form(c.forms[i]);
      } catch (const std::exception&) {
        fail(idx("forms", i), "unknown test form '" + c.forms[i] + "'");
      }
      if (w.n != n) fail(idx("forms", i), "form lives in dimension " + std::to_string(w.n));
    }
  }
  if (j.contains("variants")) {
    c.variants.clear();
    const auto names = string_list(j.at("variants"), "variants");
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == "closed") c.variants.push_back(FormVariant::closed);
      else if (names[i] == "coclosed") c.variants.push_back(FormVariant::coclosed);
      else fail(idx("variants", i), "expected closed or coclosed");
    }
  }
  if (j.contains("timing")) {
    if (!j.at("timing").is_boolean()) fail("timing", "expected a boolean");
    c.timing = j.at("timing").get<bool>();
  }
  if (j.contains("output")) c.output = get_string(j.at("output"), "output");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json RunConfig::to_json() const {
  json j;
  j["domain"] = domain_echo;
  j["potential"] = potential_echo;
  j["h_param"] = h_param;
  j["degrees"] = degrees;
  json bs = json::array();
  for (auto b : realizations) bs.push_back(to_string(b));
  j["realizations"] = bs;
  j["N"] = real_list_echo(N_list);
  j["checks"] = checks;
  j["mesh"] = {{"h", mesh_h}, {"refinements", refinements}};
  j["quad_order"] = quad_order;
  j["assembly_quad_order"] = assembly_quad_order;
  j["tolerances"] = {{"identity", tol.identity},         {"inequality_abs", tol.inequality_abs},
                     {"inequality_rel", tol.inequality_rel}, {"variance", tol.variance},
                     {"intertwining", tol.intertwining}, {"hodge", tol.hodge},
                     {"duality", tol.duality}};
  j["seed"] = seed;
  j["eigen_count"] = eigen_count;
  j["samples"] = samples;
  j["h_list"] = h_list;
  j["forms"] = forms;
  json vs = json::array();
  for (auto v : variants) vs.push_back(to_string(v));
  j["variants"] = vs;
  j["timing"] = timing;
  j["output"] = output;
  return j;
}

}  // namespace whodge::cli
