#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "whodge/cli.hpp"
#include "whodge/curvature.hpp"
#include "whodge/error.hpp"
#include "whodge/kernels.hpp"
#include "whodge/util.hpp"

namespace whodge::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kReportSchema = 1;

using Job = std::function<CheckRecord()>;

std::string bname(Realization b) { return to_string(b); }

std::string tag(int p, Realization b) { return "p=" + std::to_string(p) + " b=" + bname(b); }

std::string ntag(double N) { return "N=" + format_real(N); }

// One mesh per refinement level, generated on first use.
class MeshLadderCache {
 public:
  MeshLadderCache(const DomainSpec& spec, double h0, int levels) : spec_(spec), h0_(h0), meshes_(levels) {}

  int levels() const { return static_cast<int>(meshes_.size()); }
  double target_h(int k) const { return h0_ / double(1 << k); }

  std::shared_ptr<const SimplicialComplex> at(int k) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!meshes_[k]) meshes_[k] = std::make_shared<const SimplicialComplex>(generate_mesh(spec_, target_h(k)));
    return meshes_[k];
  }

 private:
  DomainSpec spec_;
  double h0_;
  std::mutex mu_;
  std::vector<std::shared_ptr<const SimplicialComplex>> meshes_;
};

CheckRecord base_record(const std::string& id, const std::string& case_name, const RunConfig& cfg, int p,
                        Realization b, const SimplicialComplex* mesh, int quad, double N = kInf) {
  CheckRecord r;
  r.check_id = id;
  r.case_name = case_name;
  r.inputs = make_inputs(cfg.domain, cfg.potential, p, b, N);
  r.quad_order = quad;
  r.mesh_h = mesh ? mesh->mesh_size_h : 0.0;
  r.hypothesis_status = HypothesisStatus::not_applicable;
  return r;
}

void finalize_residual(CheckRecord& r, double residual, double tol) {
  r.kind = CheckKind::identity;
  r.lhs = residual;
  r.rhs = 0.0;
  r.abs_err = residual;
  r.rel_err = residual;
  r.tolerance = tol;
  r.pass = std::isfinite(residual) && residual <= tol;
  r.outcome = r.pass ? Outcome::pass : Outcome::fail;
}

// Record for a check skipped because N failed admissibility at parse time.
CheckRecord inadmissible_record(const std::string& id, const std::string& case_name, const RunConfig& cfg, int p,
                                Realization b, double N, CheckKind kind) {
  CheckRecord r = base_record(id, case_name, cfg, p, b, nullptr, cfg.quad_order, N);
  r.kind = kind;
  r.lhs = r.rhs = std::nan("");
  r.abs_err = r.rel_err = std::nan("");
  r.pass = false;
  r.outcome = Outcome::not_applicable;
  r.note = "N is inadmissible for this dimension and potential (flagged at parse time)";
  return r;
}

bool admissible(const RunConfig& cfg, double N) {
  try {
    check_admissible_N(N, cfg.domain.ambient_dim, cfg.potential);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

// Closed-form spectra for V constant: intervals (Neumann/Dirichlet by degree
// and realization) and circles.
std::optional<std::vector<double>> exact_spectrum(const RunConfig& cfg, int p, Realization b, int count) {
  if (!cfg.potential.is_constant()) return std::nullopt;
  const auto& s = cfg.domain;
  std::vector<double> out;
  if (s.kind == DomainKind::interval) {
    const double L = s.parameters[1] - s.parameters[0];
    // Functions with b = normal and 1-forms with b = tangential keep constants.
    const bool neumann = (p == 0) == (b == Realization::normal);
    for (int k = neumann ? 0 : 1; static_cast<int>(out.size()) < count; ++k)
      out.push_back(std::pow(k * std::numbers::pi / L, 2));
    return out;
  }
  if (s.kind == DomainKind::circle) {
    const double L = s.parameters[0];
    out.push_back(0.0);
    for (int k = 1; static_cast<int>(out.size()) < count; ++k) {
      const double lam = std::pow(2 * k * std::numbers::pi / L, 2);
      out.push_back(lam);
      out.push_back(lam);
    }
    out.resize(count);
    return out;
  }
  return std::nullopt;
}

Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = g(rng);
  return x;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return seed + 0x9E3779B97F4A7C15ull * (a + 1) + 0xBF58476D1CE4E5B9ull * b;
}

// ---------------------------------------------------------------------------
// Mesh-ladder checks

CheckRecord eigen_spectrum(const RunConfig& cfg, MeshLadderCache& meshes, int level, int p, Realization b) {
  const auto mesh = meshes.at(level);
  const auto op = assemble_weighted_laplacian(mesh, p, cfg.potential, b, cfg.assembly_quad_order);
  const int k = std::min(cfg.eigen_count, op.size());
  const SpectralResult sr = lowest_eigenpairs(op, k, 1e-8, cfg.seed);
  CheckRecord r = base_record("eigen_spectrum", tag(p, b), cfg, p, b, mesh.get(), cfg.assembly_quad_order);
  r.kind = CheckKind::report;
  const auto exact = exact_spectrum(cfg, p, b, k);
  bool converged = true;
  for (int i = 0; i < k; ++i) {
    r.terms.emplace_back("lambda[" + std::to_string(i) + "]", sr.eigenvalues[i]);
    if (exact) r.terms.emplace_back("exact[" + std::to_string(i) + "]", (*exact)[i]);
    r.terms.emplace_back("residual[" + std::to_string(i) + "]", sr.residual_norms[i]);
    converged = converged && sr.residual_norms[i] <= sr.tol * (1 + std::abs(sr.eigenvalues[i]));
  }
  r.terms.emplace_back("kernel_dim", sr.kernel_dim);
  const int first = sr.kernel_dim;
  r.lhs = first < k ? sr.eigenvalues[first] : std::nan("");
  if (exact) {
    r.rhs = first < k ? (*exact)[first] : std::nan("");
    r.abs_err = std::abs(r.lhs - r.rhs);
    r.rel_err = r.abs_err / std::abs(r.rhs);
    r.note = "lhs: first nonkernel eigenvalue; rhs: closed form";
  } else {
    r.rhs = r.abs_err = r.rel_err = std::nan("");
    r.note = "lhs: first nonkernel eigenvalue; no closed form for this input";
  }
  r.tolerance = sr.tol;
  r.pass = converged;
  r.outcome = r.pass ? Outcome::pass : Outcome::fail;
  return r;
}

CheckRecord intertwining(const RunConfig& cfg, MeshLadderCache& meshes, int level, int p, Realization b) {
  const auto mesh = meshes.at(level);
  const auto a = assemble_weighted_laplacian(mesh, p, cfg.potential, b, cfg.assembly_quad_order);
  const auto c = assemble_weighted_laplacian(mesh, p + 1, cfg.potential, b, cfg.assembly_quad_order);
  const auto rep = check_intertwining(a, c, cfg.samples, mix_seed(cfg.seed, level, p));
  CheckRecord r = base_record("intertwining", tag(p, b), cfg, p, b, mesh.get(), cfg.assembly_quad_order);
  finalize_residual(r, rep.max_residual, cfg.tol.intertwining);
  r.terms = {{"samples", double(rep.samples)}};
  r.note = "max over samples of |L(p+1) D x - D L(p) x| / |L(p) x|";
  return r;
}

CheckRecord variance(const RunConfig& cfg, MeshLadderCache& meshes, int level, Realization b) {
  const auto mesh = meshes.at(level);
  const auto op0 = assemble_weighted_laplacian(mesh, 0, cfg.potential, b, cfg.assembly_quad_order);
  const auto op1 = assemble_weighted_laplacian(mesh, 1, cfg.potential, b, cfg.assembly_quad_order);
  const KernelProjector p0 = kernel_projector(op0), p1 = kernel_projector(op1);
  CheckRecord worst;
  bool have = false;
  for (int s = 0; s < cfg.samples; ++s) {
    Cochain eta{0, b, random_vector(op0.size(), mix_seed(cfg.seed, level, 1000 + s))};
    CheckRecord r = check_variance_identity(eta, op0, op1, cfg.tol.variance, &p0, &p1);
    if (!have || !(r.rel_err <= worst.rel_err)) {
      worst = r;
      worst.terms.emplace_back("worst_sample", s);
      have = true;
    }
  }
  worst.case_name = "worst of " + std::to_string(cfg.samples) + " random cochains b=" + bname(b);
  worst.terms.emplace_back("samples", cfg.samples);
  return worst;
}

CheckRecord hodge(const RunConfig& cfg, MeshLadderCache& meshes, int level, int p, Realization b) {
  const auto mesh = meshes.at(level);
  const auto op = assemble_weighted_laplacian(mesh, p, cfg.potential, b, cfg.assembly_quad_order);
  const KernelProjector proj = kernel_projector(op);
  const Cochain x{p, b, random_vector(op.size(), mix_seed(cfg.seed, level, 2000 + p))};
  const HodgeSplit s = hodge_decompose(x, op, &proj);
  CheckRecord r = base_record("hodge_decomposition", tag(p, b), cfg, p, b, mesh.get(), cfg.assembly_quad_order);
  finalize_residual(r, std::max({s.recomposition, s.kernel_exact, s.kernel_coexact, s.exact_coexact}),
                    cfg.tol.hodge);
  r.terms = {{"recomposition", s.recomposition},   {"kernel_exact", s.kernel_exact},
             {"kernel_coexact", s.kernel_coexact}, {"exact_coexact", s.exact_coexact},
             {"kernel_dim", double(proj.dim())},   {"iterations", double(s.iterations)}};
  r.note = "max of recomposition and pairwise orthogonality residuals";
  return r;
}

CheckRecord duality(const RunConfig& cfg, MeshLadderCache& meshes, int level, int p, Realization b) {
  const auto mesh = meshes.at(level);
  const int n = mesh->dim;
  const auto direct = assemble_weighted_laplacian(mesh, p, cfg.potential, b, cfg.assembly_quad_order);
  const DualProblem dp = dual_problem(n, p, b, cfg.potential);
  const auto dual = assemble_weighted_laplacian(mesh, dp.degree, dp.potential, dp.b, cfg.assembly_quad_order);
  const int k = std::min({cfg.eigen_count, direct.size(), dual.size()});
  const SpectralResult a = lowest_eigenpairs(direct, k, 1e-8, cfg.seed);
  const SpectralResult c = lowest_eigenpairs(dual, k, 1e-8, cfg.seed);
  CheckRecord r = base_record("duality", tag(p, b) + " vs " + tag(dp.degree, dp.b) + " with -V", cfg, p, b,
                              mesh.get(), cfg.assembly_quad_order);
  r.kind = CheckKind::identity;
  double rel = 0.0, ab = 0.0;
  for (int i = 0; i < k; ++i) {
    r.terms.emplace_back("lambda_direct[" + std::to_string(i) + "]", a.eigenvalues[i]);
    r.terms.emplace_back("lambda_dual[" + std::to_string(i) + "]", c.eigenvalues[i]);
    if (i < std::max(a.kernel_dim, c.kernel_dim)) continue;
    const double d = std::abs(a.eigenvalues[i] - c.eigenvalues[i]);
    ab = std::max(ab, d);
    rel = std::max(rel, d / std::max(std::abs(a.eigenvalues[i]), std::abs(c.eigenvalues[i])));
  }
  r.terms.emplace_back("kernel_dim_direct", a.kernel_dim);
  r.terms.emplace_back("kernel_dim_dual", c.kernel_dim);
  const int first = a.kernel_dim;
  r.lhs = first < k ? a.eigenvalues[first] : std::nan("");
  r.rhs = c.kernel_dim < k ? c.eigenvalues[c.kernel_dim] : std::nan("");
  r.abs_err = ab;
  r.rel_err = rel;
  r.tolerance = cfg.tol.duality;
  r.pass = a.kernel_dim == c.kernel_dim && rel <= cfg.tol.duality;
  r.outcome = r.pass ? Outcome::pass : Outcome::fail;
  r.note = "max relative gap over the nonkernel eigenvalues; kernel dimensions must agree";
  return r;
}

// ---------------------------------------------------------------------------
// Analytic checks

void retolerance_identity(CheckRecord& r, double tol) {
  if (r.kind != CheckKind::identity || r.outcome == Outcome::not_applicable) return;
  r.tolerance = tol;
  r.pass = std::isfinite(r.rel_err) && r.rel_err <= tol;
  r.outcome = r.pass ? Outcome::pass : Outcome::fail;
}

struct AnalyticCase {
  std::string name;
  AnalyticForm w;
  Potential V;
  DomainSpec spec;
  Realization b;
};

// Built-in suite, or the configured forms against the configured domain and potential.
std::vector<AnalyticCase> analytic_cases(const RunConfig& cfg, const std::vector<IdentityCase>& suite,
                                         bool scalar_only) {
  std::vector<AnalyticCase> out;
  if (cfg.forms.empty()) {
    for (const auto& c : suite) out.push_back({c.name, c.w, c.V, c.spec, c.b});
    return out;
  }
  for (const auto& name : cfg.forms) {
    const AnalyticForm w = catalog_form(name);
    if (scalar_only && w.p != 0) continue;
    if (w.declared != Realization::none) {
      out.push_back({name, w, cfg.potential, cfg.domain, w.declared});
      continue;
    }
    for (auto b : cfg.realizations) out.push_back({name + " b=" + bname(b), w, cfg.potential, cfg.domain, b});
  }
  return out;
}

std::function<CheckRecord(int)> identity_eval(const std::string& id, const AnalyticCase& c) {
  if (id == "decomposition_identity")
    return [c](int q) { return eval_decomposition_identity(c.w, c.V, c.spec, c.b, q); };
  if (id == "green_identity") return [c](int q) { return eval_green_identity(c.w, c.V, c.spec, c.b, q); };
  if (id == "bochner_identity") return [c](int q) { return eval_bochner_identity(c.w, c.spec, c.b, q); };
  return [c](int q) { return check_gamma2(c.w, c.V, c.spec, q); };
}

std::vector<IdentityCase> identity_suite(const std::string& id) {
  if (id == "decomposition_identity") return decomposition_cases();
  if (id == "green_identity") return green_cases();
  if (id == "bochner_identity") return bochner_cases();
  return gamma_cases();
}

bool is_identity_check(const std::string& id) {
  return id == "decomposition_identity" || id == "green_identity" || id == "bochner_identity" || id == "gamma2";
}

// ---------------------------------------------------------------------------

struct Planned {
  std::string check_id;
  std::string case_key;  // case identity without the mesh level
  Job job;
};

void plan(const RunConfig& cfg, MeshLadderCache& meshes, std::vector<Planned>& out) {
  const int n = cfg.domain.ambient_dim;
  const int levels = meshes.levels();
  auto add = [&](const std::string& id, const std::string& key, Job f) {
    out.push_back({id, key, [id, key, f = std::move(f)] {
                     const auto t0 = std::chrono::steady_clock::now();
                     CheckRecord r = guarded(id, key, f);
                     r.case_name = key;
                     if (record_timing() && r.runtime_ms == 0.0)
                       r.runtime_ms =
                           std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                     return r;
                   }});
  };
  auto ladder = [&](const std::string& id, const std::string& key, std::function<CheckRecord(int)> f) {
    for (int k = 0; k < levels; ++k) add(id, key, [f, k] { return f(k); });
  };

  for (const auto& id : cfg.checks) {
    if (id == "eigen_spectrum") {
      for (int p : cfg.degrees)
        for (auto b : cfg.realizations)
          ladder(id, tag(p, b), [&cfg, &meshes, p, b](int k) { return eigen_spectrum(cfg, meshes, k, p, b); });
    } else if (id == "intertwining") {
      for (int p : cfg.degrees)
        if (p < n)
          for (auto b : cfg.realizations)
            ladder(id, tag(p, b), [&cfg, &meshes, p, b](int k) { return intertwining(cfg, meshes, k, p, b); });
    } else if (id == "variance_identity") {
      for (auto b : cfg.realizations)
        ladder(id, "b=" + bname(b), [&cfg, &meshes, b](int k) { return variance(cfg, meshes, k, b); });
    } else if (id == "hodge_decomposition") {
      for (int p : cfg.degrees)
        for (auto b : cfg.realizations)
          ladder(id, tag(p, b), [&cfg, &meshes, p, b](int k) { return hodge(cfg, meshes, k, p, b); });
    } else if (id == "duality") {
      for (int p : cfg.degrees)
        for (auto b : cfg.realizations)
          ladder(id, tag(p, b), [&cfg, &meshes, p, b](int k) { return duality(cfg, meshes, k, p, b); });
    } else if (is_identity_check(id)) {
      for (const auto& c : analytic_cases(cfg, identity_suite(id), id == "gamma2")) {
        auto f = identity_eval(id, c);
        add(id, c.name, [f, &cfg] {
          CheckRecord r = f(cfg.quad_order);
          retolerance_identity(r, cfg.tol.identity);
          return r;
        });
      }
    } else if (id == "bl_scalar" || id == "bl_forms") {
      const bool scalar = id == "bl_scalar";
      if (cfg.forms.empty()) {
        for (const auto& c : bl_suite()) {
          if (c.scalar != scalar) continue;
          add(id, c.name, [c, &cfg] {
            CheckRecord r = run_inequality_case(c, cfg.quad_order, cfg.mesh_h);
            r.case_name = c.name;
            finalize_inequality(r, cfg.tol.inequality_abs, cfg.tol.inequality_rel);
            return r;
          });
        }
        continue;
      }
      for (const auto& ac : analytic_cases(cfg, {}, scalar)) {
        if (scalar) {
          for (double N : cfg.N_list) {
            const std::string key = ac.name + " " + ntag(N);
            if (!admissible(cfg, N)) {
              add(id, key, [=, &cfg] {
                return inadmissible_record(id, key, cfg, 0, ac.b, N, CheckKind::inequality);
              });
              continue;
            }
            add(id, key, [ac, N, &cfg] {
              CheckRecord r = check_bl_scalar(ac.w, ac.V, ac.spec, ac.b, N, cfg.quad_order);
              finalize_inequality(r, cfg.tol.inequality_abs, cfg.tol.inequality_rel);
              return r;
            });
          }
        } else {
          for (auto v : cfg.variants)
            add(id, ac.name + " " + to_string(v), [ac, v, &cfg] {
              CheckRecord r = check_bl_forms(ac.w, ac.V, ac.spec, ac.b, v, cfg.quad_order, cfg.mesh_h);
              finalize_inequality(r, cfg.tol.inequality_abs, cfg.tol.inequality_rel);
              return r;
            });
        }
      }
    } else if (id == "gap_lower_bound") {
      for (int p : cfg.degrees)
        for (auto b : cfg.realizations)
          for (double N : cfg.N_list) {
            if (p != 0 && !std::isinf(N)) continue;  // the N-refined bound is for functions
            const std::string key = tag(p, b) + " " + ntag(N);
            if (!admissible(cfg, N)) {
              add(id, key, [=, &cfg] { return inadmissible_record(id, key, cfg, p, b, N, CheckKind::inequality); });
              continue;
            }
            add(id, key, [p, b, N, &cfg, levels] {
              return check_gap_lower_bound(cfg.potential, cfg.domain, b, p, N, {cfg.mesh_h, levels},
                                           cfg.assembly_quad_order);
            });
          }
    } else if (id == "semiclassical_sweep") {
      for (int p : cfg.degrees)
        for (auto b : cfg.realizations)
          for (double h : cfg.h_list) {
            const std::string key = tag(p, b) + " h=" + format_real(h);
            add(id, key, [p, b, h, key, &cfg] {
              CheckRecord r = semiclassical_sweep(cfg.potential, cfg.domain, b, p, {h},
                                                  cfg.mesh_h, cfg.assembly_quad_order)
                                  .front();
              r.check_id = "semiclassical_sweep";
              r.case_name = key;
              return r;
            });
          }
    } else if (id == "hypothesis_check") {
      for (int p : cfg.degrees)
        for (auto b : cfg.realizations)
          for (double N : cfg.N_list) {
            const std::string key = tag(p, b) + " " + ntag(N);
            add(id, key, [p, b, N, key, &cfg] {
              const HypothesisReport h = hypothesis_check(cfg.potential, cfg.domain, b, p, N, cfg.quad_order);
              CheckRecord r = base_record("hypothesis_check", key, cfg, p, b, nullptr, cfg.quad_order, N);
              r.kind = CheckKind::report;
              r.hypothesis_status = h.status;
              r.witness = h.witness();
              r.hypothesis_margin = std::min(h.boundary_margin, h.interior_margin);
              r.lhs = r.hypothesis_margin;
              r.rhs = 0.0;
              r.abs_err = r.rel_err = 0.0;
              r.terms = {{"boundary_margin", h.boundary_margin}, {"interior_margin", h.interior_margin}};
              r.note = "boundary: " + h.boundary_condition + " [" + to_string(h.boundary_status) +
                       "]; interior: " + h.interior_condition + " [" + to_string(h.interior_status) + "]";
              r.pass = h.status != HypothesisStatus::not_applicable;
              r.outcome = r.pass ? Outcome::pass : Outcome::not_applicable;
              return r;
            });
          }
    }
  }
}

bool on_ladder(const std::string& id) {
  return id == "eigen_spectrum" || id == "intertwining" || id == "variance_identity" ||
         id == "hodge_decomposition" || id == "duality";
}

void fill_table(ConvergenceTable& t) {
  t.observed_order = observed_order(t.x, t.err);
  if (!t.observed_order)
    t.note = "order omitted: fewer than 3 levels with a positive finite error";
  else if (t.variable == "quad_order")
    t.note = "slope of log rel_err against log quad_order";
  else
    t.note = "slope of log rel_err against log h";
}

}  // namespace

std::optional<double> observed_order(const std::vector<double>& x, const std::vector<double>& err) {
  std::vector<double> lx, le;
  for (std::size_t i = 0; i < std::min(x.size(), err.size()); ++i)
    if (x[i] > 0 && std::isfinite(x[i]) && err[i] > 0 && std::isfinite(err[i])) {
      lx.push_back(std::log(x[i]));
      le.push_back(std::log(err[i]));
    }
  if (lx.size() < 3) return std::nullopt;
  const double m = static_cast<double>(lx.size());
  double sx = 0, se = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sx += lx[i], se += le[i];
  const double mx = sx / m, me = se / m;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (le[i] - me);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  if (den <= 0) return std::nullopt;
  return num / den;
}

json ConvergenceTable::to_json() const {
  json rows = json::array();
  for (std::size_t i = 0; i < x.size(); ++i) rows.push_back({{variable, json_real(x[i])}, {"rel_err", json_real(err[i])}});
  json j = {{"check_id", check_id}, {"case", case_name}, {"variable", variable}, {"levels", rows}, {"note", note}};
  j["observed_order"] = observed_order ? json(*observed_order) : json(nullptr);
  return j;
}

Report run(const RunConfig& cfg, bool convergence) {
  if (convergence && cfg.refinements < 3)
    throw ValidationError("mesh.refinements", "a convergence study needs at least 3 refinements");
  set_record_timing(cfg.timing);

  Report rep;
  rep.config = cfg.to_json();
  rep.version = {{"program", "whodge"},
                 {"version", kVersion},
                 {"report_schema", kReportSchema},
                 {"simd", kernels::isa_name(kernels::active_isa())}};
  rep.flags = cfg.flags;

  MeshLadderCache meshes(cfg.domain, cfg.mesh_h, cfg.refinements + 1);
  std::vector<Planned> planned;
  plan(cfg, meshes, planned);
  std::vector<Job> jobs;
  for (const auto& p : planned) jobs.push_back(p.job);
  rep.records = run_batch(jobs);

  // Refinement tables, in the order cases first appear.
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (std::size_t i = 0; i < planned.size(); ++i) {
    if (!on_ladder(planned[i].check_id)) continue;
    const auto key = std::make_pair(planned[i].check_id, planned[i].case_key);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rep.tables.size()).first;
      rep.tables.push_back({planned[i].check_id, planned[i].case_key, "h", {}, {}, std::nullopt, ""});
    }
    const CheckRecord& r = rep.records[i];
    if (!std::isfinite(r.rel_err) || r.note.rfind("error:", 0) == 0) continue;
    rep.tables[it->second].x.push_back(r.mesh_h);
    rep.tables[it->second].err.push_back(r.rel_err);
  }

  if (convergence) {
    static const std::vector<int> orders = {2, 4, 6, 8, 10, 12};
    for (const auto& id : cfg.checks) {
      if (!is_identity_check(id)) continue;
      for (const auto& c : analytic_cases(cfg, identity_suite(id), id == "gamma2")) {
        auto f = identity_eval(id, c);
        std::vector<Job> sweep;
        for (int q : orders) sweep.push_back([f, q, id, name = c.name] { return guarded(id, name, [&] { return f(q); }); });
        const auto recs = run_batch(sweep);
        ConvergenceTable t{id, c.name, "quad_order", {}, {}, std::nullopt, ""};
        for (std::size_t i = 0; i < recs.size(); ++i) {
          if (recs[i].outcome == Outcome::not_applicable || !std::isfinite(recs[i].rel_err)) continue;
          t.x.push_back(orders[i]);
          t.err.push_back(recs[i].rel_err);
        }
        rep.tables.push_back(std::move(t));
      }
    }
  }
  for (auto& t : rep.tables) fill_table(t);

  for (const auto& r : rep.records) {
    if (r.outcome == Outcome::pass) ++rep.n_pass;
    else if (r.outcome == Outcome::fail) ++rep.n_fail;
    else ++rep.n_na;
  }
  return rep;
}

json Report::to_json() const {
  json j;
  j["config"] = config;
  j["version"] = version;
  json fl = json::array();
  for (const auto& f : flags) fl.push_back({{"path", f.path}, {"message", f.message}});
  j["config_flags"] = fl;
  json rs = json::array();
  for (const auto& r : records) rs.push_back(r.to_json());
  j["records"] = rs;
  json ts = json::array();
  for (const auto& t : tables) ts.push_back(t.to_json());
  j["convergence"] = ts;
  j["summary"] = {{"pass", n_pass},
                  {"fail", n_fail},
                  {"not_applicable", n_na},
                  {"total", static_cast<int>(records.size())}};
  return j;
}

std::string Report::dump() const { return to_json().dump(2) + "\n"; }

std::string Report::csv() const {
  std::string out = csv_header() + "\n";
  for (const auto& r : records) out += csv_row(r) + "\n";
  return out;
}

std::string list_presets() {
  std::ostringstream os;
  os << "domains\n";
  for (const auto& name : domain_preset_names()) os << "  " << name << "  " << domain_preset(name).describe() << "\n";
  os << "  {\"kind\": interval|rectangle|disk|annulus|polygon|circle|flat_torus, \"parameters\": [...], "
        "\"fillet\": r}\n";
  os << "potentials\n";
  for (const auto& name : Potential::preset_names()) os << "  " << name << "\n";
  os << "check_ids\n";
  for (const auto& id : check_ids()) os << "  " << id << "\n";
  os << "test forms\n";
  for (const auto& name : catalog_names()) {
    const AnalyticForm w = catalog_form(name);
    os << "  " << name << "  n=" << w.n << " p=" << w.p << " declared=" << to_string(w.declared) << "\n";
  }
  os << "realizations\n  normal\n  tangential\n  none (boundaryless domains)\n";
  return os.str();
}

}  // namespace whodge::cli
