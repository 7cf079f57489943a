#pragma once

// Pass/fail checks of the weighted Bochner-type identities and the
// Brascamp-Lieb family of inequalities on analytic and discrete inputs.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "whodge/calculus.hpp"
#include "whodge/curvature.hpp"
#include "whodge/spectral.hpp"

namespace whodge {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Default tolerances.
inline constexpr double kIdentityTol = 1e-8;        // relative, at quad_order 8
inline constexpr double kInequalityAbsTol = 1e-9;
inline constexpr double kInequalityRelTol = 1e-6;
inline constexpr double kVarianceTol = 1e-7;        // solver-limited discrete identity
inline constexpr double kGapCMax = 10.0;            // bound on C in λ1 >= bound - C h max(1, bound)

enum class CheckKind { identity, inequality, report };
enum class Outcome { pass, fail, not_applicable };
enum class HypothesisStatus { satisfied, violated, not_applicable };

const char* to_string(CheckKind k);
const char* to_string(Outcome o);
const char* to_string(HypothesisStatus s);

struct CheckInputs {
  std::string domain;
  std::string potential;
  int p = 0;
  Realization b = Realization::none;
  double N = kInf;
  double h_param = 1.0;
};

struct CheckRecord {
  std::string check_id;
  std::string case_name;
  CheckInputs inputs;
  CheckKind kind = CheckKind::identity;
  double lhs = 0.0;
  double rhs = 0.0;  // rhs_bound for inequalities
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  Outcome outcome = Outcome::fail;
  HypothesisStatus hypothesis_status = HypothesisStatus::not_applicable;
  std::optional<Point> witness;
  double hypothesis_margin = 0.0;
  int quad_order = 0;
  double mesh_h = 0.0;
  double runtime_ms = 0.0;
  // Named contributions in a fixed order (rhs terms, projection terms, ...).
  std::vector<std::pair<std::string, double>> terms;
  std::string note;

  double term(const std::string& name) const;  // throws Error if absent
  nlohmann::json to_json() const;
};

// Sets abs/rel errors, pass and outcome. Identities: rel_err <= tol, the
// relative error taken against max(|lhs|, |rhs|, scale_floor).
void finalize_identity(CheckRecord& r, double tol = kIdentityTol, double scale_floor = 0.0);
// Inequalities lhs <= rhs: evaluated only when the hypotheses are satisfied,
// otherwise not_applicable.
void finalize_inequality(CheckRecord& r, double abs_tol = kInequalityAbsTol, double rel_tol = kInequalityRelTol);
// Scales the rhs term `term` by (1 + rel) and re-finalizes the identity.
CheckRecord perturb_rhs_term(const CheckRecord& r, const std::string& term, double rel);

// runtime_ms is 0 unless timing is switched on (reports stay byte-stable).
void set_record_timing(bool on);
bool record_timing();

// JSON real that survives infinities and NaN ("inf", "-inf", "nan").
nlohmann::json json_real(double v);

std::string csv_header();
std::string csv_row(const CheckRecord& r);

// ---------------------------------------------------------------------------
// Hypotheses

struct HypothesisReport {
  HypothesisStatus status = HypothesisStatus::satisfied;
  HypothesisStatus boundary_status = HypothesisStatus::satisfied;
  HypothesisStatus interior_status = HypothesisStatus::satisfied;
  double boundary_margin = kInf;  // min eigenvalue of the boundary form on the tested subspace
  double interior_margin = kInf;  // min eigenvalue of Ric_V^(p) (or Ric_{V,N})
  std::optional<Point> boundary_witness, interior_witness;
  std::string boundary_condition, interior_condition;

  std::optional<Point> witness() const;
  nlohmann::json to_json() const;
};

// Boundary: K_n^(p) >= 0 on tangential forms (b = normal) or
// K_t^(p) - ∂_n V >= 0 on normal forms (b = tangential). Interior:
// Ric_V^(p) > 0, with the 1-form tensor replaced by Ric_{V,N} for finite N.
// Inadmissible N yields not_applicable.
HypothesisReport hypothesis_check(const Potential& V, const DomainSpec& spec, Realization b, int p,
                                  double N = kInf, int quad_order = 8);

// ---------------------------------------------------------------------------
// Identities on analytic forms

CheckInputs make_inputs(const DomainSpec& spec, const Potential& V, int p, Realization b, double N = kInf);

// D_f^(p)(w) against the Ḣ^1 + curvature + boundary decomposition, f = V/2.
CheckRecord eval_decomposition_identity(const AnalyticForm& w, const Potential& V, const DomainSpec& spec,
                                        Realization b, int quad_order = 8);
// Same identity with f = 0.
CheckRecord eval_bochner_identity(const AnalyticForm& w, const DomainSpec& spec, Realization b, int quad_order = 8);

// Sign of the boundary term ∮|w|^2 ∂_n f. `self_consistent` uses +1 for
// normal and -1 for tangential forms; `swapped` exchanges them.
enum class GreenSign { self_consistent, swapped };
CheckRecord eval_green_identity(const AnalyticForm& w, const Potential& V, const DomainSpec& spec, Realization b,
                                int quad_order = 8, GreenSign sign = GreenSign::self_consistent);

// Γ and Γ2 chains for a 0-form supported away from ∂Ω.
CheckRecord check_gamma2(const AnalyticForm& w, const Potential& V, const DomainSpec& spec, int quad_order = 8);

// ---------------------------------------------------------------------------
// Inequalities

CheckRecord check_bl_scalar(const AnalyticForm& w, const Potential& V, const DomainSpec& spec, Realization b,
                            double N = kInf, int quad_order = 8);

enum class FormVariant { closed, coclosed };
const char* to_string(FormVariant v);

// mesh_h sets the companion mesh used for the discrete kernel projector.
CheckRecord check_bl_forms(const AnalyticForm& w, const Potential& V, const DomainSpec& spec, Realization b,
                           FormVariant variant, int quad_order = 8, double mesh_h = 0.1);

// ‖η - πη‖_M^2 against <(L^(1)|Ran d)^{-1} dη, dη>_M.
CheckRecord check_variance_identity(const Cochain& eta, const AssembledOperator& op0, const AssembledOperator& op1,
                                    double tol = kVarianceTol, const KernelProjector* proj0 = nullptr,
                                    const KernelProjector* proj1 = nullptr);

struct MeshLadder {
  double h0 = 0.2;
  int levels = 3;  // number of meshes, h0 / 2^k
};

// First nonkernel eigenvalue of L^(p) against the curvature bound, over a
// refinement ladder. N is used for p = 0 only (N / (N - 1) λ_min(Ric_{V,N})).
CheckRecord check_gap_lower_bound(const Potential& V, const DomainSpec& spec, Realization b, int p,
                                  double N = kInf, MeshLadder ladder = {}, int quad_order = 4);

// One gap record per h with V replaced by V / h on a fixed mesh.
std::vector<CheckRecord> semiclassical_sweep(const Potential& V, const DomainSpec& spec, Realization b, int p,
                                             const std::vector<double>& h_list, double mesh_h = 0.1,
                                             int quad_order = 4);

// ---------------------------------------------------------------------------
// Named test forms and the standard suites

AnalyticForm catalog_form(const std::string& name);
std::vector<std::string> catalog_names();

// Smooth compactly supported bump exp(-1 / (1 - |x - c|^2 / r^2)).
ScalarFn bump_function(Point center, double radius);

struct IdentityCase {
  std::string name;
  AnalyticForm w;
  Potential V;
  DomainSpec spec;
  Realization b = Realization::none;
};
std::vector<IdentityCase> decomposition_cases();
std::vector<IdentityCase> green_cases();
std::vector<IdentityCase> bochner_cases();
std::vector<IdentityCase> gamma_cases();

struct InequalityCase {
  std::string name;
  AnalyticForm w;
  Potential V;
  DomainSpec spec;
  Realization b = Realization::normal;
  double N = kInf;
  bool scalar = true;  // check_bl_scalar, else check_bl_forms
  FormVariant variant = FormVariant::coclosed;
  bool expect_hypothesis = true;
};
std::vector<InequalityCase> bl_suite();
CheckRecord run_inequality_case(const InequalityCase& c, int quad_order = 8, double mesh_h = 0.1);

// Runs independent checks on thread_count() workers; results keep input order.
std::vector<CheckRecord> run_batch(const std::vector<std::function<CheckRecord()>>& jobs);
// Wraps a check so that a thrown error becomes a failed record.
CheckRecord guarded(const std::string& check_id, const std::string& case_name, const std::function<CheckRecord()>& f);

}  // namespace whodge
