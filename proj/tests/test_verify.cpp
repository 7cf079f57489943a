#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "whodge/error.hpp"
#include "whodge/verify.hpp"

using namespace whodge;

namespace {

bool is_pass(const CheckRecord& r) { return r.outcome == Outcome::pass; }

std::shared_ptr<const SimplicialComplex> mesh(const DomainSpec& s, double h) {
  return std::make_shared<const SimplicialComplex>(generate_mesh(s, h));
}

}  // namespace

TEST_CASE("decomposition identity suite") {
  for (const auto& c : decomposition_cases()) {
    CAPTURE(c.name);
    const CheckRecord r = eval_decomposition_identity(c.w, c.V, c.spec, c.b, 8);
    CAPTURE(r.lhs);
    CAPTURE(r.rhs);
    CHECK(r.rel_err <= 1e-8);
    CHECK(is_pass(r));
  }
  // rhs boundary terms are live on the curved 1-form cases
  const auto cases = decomposition_cases();
  const CheckRecord rt = eval_decomposition_identity(cases[1].w, cases[1].V, cases[1].spec, cases[1].b, 8);
  const CheckRecord rn = eval_decomposition_identity(cases[2].w, cases[2].V, cases[2].spec, cases[2].b, 8);
  CHECK(std::abs(rt.term("boundary_K")) > 1e-3);
  CHECK(std::abs(rn.term("boundary_K")) > 1e-3);
  const CheckRecord z = eval_decomposition_identity(cases.back().w, cases.back().V, cases.back().spec, cases.back().b, 8);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(is_pass(z));
}

TEST_CASE("decomposition identity rejects a mismatched declaration") {
  const auto c = decomposition_cases()[0];
  CHECK_THROWS_AS(eval_decomposition_identity(c.w, c.V, c.spec, Realization::normal, 8), ValidationError);
  AnalyticForm w = catalog_form("radial_1form");
  w.declared = Realization::none;
  CHECK_THROWS_AS(eval_decomposition_identity(w, c.V, c.spec, Realization::normal, 8), ValidationError);
}

TEST_CASE("perturbing one rhs term flips the identity") {
  for (const auto& c : decomposition_cases()) {
    const CheckRecord r = eval_decomposition_identity(c.w, c.V, c.spec, c.b, 8);
    for (const auto& [name, v] : r.terms) {
      if (name == "lhs_refined" || v == 0.0 || std::abs(v) < 1e-3 * std::abs(r.rhs)) continue;
      CAPTURE(c.name);
      CAPTURE(name);
      const CheckRecord bad = perturb_rhs_term(r, name, 0.01);
      CHECK(bad.outcome == Outcome::fail);
      CHECK(bad.rel_err > 1e-6);
    }
  }
}

TEST_CASE("Bochner identity with f = 0") {
  for (const auto& c : bochner_cases()) {
    CAPTURE(c.name);
    const CheckRecord r = eval_bochner_identity(c.w, c.spec, c.b, 8);
    CAPTURE(r.lhs);
    CAPTURE(r.rhs);
    CHECK(r.rel_err <= 1e-8);
  }
  // equals the decomposition identity at V = 0
  const auto c = decomposition_cases()[0];
  const CheckRecord a = eval_bochner_identity(c.w, c.spec, c.b, 8);
  const CheckRecord b = eval_decomposition_identity(c.w, Potential::zero(), c.spec, c.b, 8);
  CHECK(a.lhs == b.lhs);
  CHECK(a.rhs == b.rhs);
}

TEST_CASE("Green identities") {
  int applicable = 0;
  for (const auto& c : green_cases()) {
    CAPTURE(c.name);
    const CheckRecord r = eval_green_identity(c.w, c.V, c.spec, c.b, 8);
    if (c.w.p == 0 && c.b == Realization::normal) {
      CHECK(r.outcome == Outcome::not_applicable);
      continue;
    }
    ++applicable;
    CAPTURE(r.lhs);
    CAPTURE(r.rhs);
    CHECK(r.rel_err <= 1e-9);
    if (c.V.is_constant()) CHECK(r.lhs == doctest::Approx(r.term("dirichlet")).epsilon(1e-12));
  }
  CHECK(applicable >= 4);
}

TEST_CASE("Green identity boundary sign") {
  // The boundary term enters with + for normal and - for tangential forms;
  // the opposite assignment fails wherever the term is nonzero.
  for (const auto& c : green_cases()) {
    if (c.w.p == 0) continue;
    const CheckRecord ok = eval_green_identity(c.w, c.V, c.spec, c.b, 8);
    if (std::abs(ok.term("boundary_dnf")) < 1e-3) continue;
    CAPTURE(c.name);
    const CheckRecord swapped = eval_green_identity(c.w, c.V, c.spec, c.b, 8, GreenSign::swapped);
    CHECK(is_pass(ok));
    CHECK(swapped.outcome == Outcome::fail);
  }
}

TEST_CASE("Gamma and Gamma2 chains") {
  for (const auto& c : gamma_cases()) {
    CAPTURE(c.name);
    const CheckRecord r = check_gamma2(c.w, c.V, c.spec, 8);
    CAPTURE(r.term("gamma_chain_rel_err"));
    CAPTURE(r.term("gamma2_chain_rel_err"));
    CHECK(r.rel_err <= 1e-8);
    CHECK(r.lhs > 0);
  }
  const CheckRecord z = check_gamma2(scalar_form(1, [](const Jet& x, const Jet&) { return Jet::constant(0.0, x.order()); }),
                                     Potential::zero(), DomainSpec::interval(0, 1), 8);
  CHECK(z.lhs == 0.0);
  CHECK(is_pass(z));
  CHECK_THROWS_AS(check_gamma2(catalog_form("x1_1d"), Potential::zero(), DomainSpec::interval(0, 1), 8),
                  ValidationError);
}

TEST_CASE("identity errors shrink with quadrature order") {
  std::vector<std::function<CheckRecord(int)>> checks;
  for (const auto& c : decomposition_cases())
    checks.push_back([c](int q) { return eval_decomposition_identity(c.w, c.V, c.spec, c.b, q); });
  for (const auto& c : gamma_cases()) checks.push_back([c](int q) { return check_gamma2(c.w, c.V, c.spec, q); });
  for (const auto& c : green_cases())
    if (c.w.p > 0) checks.push_back([c](int q) { return eval_green_identity(c.w, c.V, c.spec, c.b, q); });
  for (const auto& f : checks) {
    double prev = INFINITY;
    for (int q : {4, 8, 12}) {
      const double e = f(q).rel_err;
      CAPTURE(q);
      CHECK(e <= std::max(2.0 * prev, 1e-13));
      prev = e;
    }
  }
}

TEST_CASE("hypothesis checks") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  const auto a = hypothesis_check(Potential::quadratic(2.0), disk, Realization::normal, 1);
  CHECK(a.status == HypothesisStatus::satisfied);
  CHECK(a.boundary_margin == doctest::Approx(1.0));
  CHECK(a.interior_margin == doctest::Approx(2.0));

  const auto dw = hypothesis_check(Potential::quartic_double_well(1.0), disk, Realization::normal, 1);
  CHECK(dw.status == HypothesisStatus::violated);
  CHECK(dw.interior_status == HypothesisStatus::violated);
  REQUIRE(dw.interior_witness.has_value());
  CHECK(std::hypot((*dw.interior_witness)[0], (*dw.interior_witness)[1]) < 0.2);

  const auto t0 = hypothesis_check(Potential::zero(), disk, Realization::tangential, 1);
  CHECK(t0.boundary_status == HypothesisStatus::satisfied);
  CHECK(t0.boundary_margin == doctest::Approx(1.0));
  CHECK(t0.interior_status == HypothesisStatus::violated);

  const auto notch = hypothesis_check(Potential::quadratic(1.0), domain_preset("lshape_notch"), Realization::normal, 1);
  CHECK(notch.boundary_status == HypothesisStatus::violated);
  REQUIRE(notch.boundary_witness.has_value());
  // witness on the concave arc of radius 0.25 around (0.25, 0.25)
  CHECK(std::hypot((*notch.boundary_witness)[0] - 0.25, (*notch.boundary_witness)[1] - 0.25) ==
        doctest::Approx(0.25).epsilon(1e-6));

  const auto tq = hypothesis_check(Potential::quadratic(2.0), disk, Realization::tangential, 1);
  CHECK(tq.boundary_status == HypothesisStatus::violated);
  CHECK(tq.boundary_margin == doctest::Approx(-1.0));

  const auto bad_n = hypothesis_check(Potential::quadratic(1.0), disk, Realization::normal, 1, 1.0);
  CHECK(bad_n.status == HypothesisStatus::not_applicable);
  CHECK(hypothesis_check(Potential::quadratic(1.0), disk, Realization::normal, 0).status == HypothesisStatus::violated);
}

TEST_CASE("Brascamp-Lieb suite") {
  int satisfied = 0;
  for (const auto& c : bl_suite()) {
    CAPTURE(c.name);
    const CheckRecord r = run_inequality_case(c, 8, 0.1);
    CAPTURE(r.lhs);
    CAPTURE(r.rhs);
    CAPTURE(r.note);
    if (c.expect_hypothesis) {
      ++satisfied;
      CHECK(r.hypothesis_status == HypothesisStatus::satisfied);
      CHECK(is_pass(r));
    } else {
      CHECK(r.hypothesis_status == HypothesisStatus::violated);
      CHECK(r.outcome == Outcome::not_applicable);
      CHECK(!r.pass);
    }
  }
  CHECK(satisfied >= 12);
}

TEST_CASE("scalar Brascamp-Lieb examples") {
  const AnalyticForm x1 = catalog_form("x1_2d");
  AnalyticForm one = catalog_form("const_2d");
  const CheckRecord c = check_bl_scalar(one, Potential::quadratic(2.0), DomainSpec::disk(1.0), Realization::normal);
  CHECK(std::abs(c.lhs) <= 1e-14);
  CHECK(c.rhs == 0.0);
  CHECK(is_pass(c));
  CHECK_THROWS_AS(check_bl_scalar(x1, Potential::quadratic(1.0), DomainSpec::disk(1.0), Realization::normal, 1.5),
                  DomainError);
  // Gaussian limit: both sides tend to 1/alpha and the ratio decreases to 1
  const double alpha = 2.0;
  double prev_ratio = INFINITY;
  for (double R : {1.0, 2.0, 4.0}) {
    const CheckRecord r = check_bl_scalar(x1, Potential::quadratic(alpha), DomainSpec::disk(R), Realization::normal);
    CHECK(is_pass(r));
    const double ratio = r.rhs / r.lhs;
    CHECK(ratio >= 1.0 - 1e-12);
    CHECK(ratio <= prev_ratio);
    prev_ratio = ratio;
    if (R == 4.0) {
      CHECK(r.lhs == doctest::Approx(1 / alpha).epsilon(1e-6));
      CHECK(r.rhs == doctest::Approx(1 / alpha).epsilon(1e-12));
    }
  }
}

TEST_CASE("scalar and form routes agree at q = 0") {
  const AnalyticForm x1 = catalog_form("x1_2d");
  const DomainSpec disk = DomainSpec::disk(1.0);
  const Potential V = Potential::quadratic(2.0);
  const CheckRecord a = check_bl_scalar(x1, V, disk, Realization::normal);
  const CheckRecord b = check_bl_forms(x1, V, disk, Realization::normal, FormVariant::coclosed);
  CHECK(std::abs(a.lhs - b.lhs) <= 1e-6 * std::abs(a.lhs));
  CHECK(std::abs(a.rhs - b.rhs) <= 1e-6 * std::abs(a.rhs));
}

TEST_CASE("form Brascamp-Lieb constraints") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  const Potential V = Potential::quadratic(2.0);
  // the rotation field is not closed
  CHECK_THROWS_AS(check_bl_forms(catalog_form("rotation_1form"), V, disk, Realization::normal, FormVariant::closed),
                  ValidationError);
  // degree out of range for the variant
  CHECK_THROWS_AS(check_bl_forms(catalog_form("x1_2d"), V, disk, Realization::normal, FormVariant::closed),
                  ValidationError);
  // tangential top form: the kernel is one dimensional and is projected out
  const CheckRecord r = check_bl_forms(catalog_form("shifted_top_form"), Potential::quadratic(0.5), disk,
                                       Realization::tangential, FormVariant::closed);
  CHECK(r.term("kernel_dim") == 1);
  CHECK(r.term("projection_term") > 0);
  CHECK(std::abs(r.term("interpolant_norm_sq") - r.term("norm_sq")) < 1e-2 * r.term("norm_sq"));
}

TEST_CASE("variance identity") {
  const auto I = mesh(DomainSpec::interval(0, 1), 1.0 / 256);
  const auto op0 = assemble_weighted_laplacian(I, 0, Potential::zero(), Realization::normal);
  const auto op1 = assemble_weighted_laplacian(I, 1, Potential::zero(), Realization::normal);
  const Cochain x = interpolate(*I, catalog_form("x1_1d"), Realization::normal);
  const CheckRecord r = check_variance_identity(x, op0, op1);
  CHECK(is_pass(r));
  CHECK(r.lhs == doctest::Approx(1.0 / 12).epsilon(1e-4));
  CHECK(r.rhs == doctest::Approx(1.0 / 12).epsilon(1e-4));
  const CheckRecord c = check_variance_identity(Cochain{0, Realization::normal, Eigen::VectorXd::Ones(op0.size())}, op0, op1);
  CHECK(std::abs(c.lhs) <= 1e-20);
  CHECK(std::abs(c.rhs) <= 1e-20);
  CHECK(is_pass(c));

  const auto d = mesh(DomainSpec::disk(1.0), 0.15);
  const Potential V = Potential::quadratic(2.0);
  const auto d0 = assemble_weighted_laplacian(d, 0, V, Realization::normal);
  const auto d1 = assemble_weighted_laplacian(d, 1, V, Realization::normal);
  const KernelProjector P0 = kernel_projector(d0), P1 = kernel_projector(d1);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  double worst = 0;
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd v(d0.size());
    for (int i = 0; i < v.size(); ++i) v[i] = g(rng);
    worst = std::max(worst, check_variance_identity(Cochain{0, Realization::normal, v}, d0, d1, kVarianceTol, &P0, &P1).rel_err);
  }
  CHECK(worst <= 1e-7);
}

TEST_CASE("gap lower bound") {
  const CheckRecord r = check_gap_lower_bound(Potential::quadratic(2.0), DomainSpec::disk(1.0), Realization::normal, 0,
                                              kInf, {0.2, 3});
  CAPTURE(r.rhs);
  CAPTURE(r.term("C"));
  CHECK(r.lhs == doctest::Approx(2.0));
  CHECK(is_pass(r));
  const CheckRecord z = check_gap_lower_bound(Potential::zero(), DomainSpec::disk(1.0), Realization::normal, 0, kInf,
                                              {0.2, 1});
  CHECK(z.lhs == 0.0);
  CHECK(is_pass(z));
  // interval: λ1 decreases to α from above as the interval grows
  double prev = INFINITY;
  for (double L : {1.0, 2.0, 4.0}) {
    const CheckRecord s = check_gap_lower_bound(Potential::quadratic(1.0), DomainSpec::interval(-L, L),
                                                Realization::normal, 0, kInf, {L / 256, 1});
    CHECK(is_pass(s));
    CHECK(s.rhs >= 1.0 - 1e-6);
    CHECK(s.rhs <= prev);
    prev = s.rhs;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-3));
  // N-refined bound on the interval: N / (N - 1) λ_min(Ric_{V,N})
  const CheckRecord n4 = check_gap_lower_bound(Potential::quadratic(1.0), DomainSpec::interval(-1, 1),
                                               Realization::normal, 0, 4.0, {1.0 / 128, 1});
  CHECK(n4.lhs == doctest::Approx(4.0 / 3.0 * (1.0 - 1.0 / 3.0)).epsilon(1e-6));
  CHECK(is_pass(n4));
  const CheckRecord dw = check_gap_lower_bound(Potential::quartic_double_well(1.0), DomainSpec::disk(1.0),
                                               Realization::normal, 0, kInf, {0.2, 1});
  CHECK(dw.outcome == Outcome::not_applicable);
}

TEST_CASE("semiclassical sweep") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  const auto rs = semiclassical_sweep(Potential::quadratic(2.0), disk, Realization::normal, 0, {1.0, 0.5, 0.25}, 0.1);
  REQUIRE(rs.size() == 3);
  for (const auto& r : rs) {
    CHECK(is_pass(r));
    CHECK(r.term("h_lambda1") >= 2.0 - 0.1);
    CHECK(r.term("h_bound") == doctest::Approx(2.0));
  }
  // ∂_n V > 0 breaks the tangential condition for every h
  for (const auto& r : semiclassical_sweep(Potential::quadratic(2.0), disk, Realization::tangential, 0, {1.0, 0.1}, 0.2))
    CHECK(r.outcome == Outcome::not_applicable);
  const auto z = semiclassical_sweep(Potential::zero(), disk, Realization::normal, 0, {10.0}, 0.2);
  const auto direct = check_gap_lower_bound(Potential::zero(), disk, Realization::normal, 0, kInf, {0.2, 1});
  CHECK(z[0].rhs == direct.rhs);
  CHECK_THROWS_AS(semiclassical_sweep(Potential::zero(), disk, Realization::normal, 0, {0.5, 1.0}), ValidationError);
}

TEST_CASE("records serialize deterministically") {
  const auto c = decomposition_cases()[0];
  const CheckRecord r = eval_decomposition_identity(c.w, c.V, c.spec, c.b, 8);
  const auto j = r.to_json();
  for (const char* k : {"check_id", "inputs", "lhs", "rhs", "abs_err", "rel_err", "tolerance", "pass",
                        "hypothesis_status", "quad_order", "mesh_h", "runtime_ms"})
    CHECK(j.contains(k));
  CHECK(j["runtime_ms"] == 0.0);
  CHECK(j.dump() == eval_decomposition_identity(c.w, c.V, c.spec, c.b, 8).to_json().dump());
  CHECK(csv_header() == "check_id,p,b,N,h,quad_order,lhs,rhs,rel_err,hypothesis_status,pass,runtime_ms");
  CHECK(csv_row(r).rfind("decomposition_identity,1,tangential,inf,", 0) == 0);
  CheckRecord ineq;
  ineq.rhs = kInf;
  ineq.hypothesis_status = HypothesisStatus::satisfied;
  finalize_inequality(ineq);
  CHECK(ineq.to_json()["rhs_bound"] == "inf");
  CHECK(is_pass(ineq));
}

TEST_CASE("batches keep input order and capture errors") {
  std::vector<std::function<CheckRecord()>> jobs;
  for (int i = 0; i < 8; ++i)
    jobs.push_back([i] {
      return guarded("job", std::to_string(i), [i]() -> CheckRecord {
        if (i == 3) throw Error("boom");
        CheckRecord r;
        r.check_id = "job";
        r.lhs = i;
        return r;
      });
    });
  const auto out = run_batch(jobs);
  for (int i = 0; i < 8; ++i) {
    CHECK(out[i].case_name == std::to_string(i));
    if (i == 3) {
      CHECK(out[i].outcome == Outcome::fail);
      CHECK(out[i].note.find("boom") != std::string::npos);
    } else {
      CHECK(out[i].lhs == i);
    }
  }
}

TEST_CASE("Hessian consistency of the preset potentials") {
  for (const Potential& V : {Potential::quadratic(2.0), Potential::quartic_double_well(1.0), Potential::linear(-1.5)}) {
    const auto rep = check_consistency(V, 2, 20, 3);
    CHECK(rep.hess_err <= 1e-6);
    CHECK(rep.lap_err <= 1e-12);
  }
}
