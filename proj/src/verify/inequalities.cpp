#include <cmath>

#include "detail.hpp"
#include "whodge/util.hpp"

namespace whodge {

using namespace detail;

namespace {

constexpr double kBoundaryTol = 1e-12;
constexpr double kPositivityTol = 1e-10;

EndomorphismField interior_tensor(const Potential& V, int n, int p, double N) {
  return lift_endomorphism(bakry_emery_tensor(V, n, N), p);
}

std::string boundary_condition_text(Realization b, int p) {
  const std::string ps = std::to_string(p);
  if (b == Realization::normal) return "K_n^(" + ps + ") >= 0 on tangential forms";
  if (b == Realization::tangential) return "K_t^(" + ps + ") - d_n V >= 0 on normal forms";
  return "none";
}

void set_hypothesis(CheckRecord& r, const HypothesisReport& h) {
  r.hypothesis_status = h.status;
  r.witness = h.witness();
  r.hypothesis_margin = std::min(h.boundary_margin, h.interior_margin);
}

// ∫ <A^{-1} g, g> e^{-V} / Z for a pointwise positive A.
template <class GradFn>
double inverse_energy(const EndomorphismField& A, const std::vector<QuadPoint>& rule, const Potential& V,
                      GradFn&& grad) {
  double s = 0.0;
  for (const QuadPoint& q : rule) {
    const Eigen::VectorXd g = grad(q.x);
    if (g.squaredNorm() == 0.0) continue;
    const Eigen::MatrixXd M = A(interior_sample(q.x));
    s += q.w * V.weight(q.x) * g.dot(M.ldlt().solve(g));
  }
  return s;
}

std::vector<double> first_nonkernel(const AssembledOperator& op, double& lambda, int& kernel_dim) {
  int k = 4;
  for (;;) {
    const SpectralResult r = lowest_eigenpairs(op, std::min(k, op.size()));
    if (r.kernel_dim < static_cast<int>(r.eigenvalues.size()) || k >= op.size()) {
      kernel_dim = r.kernel_dim;
      lambda = r.kernel_dim < static_cast<int>(r.eigenvalues.size()) ? r.eigenvalues[r.kernel_dim] : std::nan("");
      return r.eigenvalues;
    }
    k *= 2;
  }
}

}  // namespace

HypothesisReport hypothesis_check(const Potential& V, const DomainSpec& spec, Realization b, int p, double N,
                                  int quad_order) {
  HypothesisReport rep;
  const int n = spec.ambient_dim;
  if (p < 0 || p > n) throw ValidationError("p", "degree out of range");
  rep.boundary_condition = boundary_condition_text(b, p);
  rep.interior_condition = std::isinf(N) ? "Ric_V^(" + std::to_string(p) + ") > 0"
                                         : "Ric_{V," + format_real(N) + "}^(" + std::to_string(p) + ") > 0";
  try {
    check_admissible_N(N, n, V);
  } catch (const DomainError& e) {
    rep.status = rep.boundary_status = rep.interior_status = HypothesisStatus::not_applicable;
    rep.interior_condition += std::string(" (") + e.what() + ")";
    return rep;
  }

  if (spec.has_boundary() && b != Realization::none) {
    const EndomorphismField K = boundary_operator(b, n, p);
    for (const BoundaryPoint& bp : analytic_boundary_rule(spec, quad_order).points) {
      const SamplePoint s = boundary_sample(bp);
      const Eigen::MatrixXd Q = hypothesis_subspace(b, n, p, s);
      if (Q.cols() == 0) continue;
      Eigen::MatrixXd A = K(s);
      if (b == Realization::tangential)
        A -= V.gradient(bp.x, n).dot(normal_of(bp, n)) * Eigen::MatrixXd::Identity(A.rows(), A.cols());
      const Eigen::MatrixXd R = Q.transpose() * A * Q;
      const double m = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(R, Eigen::EigenvaluesOnly).eigenvalues()[0];
      if (m < rep.boundary_margin) {
        rep.boundary_margin = m;
        rep.boundary_witness = bp.x;
      }
    }
    if (rep.boundary_margin < -kBoundaryTol) rep.boundary_status = HypothesisStatus::violated;
  }

  if (p == 0) {
    // Hess^(0) V = 0: there is no positive curvature on functions.
    rep.interior_margin = 0.0;
    rep.interior_status = HypothesisStatus::violated;
  } else {
    // closure of Ω: interior quadrature points plus the boundary rule
    std::vector<SamplePoint> pts = interior_samples(domain_rule(spec, quad_order));
    if (spec.has_boundary())
      for (const BoundaryPoint& bp : analytic_boundary_rule(spec, quad_order).points) pts.push_back(interior_sample(bp.x));
    const MinEig m = min_eigenvalue(interior_tensor(V, n, p, N), pts);
    rep.interior_margin = m.value;
    rep.interior_witness = m.where.x;
    if (!(m.value > kPositivityTol)) rep.interior_status = HypothesisStatus::violated;
  }
  rep.status = rep.boundary_status == HypothesisStatus::satisfied && rep.interior_status == HypothesisStatus::satisfied
                   ? HypothesisStatus::satisfied
                   : HypothesisStatus::violated;
  return rep;
}

CheckRecord check_bl_scalar(const AnalyticForm& w, const Potential& V, const DomainSpec& spec, Realization b,
                            double N, int quad_order) {
  const Stopwatch sw;
  require_dims(w, spec);
  if (w.p != 0) throw ValidationError("form", "scalar Brascamp-Lieb check takes a 0-form");
  const int n = w.n;
  check_admissible_N(N, n, V);
  require_bc(w, spec, b, quad_order);

  CheckRecord r;
  r.check_id = "bl_scalar";
  r.case_name = w.name;
  r.inputs = make_inputs(spec, V, 0, b, N);
  r.quad_order = quad_order;
  const HypothesisReport hyp = hypothesis_check(V, spec, b, 1, N, quad_order);
  set_hypothesis(r, hyp);

  const auto rule = domain_rule(spec, quad_order);
  double Z = 0, m1 = 0;
  for (const QuadPoint& q : rule) {
    const double e = q.w * V.weight(q.x);
    Z += e;
    m1 += e * w.value(q.x)[0];
  }
  const double mean = b == Realization::normal ? m1 / Z : 0.0;
  double var = 0;
  for (const QuadPoint& q : rule) var += q.w * V.weight(q.x) * std::pow(w.value(q.x)[0] - mean, 2);
  r.lhs = var / Z;
  const double factor = bl_factor(N);
  r.terms = {{"Z", Z}, {"mean", mean}, {"factor", factor}};
  if (hyp.status == HypothesisStatus::satisfied) {
    const double e = inverse_energy(bakry_emery_tensor(V, n, N), rule, V, [&](const Point& x) {
                       return Eigen::VectorXd(w.jacobian(x).row(0).transpose());
                     }) / Z;
    r.terms.emplace_back("inverse_energy", e);
    r.rhs = e == 0.0 ? 0.0 : factor * e;
  } else {
    r.rhs = std::nan("");
    r.note = "hypothesis violated";
  }
  finalize_inequality(r);
  r.runtime_ms = sw.ms();
  return r;
}

CheckRecord check_bl_forms(const AnalyticForm& w, const Potential& V, const DomainSpec& spec, Realization b,
                           FormVariant variant, int quad_order, double mesh_h) {
  const Stopwatch sw;
  require_dims(w, spec);
  const int n = w.n, q = w.p;
  const int p = variant == FormVariant::coclosed ? q + 1 : q - 1;
  if (p < 0 || p > n)
    throw ValidationError("variant", std::string(to_string(variant)) + " variant needs a bound degree in [0, n]");
  require_bc(w, spec, b, quad_order);

  const auto rule = domain_rule(spec, quad_order);
  auto l2 = [&](const AnalyticForm& f) {
    double s = 0;
    for (const QuadPoint& x : rule) s += x.w * V.weight(x.x) * f.value(x.x).squaredNorm();
    return s;
  };
  double Z = 0;
  for (const QuadPoint& x : rule) Z += x.w * V.weight(x.x);
  const double norm_sq = l2(w);

  // closedness / coclosedness by quadrature
  const bool has_constraint = variant == FormVariant::coclosed ? q > 0 : q < n;
  if (has_constraint) {
    const AnalyticForm c = variant == FormVariant::coclosed ? codifferential(w, V) : exterior_derivative(w);
    const double cn = std::sqrt(l2(c));
    if (cn > 1e-8 * std::max(1.0, std::sqrt(norm_sq)))
      throw ValidationError("form.constraint", "form '" + w.name + "' is not " + to_string(variant) +
                                                   " (residual " + format_real(cn) + ")");
  }

  CheckRecord r;
  r.check_id = "bl_forms";
  r.case_name = w.name + " [" + to_string(variant) + "]";
  r.inputs = make_inputs(spec, V, q, b);
  r.quad_order = quad_order;
  const HypothesisReport hyp = hypothesis_check(V, spec, b, p, kInf, quad_order);
  set_hypothesis(r, hyp);

  // π_b: the mean for normal functions, otherwise the discrete kernel
  // projector applied to the interpolant.
  double proj = 0.0, interp_sq = norm_sq / Z;
  int kdim = 0;
  if (q == 0 && b == Realization::normal) {
    double m1 = 0;
    for (const QuadPoint& x : rule) m1 += x.w * V.weight(x.x) * w.value(x.x)[0];
    proj = std::pow(m1 / Z, 2);
    kdim = 1;
  } else {
    const auto mesh = std::make_shared<const SimplicialComplex>(generate_mesh(spec, mesh_h));
    const AssembledOperator op = assemble_weighted_laplacian(mesh, q, V, b, 6);
    const KernelProjector P = kernel_projector(op);
    kdim = P.dim();
    const Cochain x = interpolate(*mesh, w, b);
    interp_sq = x.coefficients.dot(op.M * x.coefficients) / Z;
    if (kdim > 0) {
      const Eigen::VectorXd px = P.apply(x.coefficients);
      proj = px.dot(op.M * px) / Z;
    }
    r.mesh_h = mesh->mesh_size_h;
  }
  r.lhs = norm_sq / Z - proj;
  r.terms = {{"bound_degree", double(p)},  {"norm_sq", norm_sq / Z},          {"projection_term", proj},
             {"kernel_dim", double(kdim)}, {"interpolant_norm_sq", interp_sq}};
  if (hyp.status == HypothesisStatus::satisfied) {
    const AnalyticForm Dw = variant == FormVariant::coclosed ? exterior_derivative(w) : codifferential(w, V);
    const double e = inverse_energy(interior_tensor(V, n, p, kInf), rule, V,
                                    [&](const Point& x) { return Dw.value(x); }) / Z;
    r.terms.emplace_back("inverse_energy", e);
    r.rhs = e;
  } else {
    r.rhs = std::nan("");
    r.note = p == 0 ? "Hess^(0) V = 0 gives no bound" : "hypothesis violated";
  }
  finalize_inequality(r);
  r.runtime_ms = sw.ms();
  return r;
}

CheckRecord check_variance_identity(const Cochain& eta, const AssembledOperator& op0, const AssembledOperator& op1,
                                    double tol, const KernelProjector* proj0, const KernelProjector* proj1) {
  const Stopwatch sw;
  if (op0.degree != 0 || op1.degree != 1 || op0.realization != op1.realization || op0.complex != op1.complex)
    throw ValidationError("op", "variance identity needs degree 0 and 1 operators on one complex");
  if (eta.degree != 0 || eta.coefficients.size() != op0.size()) throw ValidationError("eta", "cochain mismatch");
  KernelProjector local0, local1;
  if (!proj0) proj0 = &(local0 = kernel_projector(op0));
  if (!proj1) proj1 = &(local1 = kernel_projector(op1));
  const Eigen::VectorXd& x = eta.coefficients;
  const Eigen::VectorXd c = proj0->complement(x);
  const Eigen::VectorXd dx = op0.D * x;
  const RangeSolve s = solve_on_range(op1, Cochain{1, op1.realization, dx}, 1e-12, proj1);

  CheckRecord r;
  r.check_id = "variance_identity";
  r.case_name = "cochain";
  r.inputs = {op0.complex->domain.describe(), op0.potential.name(), 0, op0.realization, kInf,
              op0.potential.h_param()};
  r.quad_order = op0.quad_order;
  r.mesh_h = op0.complex->mesh_size_h;
  r.lhs = c.dot(op0.M * c);
  r.rhs = s.w.coefficients.dot(op1.M * dx);
  r.terms = {{"cg_iterations", double(s.iterations)}, {"cg_residual", s.residual}};
  r.hypothesis_status = HypothesisStatus::not_applicable;
  finalize_identity(r, tol, 1e-12 * x.dot(op0.M * x));
  r.runtime_ms = sw.ms();
  return r;
}

CheckRecord check_gap_lower_bound(const Potential& V, const DomainSpec& spec, Realization b, int p, double N,
                                  MeshLadder ladder, int quad_order) {
  const Stopwatch sw;
  const int n = spec.ambient_dim;
  if (p < 0 || p > n) throw ValidationError("p", "degree out of range");
  if (!std::isinf(N) && p != 0) throw ValidationError("N", "the N-refined gap bound is for functions (p = 0)");
  if (ladder.levels < 1 || ladder.h0 <= 0) throw ValidationError("levels", "need at least one mesh level");
  check_admissible_N(N, n, V);
  // Eigenfunctions differentiate to closed 1-forms, so p = 0 is bounded by
  // the 1-form curvature; higher degrees by their own.
  const int q = p == 0 ? 1 : p;
  const HypothesisReport hyp = hypothesis_check(V, spec, b, q, N, 8);

  CheckRecord r;
  r.check_id = "gap_lower_bound";
  r.case_name = "lambda1 >= bound - C h";
  r.inputs = make_inputs(spec, V, p, b, N);
  r.quad_order = quad_order;
  r.hypothesis_margin = std::min(hyp.boundary_margin, hyp.interior_margin);
  // A zero lower bound is admissible here (λ1 >= 0 holds trivially).
  const bool ok = hyp.boundary_status == HypothesisStatus::satisfied && hyp.interior_margin >= -kBoundaryTol &&
                  hyp.interior_status != HypothesisStatus::not_applicable;
  r.hypothesis_status = ok ? HypothesisStatus::satisfied : HypothesisStatus::violated;
  if (!ok) r.witness = hyp.witness() ? hyp.witness() : hyp.interior_witness;
  const double factor = std::isinf(N) ? 1.0 : N / (N - 1.0);
  const double bound = std::isinf(hyp.interior_margin) ? 0.0 : factor * hyp.interior_margin;
  r.lhs = bound;
  r.terms = {{"factor", factor}};
  if (!ok) {
    r.rhs = std::nan("");
    finalize_inequality(r);
    r.note = "hypothesis violated";
    r.runtime_ms = sw.ms();
    return r;
  }
  double C = 0.0, lambda = 0.0;
  double h = ladder.h0;
  for (int k = 0; k < ladder.levels; ++k, h *= 0.5) {
    const auto mesh = std::make_shared<const SimplicialComplex>(generate_mesh(spec, h));
    const AssembledOperator op = assemble_weighted_laplacian(mesh, p, V, b, quad_order);
    int kd = 0;
    first_nonkernel(op, lambda, kd);
    const double hm = mesh->mesh_size_h;
    const double Ck = std::max(0.0, bound - lambda) / (hm * std::max(1.0, std::abs(bound)));
    C = std::max(C, Ck);
    const std::string tag = "[" + std::to_string(k) + "]";
    r.terms.emplace_back("h" + tag, hm);
    r.terms.emplace_back("lambda1" + tag, lambda);
    r.terms.emplace_back("kernel_dim" + tag, kd);
    r.terms.emplace_back("C" + tag, Ck);
    r.mesh_h = hm;
  }
  r.rhs = lambda;
  r.terms.emplace_back("C", C);
  finalize_inequality(r);  // error fields: signed bound - λ1
  r.kind = CheckKind::inequality;
  r.tolerance = kGapCMax;
  r.pass = std::isfinite(lambda) && C <= kGapCMax;
  r.outcome = r.pass ? Outcome::pass : Outcome::fail;
  r.note = "pass iff C <= tolerance, C = max over levels of (bound - lambda1)_+ / (h max(1, bound))";
  r.runtime_ms = sw.ms();
  return r;
}

std::vector<CheckRecord> semiclassical_sweep(const Potential& V, const DomainSpec& spec, Realization b, int p,
                                             const std::vector<double>& h_list, double mesh_h, int quad_order) {
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0)) throw ValidationError("h_list", "semiclassical parameters must be positive");
    if (i && h_list[i] >= h_list[i - 1]) throw ValidationError("h_list", "h_list must be strictly descending");
  }
  std::vector<CheckRecord> out;
  for (double h : h_list) {
    // Ric_{V/h} = h^{-1} Hess V on flat domains; the tangential boundary
    // condition h K_t - ∂_n V >= 0 is K_t - ∂_n(V/h) >= 0 scaled by h.
    const Potential Vh = V.with_h(h);
    CheckRecord r = check_gap_lower_bound(Vh, spec, b, p, kInf, {mesh_h, 1}, quad_order);
    r.check_id = "semiclassical_gap";
    r.case_name = "h = " + format_real(h);
    r.terms.emplace_back("h_lambda1", h * r.rhs);
    r.terms.emplace_back("h_bound", h * r.lhs);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace whodge
