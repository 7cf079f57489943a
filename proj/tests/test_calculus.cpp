#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "whodge/calculus.hpp"
#include "whodge/error.hpp"
#include "whodge/exterior.hpp"
#include "whodge/quadrature.hpp"

using namespace whodge;
using std::numbers::pi;

namespace {

std::shared_ptr<const SimplicialComplex> mesh(const DomainSpec& s, double h) {
  return std::make_shared<const SimplicialComplex>(generate_mesh(s, h));
}

Eigen::VectorXd random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

Eigen::VectorXd dense_eigs(const AssembledOperator& op) {
  return Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd>(op.dense_S(), Eigen::MatrixXd(op.M),
                                                                   Eigen::EigenvaluesOnly)
      .eigenvalues();
}

}  // namespace

TEST_CASE("potential presets are self-consistent") {
  std::vector<Potential> vs = {Potential::zero(), Potential::quadratic(1.5), Potential::quartic_double_well(0.8),
                               Potential::linear(-2.0),
                               Potential::polynomial({{1, 1, 1.0}, {3, 0, -0.5}, {0, 2, 2.0}}),
                               Potential::quadratic(2.0).with_h(0.25), Potential::quadratic(2.0).negated()};
  for (const auto& V : vs)
    for (int n : {1, 2}) {
      const auto r = check_consistency(V, n, 100, 7);
      CHECK(r.grad_err <= 1e-6);
      CHECK(r.hess_err <= 1e-6);
      CHECK(r.lap_err <= 1e-12);
    }
  const Point x{0.3, -0.7};
  CHECK(Potential::quadratic(2.0).value(x) == doctest::Approx(0.58));
  CHECK(Potential::quadratic(2.0).with_h(0.5).value(x) == doctest::Approx(1.16));
  CHECK(Potential::quadratic(2.0).negated().value(x) == doctest::Approx(-0.58));
  CHECK(Potential::quartic_double_well(1.0).hessian({0, 0}, 2).isApprox(-Eigen::Matrix2d::Identity()));
  CHECK(Potential::parse("quadratic(0.5)").name() == "quadratic(0.5)");
  CHECK(Potential::parse("zero").is_constant());
  CHECK(!Potential::parse("linear(3)").is_constant());
  CHECK(Potential::parse("linear(3)").gradient(x, 2)[0] == 3.0);
  CHECK_THROWS_AS(Potential::parse("cubic(1)"), ValidationError);
  CHECK_THROWS_AS(Potential::parse("quadratic(inf)"), ValidationError);
  CHECK_THROWS_AS(Potential::zero().with_h(0.0), ValidationError);
  const auto xy = Potential::polynomial({{1, 1, 1.0}});
  CHECK(xy.hessian(x, 2)(0, 1) == 1.0);
}

TEST_CASE("mass matrix examples") {
  const auto c = generate_mesh(DomainSpec::interval(0, 1), 1.0);
  REQUIRE(c.count(1) == 1);
  const Eigen::MatrixXd M0 = Eigen::MatrixXd(assemble_mass(c, 0, Potential::zero(), 4));
  Eigen::Matrix2d ref;
  ref << 1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3;
  CHECK((M0 - ref).cwiseAbs().maxCoeff() <= 1e-15);

  const auto d = generate_mesh(DomainSpec::disk(1.0), 0.3);
  const Potential V = Potential::quadratic(2.0);
  const Potential C = Potential::polynomial({{0, 0, 0.7}});
  for (int p = 0; p <= 2; ++p) {
    const SpMat M = assemble_mass(d, p, V, 4);
    CHECK(SpMat(M - SpMat(M.transpose())).norm() == 0.0);
    CHECK(Eigen::SimplicialLLT<SpMat>(M).info() == Eigen::Success);
    const Eigen::MatrixXd a = Eigen::MatrixXd(assemble_mass(d, p, C, 4));
    const Eigen::MatrixXd b = std::exp(-0.7) * Eigen::MatrixXd(assemble_mass(d, p, Potential::zero(), 4));
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-14 * b.cwiseAbs().maxCoeff());
  }
  std::vector<std::string> warn;
  assemble_mass(d, 0, V, 2, &warn);
  CHECK(warn.size() == 1);
  CHECK_THROWS_AS(assemble_mass(d, 0, V, 1), ValidationError);
}

TEST_CASE("threaded assembly is bitwise identical") {
  const auto d = generate_mesh(DomainSpec::disk(1.0), 0.05);
  const Potential V = Potential::quartic_double_well(0.5);
  setenv("WHODGE_THREADS", "1", 1);
  const SpMat a = assemble_mass(d, 1, V, 6);
  setenv("WHODGE_THREADS", "4", 1);
  const SpMat b = assemble_mass(d, 1, V, 6);
  unsetenv("WHODGE_THREADS");
  CHECK(SpMat(a - b).norm() == 0.0);
}

TEST_CASE("Whitney forms commute with d pointwise") {
  std::mt19937_64 rng(3);
  const auto c = generate_mesh(DomainSpec::annulus(0.5, 1.0), 0.3);
  const Eigen::VectorXd x0 = random_vec(c.count(0), rng);
  const Eigen::VectorXd x1 = random_vec(c.count(1), rng);
  const Eigen::VectorXd dx0 = incidence_matrix(c, 0).entries.cast<double>() * x0;
  const Eigen::VectorXd dx1 = incidence_matrix(c, 1).entries.cast<double>() * x1;
  double err0 = 0, err1 = 0;
  std::vector<int> ids;
  for (int t = 0; t < c.count(2); ++t) {
    const auto P = c.simplex_points(2, t);
    Eigen::Matrix2d J;
    J << P[1][0] - P[0][0], P[2][0] - P[0][0], P[1][1] - P[0][1], P[2][1] - P[0][1];
    const Eigen::Matrix2d Ji = J.inverse();
    Eigen::Vector2d g[3] = {-(Ji.row(0) + Ji.row(1)).transpose(), Ji.row(0).transpose(), Ji.row(1).transpose()};
    auto local = [&](int v) {
      for (int k = 0; k < 3; ++k)
        if (c.simplices[2][t][k] == v) return k;
      return -1;
    };
    const std::array<double, 3> l{0.2, 0.5, 0.3};
    // d of the 0-form interpolant is constant: Σ x_v ∇λ_v
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    for (int k = 0; k < 3; ++k) grad += x0[c.simplices[2][t][k]] * g[k];
    const Eigen::MatrixXd phi1 = whitney_values(c, 1, t, l, ids);
    Eigen::Vector2d w = Eigen::Vector2d::Zero();
    for (int k = 0; k < 3; ++k) w += dx0[ids[k]] * phi1.row(k).transpose();
    err0 = std::max(err0, (w - grad).norm());
    // d(λ_a ∇λ_b - λ_b ∇λ_a) = 2 ∇λ_a ∧ ∇λ_b
    double curl = 0;
    for (int k = 0; k < 3; ++k) {
      const int a = local(c.simplices[1][ids[k]][0]), b = local(c.simplices[1][ids[k]][1]);
      curl += x1[ids[k]] * 2 * (g[a][0] * g[b][1] - g[a][1] * g[b][0]);
    }
    const Eigen::MatrixXd phi2 = whitney_values(c, 2, t, l, ids);
    err1 = std::max(err1, std::abs(dx1[ids[0]] * phi2(0, 0) - curl));
  }
  CHECK(err0 <= 1e-10);
  CHECK(err1 <= 1e-9);
}

TEST_CASE("apply_d examples") {
  const auto I = mesh(DomainSpec::interval(0, 1), 0.1);
  const AnalyticForm x = scalar_form(1, [](const Jet& x, const Jet&) { return x; }, "x");
  const Cochain c = interpolate(*I, x, Realization::normal);
  const Cochain dc = apply_d(*I, c);
  for (int e = 0; e < I->count(1); ++e) CHECK(dc.coefficients[e] == doctest::Approx(I->top_volume(e)));
  const Cochain one{0, Realization::normal, Eigen::VectorXd::Ones(I->count(0))};
  CHECK(apply_d(*I, one).coefficients.norm() == 0.0);
  CHECK_THROWS_AS(apply_d(*I, dc), ValidationError);

  std::mt19937_64 rng(5);
  for (const auto& s : {DomainSpec::disk(1.0), DomainSpec::rectangle(0, 1, 0, 2), DomainSpec::flat_torus(1, 1)}) {
    const auto m = mesh(s, 0.3);
    for (Realization b : {Realization::normal, Realization::tangential}) {
      // Integer-valued coefficients keep the floating-point arithmetic exact.
      Cochain y{0, b, random_vec(static_cast<int>(retained_dofs(*m, 0, b).size()), rng).array().round().matrix() * 1000.0};
      const Cochain ddy = apply_d(*m, apply_d(*m, y));
      CHECK(ddy.coefficients.cwiseAbs().maxCoeff() == 0.0);
      CHECK(ddy.coefficients.size() == static_cast<int>(retained_dofs(*m, 2, b).size()));
    }
  }
}

TEST_CASE("de Rham map commutes with d") {
  const auto m = mesh(DomainSpec::disk(1.0), 0.25);
  const AnalyticForm f = scalar_form(2, [](const Jet& x, const Jet& y) { return sin(x) * exp(y) + x * x * y; });
  const AnalyticForm w =
      one_form(2, {[](const Jet& x, const Jet& y) { return cos(x * y); }, [](const Jet& x, const Jet& y) { return x * x * x - y; }});
  const Cochain a = apply_d(*m, interpolate(*m, f, Realization::normal));
  const Cochain b = interpolate(*m, exterior_derivative(f), Realization::normal);
  CHECK((a.coefficients - b.coefficients).cwiseAbs().maxCoeff() <= 1e-13);
  const Cochain c = apply_d(*m, interpolate(*m, w, Realization::normal, 14));
  const Cochain d = interpolate(*m, exterior_derivative(w), Realization::normal, 14);
  CHECK((c.coefficients - d.coefficients).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("weighted codifferential") {
  std::mt19937_64 rng(11);
  for (const auto& s : {DomainSpec::interval(0, 1), DomainSpec::disk(1.0), DomainSpec::annulus(0.5, 1.0)}) {
    const auto m = mesh(s, s.ambient_dim == 1 ? 0.05 : 0.25);
    const Potential V = Potential::quadratic(2.0);
    for (Realization b : {Realization::normal, Realization::tangential})
      for (int p = 1; p <= m->dim; ++p) {
        const auto op = assemble_weighted_laplacian(m, p, V, b);
        const auto lower = assemble_weighted_laplacian(m, p - 1, V, b);
        double worst = 0;
        for (int k = 0; k < 50; ++k) {
          Cochain alpha{p - 1, b, random_vec(lower.size(), rng)};
          Cochain beta{p, b, random_vec(op.size(), rng)};
          const Eigen::VectorXd da = apply_d(*m, alpha).coefficients;
          const double lhs = da.dot(op.M * beta.coefficients);
          const double rhs = alpha.coefficients.dot(lower.M * apply_codifferential_V(beta, op).coefficients);
          const double scale = std::sqrt(alpha.coefficients.dot(lower.M * alpha.coefficients) *
                                         beta.coefficients.dot(op.M * beta.coefficients));
          worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
        CHECK(worst <= 1e-10);
        // weighted coexact: D^T M β = 0 gives zero output
        Cochain zero{p, b, Eigen::VectorXd::Zero(op.size())};
        CHECK(apply_codifferential_V(zero, op).coefficients.norm() == 0.0);
      }
  }
  // 1D, V = 0: d* of the interpolant of dx vanishes at interior vertices.
  const auto I = mesh(DomainSpec::interval(0, 1), 1.0 / 64);
  const auto op = assemble_weighted_laplacian(I, 1, Potential::zero(), Realization::tangential);
  const AnalyticForm dx = one_form(1, {[](const Jet& x, const Jet&) { return Jet::constant(1.0, x.order()); }});
  const Cochain beta = interpolate(*I, dx, Realization::tangential);
  CHECK(apply_codifferential_V(beta, op).coefficients.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("weighted Laplacian realizations") {
  const auto I = mesh(DomainSpec::interval(0, 1), 1.0 / 64);
  const auto neu = assemble_weighted_laplacian(I, 0, Potential::zero(), Realization::normal);
  const Eigen::VectorXd en = dense_eigs(neu);
  CHECK(std::abs(en[0]) <= 1e-10);
  CHECK(neu.apply_S(Eigen::VectorXd::Ones(neu.size())).norm() <= 1e-12);
  CHECK(en[1] == doctest::Approx(pi * pi).epsilon(1e-3));
  const auto dir = assemble_weighted_laplacian(I, 0, Potential::zero(), Realization::tangential);
  CHECK(dense_eigs(dir)[0] == doctest::Approx(pi * pi).epsilon(1e-3));
  CHECK(dir.size() == I->count(0) - 2);

  // Positive semidefinite form and exact supersymmetry on assembled matrices.
  std::mt19937_64 rng(2);
  const auto d = mesh(DomainSpec::disk(1.0), 0.2);
  const Potential V = Potential::quadratic(2.0);
  for (Realization b : {Realization::normal, Realization::tangential}) {
    std::vector<AssembledOperator> ops;
    for (int p = 0; p <= 2; ++p) ops.push_back(assemble_weighted_laplacian(d, p, V, b));
    for (int p = 0; p <= 2; ++p) {
      const Eigen::VectorXd x = random_vec(ops[p].size(), rng);
      CHECK(x.dot(ops[p].apply_S(x)) >= -1e-10 * x.dot(ops[p].M * x));
    }
    for (int p = 0; p < 2; ++p) {
      const Eigen::VectorXd x = random_vec(ops[p].size(), rng);
      const Eigen::VectorXd lhs = ops[p + 1].apply_L(ops[p].D * x);
      const Eigen::VectorXd rhs = ops[p].D * ops[p].apply_L(x);
      CHECK((lhs - rhs).norm() <= 1e-10 * ops[p].apply_L(x).norm() * ops[p].D.norm());
    }
  }
  CHECK_THROWS_AS(assemble_weighted_laplacian(d, 1, V, Realization::none), UnsupportedRealization);
  CHECK_NOTHROW(assemble_weighted_laplacian(mesh(DomainSpec::flat_torus(1, 1), 0.3), 1, V, Realization::none));
}

TEST_CASE("shift-invert solve matches dense") {
  const auto d = mesh(DomainSpec::annulus(0.5, 1.0), 0.3);
  std::mt19937_64 rng(9);
  for (int p = 0; p <= 2; ++p)
    for (Realization b : {Realization::normal, Realization::tangential}) {
      const auto op = assemble_weighted_laplacian(d, p, Potential::linear(1.0), b);
      const Eigen::VectorXd r = random_vec(op.size(), rng);
      const Eigen::VectorXd x = op.shift_solve(-1.0, r);
      CHECK((op.apply_S(x) + op.M * x - r).norm() <= 1e-10 * r.norm());
      const Eigen::MatrixXd S = op.dense_S();
      const Eigen::VectorXd y = Eigen::VectorXd::Random(op.size());
      CHECK((S * y - op.apply_S(y)).norm() <= 1e-10 * (1 + (S * y).norm()));
    }
}

TEST_CASE("dual problem") {
  const auto a = dual_problem(2, 1, Realization::normal, Potential::quadratic(2.0));
  CHECK(a.degree == 1);
  CHECK(a.b == Realization::tangential);
  CHECK(a.potential.value({1, 0}) == doctest::Approx(-1.0));
  const auto b = dual_problem(1, 0, Realization::normal, Potential::zero());
  CHECK(b.degree == 1);
  CHECK(b.b == Realization::tangential);
  CHECK(dual_problem(2, 0, Realization::tangential, Potential::zero()).b == Realization::normal);

  // Uniform interval, V = 0: the two routes coincide exactly.
  const auto I = mesh(DomainSpec::interval(0, 1), 1.0 / 40);
  const Eigen::VectorXd direct = dense_eigs(assemble_weighted_laplacian(I, 0, Potential::zero(), Realization::normal));
  const Eigen::VectorXd dual = dense_eigs(assemble_weighted_laplacian(I, 1, Potential::zero(), Realization::tangential));
  REQUIRE(direct.size() == dual.size() + 1);
  for (int k = 1; k < 10; ++k) CHECK(direct[k] == doctest::Approx(dual[k]).epsilon(1e-10));
}

TEST_CASE("analytic quadratic form") {
  const DomainSpec I = DomainSpec::interval(0, 1);
  const AnalyticForm one = scalar_form(1, [](const Jet& x, const Jet&) { return Jet::constant(1.0, x.order()); });
  CHECK(quadratic_form_analytic(one, Potential::quadratic(3.0), I, 8).value == 0.0);
  const AnalyticForm x = scalar_form(1, [](const Jet& x, const Jet&) { return x; });
  CHECK(quadratic_form_analytic(x, Potential::zero(), I, 8).value == doctest::Approx(1.0).epsilon(1e-14));
  const auto r = quadratic_form_analytic(x, Potential::linear(1.0), I, 8);
  CHECK(r.value == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
  CHECK(r.converged);
  // 1-form on the disk: ω = x dx1 + y dx2 has dω = 0, d*ω = -2.
  const AnalyticForm w = one_form(2, {[](const Jet& x, const Jet&) { return x; }, [](const Jet&, const Jet& y) { return y; }});
  CHECK(quadratic_form_analytic(w, Potential::zero(), DomainSpec::disk(1.0), 8).value == doctest::Approx(4 * pi));
  // codifferential with V: d*_V ω = -div ω + ∇V·ω, V = |x|^2 -> -2 + 2|x|^2
  const AnalyticForm ds = codifferential(w, Potential::quadratic(2.0));
  CHECK(ds.value({0.3, 0.4})[0] == doctest::Approx(-2 + 2 * 0.25));
}

TEST_CASE("declared boundary conditions") {
  const DomainSpec disk = DomainSpec::disk(1.0);
  AnalyticForm rot = one_form(2, {[](const Jet&, const Jet& y) { return -y; }, [](const Jet& x, const Jet&) { return x; }});
  rot.declared = Realization::normal;
  CHECK_NOTHROW(validate_declared_bc(rot, disk, 6));
  rot.declared = Realization::tangential;
  CHECK_THROWS_AS(validate_declared_bc(rot, disk, 6), ValidationError);
  AnalyticForm rad = one_form(2, {[](const Jet& x, const Jet&) { return x; }, [](const Jet&, const Jet& y) { return y; }});
  rad.declared = Realization::tangential;
  CHECK_NOTHROW(validate_declared_bc(rad, disk, 6));
  AnalyticForm s = scalar_form(1, [](const Jet& x, const Jet&) { return sin(pi * x); });
  s.declared = Realization::tangential;
  CHECK_NOTHROW(validate_declared_bc(s, DomainSpec::interval(0, 1), 6));
}

TEST_CASE("Witten conjugation has the same spectrum") {
  for (const auto& s : {DomainSpec::interval(0, 1), DomainSpec::disk(1.0)}) {
    const auto m = mesh(s, s.ambient_dim == 1 ? 0.1 : 0.5);
    for (int p = 0; p <= m->dim; ++p)
      CHECK(witten_conjugation_residual(
                assemble_weighted_laplacian(m, p, Potential::quadratic(2.0), Realization::normal)) <= 1e-8);
  }
}

TEST_CASE("cochain CSV export") {
  const auto I = mesh(DomainSpec::interval(0, 1), 0.5);
  const Cochain c{0, Realization::tangential, Eigen::VectorXd::Constant(1, 0.25)};
  std::ostringstream os;
  write_cochain_csv(os, *I, c);
  CHECK(os.str() == "simplex_id,value\n1,0.25\n");
}
