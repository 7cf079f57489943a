#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "whodge/error.hpp"
#include "whodge/spectral.hpp"

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

}  // namespace

TEST_CASE("interval spectra") {
  const auto I = mesh(DomainSpec::interval(0, 1), 1.0 / 128);
  const auto neu = lowest_eigenpairs(assemble_weighted_laplacian(I, 0, Potential::zero(), Realization::normal), 3);
  CHECK(std::abs(neu.eigenvalues[0]) <= 1e-9);
  CHECK(neu.eigenvalues[1] == doctest::Approx(pi * pi).epsilon(1e-3));
  CHECK(neu.eigenvalues[2] == doctest::Approx(4 * pi * pi).epsilon(1e-3));
  CHECK(neu.kernel_dim == 1);
  const auto dir = lowest_eigenpairs(assemble_weighted_laplacian(I, 0, Potential::zero(), Realization::tangential), 2);
  CHECK(dir.eigenvalues[0] == doctest::Approx(pi * pi).epsilon(1e-3));
  CHECK(dir.eigenvalues[1] == doctest::Approx(4 * pi * pi).epsilon(1e-3));
  CHECK(dir.kernel_dim == 0);
}

TEST_CASE("eigenpair contract") {
  const auto d = mesh(DomainSpec::disk(1.0), 0.15);
  for (int p = 0; p <= 2; ++p)
    for (Realization b : {Realization::normal, Realization::tangential}) {
      const auto op = assemble_weighted_laplacian(d, p, Potential::quadratic(2.0), b);
      const auto r = lowest_eigenpairs(op, 4, 1e-9);
      for (int i = 0; i < 4; ++i) {
        CHECK(r.eigenvalues[i] >= -1e-9);
        if (i) CHECK(r.eigenvalues[i] >= r.eigenvalues[i - 1]);
        const Eigen::VectorXd& v = r.eigenvectors[i].coefficients;
        const Eigen::VectorXd res = op.apply_S(v) - r.eigenvalues[i] * (op.M * v);
        CHECK(std::sqrt(res.dot(op.solve_M(res))) <= 1e-9 * (1 + r.eigenvalues[i]));
        for (int j = 0; j <= i; ++j)
          CHECK(std::abs(v.dot(op.M * r.eigenvectors[j].coefficients) - (i == j)) <= 1e-8);
      }
      // deterministic for a fixed seed
      const auto again = lowest_eigenpairs(op, 4, 1e-9);
      CHECK(again.eigenvalues == r.eigenvalues);
    }
  const auto j = lowest_eigenpairs(assemble_weighted_laplacian(d, 0, Potential::zero(), Realization::normal), 2).to_json();
  CHECK(j.contains("eigenvalues"));
  CHECK(j["kernel_dim"] == 1);
  CHECK(j["seed"] == kDefaultSeed);
  CHECK_THROWS_AS(lowest_eigenpairs(assemble_weighted_laplacian(d, 0, Potential::zero(), Realization::normal), 0),
                  ValidationError);
}

TEST_CASE("disk gap with V = |x|^2 is near 2") {
  const auto d = mesh(DomainSpec::disk(1.0), 0.1);
  const auto r = lowest_eigenpairs(assemble_weighted_laplacian(d, 0, Potential::quadratic(2.0), Realization::normal), 2);
  CHECK(r.kernel_dim == 1);
  CHECK(r.eigenvalues[1] >= 2.0 - 0.1);
}

TEST_CASE("kernel projectors") {
  const auto d = mesh(DomainSpec::disk(1.0), 0.2);
  const auto op0 = assemble_weighted_laplacian(d, 0, Potential::quadratic(2.0), Realization::normal);
  const auto P0 = kernel_projector(op0);
  REQUIRE(P0.dim() == 1);
  const Eigen::VectorXd c = P0.basis.col(0);
  CHECK((c / c[0] - Eigen::VectorXd::Ones(c.size())).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(kernel_projector(assemble_weighted_laplacian(d, 0, Potential::quadratic(2.0), Realization::tangential)).dim() == 0);
  const auto ann = mesh(DomainSpec::annulus(0.5, 1.0), 0.15);
  const auto op1 = assemble_weighted_laplacian(ann, 1, Potential::zero(), Realization::normal);
  const auto P1 = kernel_projector(op1);
  CHECK(P1.dim() == 1);
  // annulus tangential 1-forms: relative cohomology H^1(Ω, ∂Ω) has dim 1 too
  CHECK(kernel_projector(assemble_weighted_laplacian(ann, 1, Potential::zero(), Realization::tangential)).dim() == 1);
  CHECK(kernel_projector(assemble_weighted_laplacian(ann, 2, Potential::zero(), Realization::tangential)).dim() == 1);
  std::mt19937_64 rng(3);
  const Eigen::VectorXd x = random_vec(op1.size(), rng);
  const Eigen::VectorXd px = P1.apply(x);
  CHECK((P1.apply(px) - px).norm() <= 1e-10 * x.norm());
  const Eigen::VectorXd y = random_vec(op1.size(), rng);
  CHECK(std::abs(P1.apply(x).dot(op1.M * y) - x.dot(op1.M * P1.apply(y))) <= 1e-10 * x.norm() * y.norm());
}

TEST_CASE("Hodge decomposition") {
  std::mt19937_64 rng(7);
  for (const auto& s : {DomainSpec::interval(0, 1), DomainSpec::annulus(0.5, 1.0), DomainSpec::disk(1.0)}) {
    const auto m = mesh(s, s.ambient_dim == 1 ? 1.0 / 64 : 0.2);
    for (Realization b : {Realization::normal, Realization::tangential})
      for (int p = 0; p <= m->dim; ++p) {
        const auto op = assemble_weighted_laplacian(m, p, Potential::quadratic(1.0), b);
        const Cochain x{p, b, random_vec(op.size(), rng)};
        const auto h = hodge_decompose(x, op);
        CHECK(h.recomposition <= 1e-8);
        CHECK(h.kernel_exact <= 1e-8);
        CHECK(h.kernel_coexact <= 1e-8);
        CHECK(h.exact_coexact <= 1e-8);
      }
  }
  // x in the range of d has no coexact part; x in the kernel stays put.
  const auto d = mesh(DomainSpec::disk(1.0), 0.2);
  const auto op1 = assemble_weighted_laplacian(d, 1, Potential::quadratic(2.0), Realization::tangential);
  const Cochain y{0, Realization::tangential, random_vec(static_cast<int>(retained_dofs(*d, 0, Realization::tangential).size()), rng)};
  const Cochain dy = apply_d(*d, y);
  const auto h = hodge_decompose(dy, op1);
  const double n = std::sqrt(dy.coefficients.dot(op1.M * dy.coefficients));
  CHECK(std::sqrt(h.coexact_part.coefficients.dot(op1.M * h.coexact_part.coefficients)) <= 1e-8 * n);
  const auto op0 = assemble_weighted_laplacian(d, 0, Potential::zero(), Realization::normal);
  const Cochain one{0, Realization::normal, Eigen::VectorXd::Ones(op0.size())};
  const auto hk = hodge_decompose(one, op0);
  CHECK((hk.kernel_part.coefficients - one.coefficients).norm() <= 1e-8 * one.coefficients.norm());
}

TEST_CASE("solve on range and the variance identity") {
  const auto I = mesh(DomainSpec::interval(0, 1), 1.0 / 256);
  const auto op0 = assemble_weighted_laplacian(I, 0, Potential::zero(), Realization::normal);
  const auto op1 = assemble_weighted_laplacian(I, 1, Potential::zero(), Realization::normal);
  const AnalyticForm x = scalar_form(1, [](const Jet& x, const Jet&) { return x; });
  const Cochain eta = interpolate(*I, x, Realization::normal);
  const Cochain deta = apply_d(*I, eta);
  const auto w = solve_on_range(op1, deta);
  const double rhs = w.w.coefficients.dot(op1.M * deta.coefficients);
  CHECK(rhs == doctest::Approx(1.0 / 12).epsilon(1e-3));
  const auto P = kernel_projector(op0);
  const Eigen::VectorXd c = P.complement(eta.coefficients);
  CHECK(c.dot(op0.M * c) == doctest::Approx(rhs).epsilon(1e-9));
  const auto zero = solve_on_range(op1, {1, Realization::normal, Eigen::VectorXd::Zero(op1.size())});
  CHECK(zero.w.coefficients.norm() == 0.0);
  // w = d (L0|ker⊥)^{-1} η
  const auto u = solve_on_range(op0, {0, Realization::normal, c});
  CHECK((op0.D * u.w.coefficients - w.w.coefficients).norm() <= 1e-8 * w.w.coefficients.norm());
}

TEST_CASE("intertwining") {
  const auto I = mesh(DomainSpec::interval(0, 1), 1.0 / 64);
  const auto r1 = check_intertwining(assemble_weighted_laplacian(I, 0, Potential::linear(1.0), Realization::tangential),
                                     assemble_weighted_laplacian(I, 1, Potential::linear(1.0), Realization::tangential));
  CHECK(r1.within_contract);
  const auto d = mesh(DomainSpec::disk(1.0), 0.2);
  const Potential V = Potential::quadratic(2.0);
  const auto r2 = check_intertwining(assemble_weighted_laplacian(d, 0, V, Realization::normal),
                                     assemble_weighted_laplacian(d, 1, V, Realization::normal));
  CHECK(r2.within_contract);
  const auto bad = check_intertwining(assemble_weighted_laplacian(d, 0, V, Realization::normal, 2),
                                      assemble_weighted_laplacian(d, 1, V, Realization::normal, 8));
  CHECK(!bad.within_contract);
  CHECK(bad.max_residual > 1e-6);
}
