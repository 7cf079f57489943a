#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "whodge/exterior.hpp"
#include "whodge/jet.hpp"
#include "whodge/quadrature.hpp"

using namespace whodge;

TEST_CASE("jet derivatives of a polynomial") {
  const Jet x = Jet::variable(0, 0.5, 4), y = Jet::variable(1, -2.0, 4);
  const Jet f = x * x * y + 3.0 * y * y * y - x;
  CHECK(f.value() == doctest::Approx(0.25 * -2.0 - 24.0 - 0.5));
  CHECK(f.derivative(1, 0) == doctest::Approx(2 * 0.5 * -2.0 - 1.0));
  CHECK(f.derivative(0, 1) == doctest::Approx(0.25 + 9.0 * 4.0));
  CHECK(f.derivative(2, 1) == doctest::Approx(2.0));
  CHECK(f.derivative(0, 3) == doctest::Approx(18.0));
  CHECK(f.derivative(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("jet transcendental functions against finite differences") {
  const double x0 = 0.3, y0 = 0.7, eps = 1e-5;
  auto fn = [](const Jet& x, const Jet& y) { return exp(-x * y) * sin(x + 2.0 * y) / (1.0 + x * x); };
  const Jet f = eval_jet(fn, x0, y0, 3);
  auto val = [&](double x, double y) { return eval_jet(fn, x, y, 0).value(); };
  CHECK(f.derivative(1, 0) == doctest::Approx((val(x0 + eps, y0) - val(x0 - eps, y0)) / (2 * eps)).epsilon(1e-8));
  CHECK(f.derivative(0, 1) == doctest::Approx((val(x0, y0 + eps) - val(x0, y0 - eps)) / (2 * eps)).epsilon(1e-8));
  const double fxx = (val(x0 + eps, y0) - 2 * val(x0, y0) + val(x0 - eps, y0)) / (eps * eps);
  CHECK(f.derivative(2, 0) == doctest::Approx(fxx).epsilon(1e-4));
  // diff() commutes with reading coefficients.
  CHECK(f.diff(0).derivative(1, 1) == doctest::Approx(f.derivative(2, 1)));
  CHECK(f.diff(1).order() == 2);
}

TEST_CASE("jet log, sqrt, pow") {
  const Jet x = Jet::variable(0, 2.0, 3);
  CHECK(log(x).derivative(3, 0) == doctest::Approx(2.0 / 8.0));
  CHECK(sqrt(x).derivative(1, 0) == doctest::Approx(0.5 / std::sqrt(2.0)));
  CHECK(pow(x, 3.0).derivative(3, 0) == doctest::Approx(6.0));
  const Jet z = Jet::variable(0, -1.5, 3);
  CHECK(pow(z, 2.0).value() == doctest::Approx(2.25));
}

TEST_CASE("exterior basis and signs") {
  CHECK(ext::binom(3, 2) == 3);
  CHECK(ext::basis(2, 1).size() == 2);
  // e_0 ∧ e_1 = + e_01 ; e_1 ∧ e_0 = - e_01
  CHECK(ext::wedge_basis(2, 0, 1, 1).sign == 1);
  CHECK(ext::wedge_basis(2, 1, 0, 1).sign == -1);
  CHECK(ext::wedge_basis(2, 0, 0, 1).index == -1);
  // i_{e_1} (e_0 ∧ e_1) = -e_0
  const auto s = ext::interior_basis(2, 1, 0, 2);
  CHECK(s.index == 0);
  CHECK(s.sign == -1);
}

TEST_CASE("lift examples") {
  CHECK(ext::lift(Eigen::MatrixXd::Identity(2, 2), 2)(0, 0) == 2.0);
  Eigen::MatrixXd D = Eigen::Vector2d(1.5, -0.25).asDiagonal();
  CHECK(ext::lift(D, 2)(0, 0) == doctest::Approx(1.25));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = g(rng);
  A = (A + A.transpose()).eval();
  CHECK((ext::lift(A, 1) - A).norm() == 0.0);
  CHECK(ext::lift(A, 0).size() == 1);
  CHECK(ext::lift(A, 0)(0, 0) == 0.0);
}

TEST_CASE("Gauss-Legendre exactness") {
  for (int order = 1; order <= 15; ++order) {
    const auto& r = quad::segment_rule(order);
    for (int k = 0; k <= order; ++k) {
      double s = 0;
      for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("triangle rule exactness") {
  // ∫_T s^a t^b = a! b! / (a+b+2)! on the reference triangle.
  auto fact = [](int n) { return std::tgamma(n + 1.0); };
  for (int order = 1; order <= 12; ++order) {
    const auto& r = quad::triangle_rule(order);
    for (int a = 0; a <= order; ++a)
      for (int b = 0; a + b <= order; ++b) {
        double s = 0;
        for (std::size_t i = 0; i < r.w.size(); ++i) s += r.w[i] * std::pow(r.bary[i][1], a) * std::pow(r.bary[i][2], b);
        CHECK(0.5 * s == doctest::Approx(fact(a) * fact(b) / fact(a + b + 2)).epsilon(1e-12));
      }
  }
}
