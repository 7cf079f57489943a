#include "whodge/curvature.hpp"

#include <limits>

#include "whodge/error.hpp"
#include "whodge/exterior.hpp"
#include "whodge/util.hpp"

namespace whodge {

SamplePoint interior_sample(const Point& x) { return {x, {0.0, 0.0}, 0.0, 0.0}; }

SamplePoint boundary_sample(const BoundaryPoint& b) { return {b.x, b.normal, b.k1, b.trace_k1}; }

std::vector<SamplePoint> boundary_samples(const BoundaryGeometry& g) {
  std::vector<SamplePoint> s;
  for (const auto& b : g.points) s.push_back(boundary_sample(b));
  return s;
}

std::vector<SamplePoint> interior_samples(const std::vector<QuadPoint>& q) {
  std::vector<SamplePoint> s;
  for (const auto& p : q) s.push_back(interior_sample(p.x));
  return s;
}

Eigen::MatrixXd EndomorphismField::operator()(const SamplePoint& s) const {
  Eigen::MatrixXd A = fn(s);
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()))
    throw Error("endomorphism field " + name + " is not symmetric");
  return A;
}

EndomorphismField constant_field(const Eigen::MatrixXd& A, int p, std::string name) {
  const int m = static_cast<int>(A.rows());
  int n = 0;
  while (ext::binom(n, p) != m && n < 4) ++n;
  return {p, n, Support::interior, std::move(name), [A](const SamplePoint&) { return A; }};
}

EndomorphismField zero_field(int n, int p, Support s) {
  const int m = ext::binom(n, p);
  return {p, n, s, "0", [m](const SamplePoint&) { return Eigen::MatrixXd::Zero(m, m).eval(); }};
}

EndomorphismField add(const EndomorphismField& a, const EndomorphismField& b) {
  if (a.degree != b.degree || a.dim != b.dim) throw ValidationError("field", "shape mismatch in add");
  return {a.degree, a.dim, a.support == b.support ? a.support : Support::boundary, a.name + "+" + b.name,
          [fa = a.fn, fb = b.fn](const SamplePoint& s) { return (fa(s) + fb(s)).eval(); }};
}

EndomorphismField lift_endomorphism(const EndomorphismField& A, int p) {
  if (A.degree != 1) throw ValidationError("field", "lift needs a 1-form endomorphism");
  if (p < 1 || p > A.dim) throw ValidationError("p", "lift degree out of range");
  if (p == 1) return A;
  return {p, A.dim, A.support, "(" + A.name + ")^(" + std::to_string(p) + ")",
          [f = A.fn, p](const SamplePoint& s) { return ext::lift(f(s), p); }};
}

EndomorphismField hessian_p(const Potential& V, int n, int p) {
  if (p == 0) return zero_field(n, 0);
  EndomorphismField h{1, n, Support::interior, "Hess " + V.name(),
                      [V, n](const SamplePoint& s) { return V.hessian(s.x, n); }};
  return lift_endomorphism(h, p);
}

CurvatureData flat_curvature(int n, BoundaryGeometry boundary) {
  EndomorphismField r = zero_field(n, 1);
  r.name = "Ric";
  return {r, std::move(boundary)};
}

EndomorphismField ricci_p(const CurvatureData& curv, int p) {
  if (p == 0) return zero_field(curv.ric1.dim, 0);
  return lift_endomorphism(curv.ric1, p);
}

void check_admissible_N(double N, int n, const Potential& V) {
  if (std::isnan(N) || N == -std::numeric_limits<double>::infinity())
    throw DomainError("N = " + format_real(N) + " is not admissible");
  if (N > 0 && N < n)
    throw DomainError("N = " + format_real(N) + " lies in the forbidden band (0, " + std::to_string(n) + ")");
  if (N == n && !V.is_constant())
    throw DomainError("N = n requires a constant potential");
}

EndomorphismField bakry_emery_tensor(const Potential& V, int n, double N) {
  check_admissible_N(N, n, V);
  const bool infinite = std::isinf(N) || N == n;  // at N = n, ∇V = 0
  const double c = infinite ? 0.0 : 1.0 / (N - n);
  return {1, n, Support::interior, "Ric_{V," + format_real(N) + "}", [V, n, c](const SamplePoint& s) {
            const Eigen::VectorXd g = V.gradient(s.x, n);
            return (V.hessian(s.x, n) - c * g * g.transpose()).eval();
          }};
}

double bl_factor(double N) {
  if (std::isinf(N)) return 1.0;
  if (N == 0.0) return std::numeric_limits<double>::infinity();
  return (N - 1.0) / N;
}

EndomorphismField boundary_operator(Realization b, int n, int p) {
  const int m = ext::binom(n, p);
  auto zero = [m](const SamplePoint&) { return Eigen::MatrixXd::Zero(m, m).eval(); };
  const std::string name = std::string("K_") + (b == Realization::normal ? "n" : "t") + "^(" + std::to_string(p) + ")";
  // In 1D the boundary is 0-dimensional and K1 is empty; in 2D Λ^2 of the
  // tangent line vanishes and the trace in the tangential formula cancels.
  if (b == Realization::none || n == 1 || p == 0 || p == n) return {p, n, Support::boundary, name, zero};
  // n = 2, p = 1
  if (b == Realization::normal)
    return {p, n, Support::boundary, name, [](const SamplePoint& s) {
              const Eigen::Vector2d T(-s.normal[1], s.normal[0]);
              return (-s.k1 * T * T.transpose()).eval();
            }};
  return {p, n, Support::boundary, name, [](const SamplePoint& s) {
            const Eigen::Vector2d nv(s.normal[0], s.normal[1]);
            return (-s.trace_k1 * nv * nv.transpose()).eval();
          }};
}

Eigen::MatrixXd hypothesis_subspace(Realization b, int n, int p, const SamplePoint& s) {
  const int m = ext::binom(n, p);
  Eigen::VectorXd nv(n);
  nv[0] = s.normal[0];
  if (n > 1) nv[1] = s.normal[1];
  if (b == Realization::normal) {
    if (p == 0) return Eigen::MatrixXd::Identity(1, 1);
    // kernel of w -> i_n w
    Eigen::MatrixXd A(ext::binom(n, p - 1), m);
    for (int I = 0; I < m; ++I) A.col(I) = ext::interior(nv, Eigen::VectorXd::Unit(m, I), n, p);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(1e-10);
    Eigen::MatrixXd K = lu.kernel();
    if (lu.rank() == m) return Eigen::MatrixXd(m, 0);
    return Eigen::HouseholderQR<Eigen::MatrixXd>(K).householderQ() * Eigen::MatrixXd::Identity(m, K.cols());
  }
  if (b == Realization::tangential) {
    if (p == 0) return Eigen::MatrixXd(1, 0);
    const int mp = ext::binom(n, p - 1);
    Eigen::MatrixXd A(m, mp);
    for (int J = 0; J < mp; ++J) A.col(J) = ext::wedge(nv, Eigen::VectorXd::Unit(mp, J), n, p - 1);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    const int r = static_cast<int>(qr.rank());
    return Eigen::MatrixXd(qr.householderQ()) * Eigen::MatrixXd::Identity(m, r);
  }
  return Eigen::MatrixXd::Identity(m, m);
}

MinEig min_eigenvalue(const EndomorphismField& f, const std::vector<SamplePoint>& samples) {
  MinEig r{std::numeric_limits<double>::infinity(), {}};
  for (const auto& s : samples) {
    const Eigen::MatrixXd A = f(s);
    if (A.rows() == 0) continue;
    const double v = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues()[0];
    if (v < r.value) r = {v, s};
  }
  return r;
}

EndomorphismField invert_endo_field(const EndomorphismField& f, const std::vector<SamplePoint>& samples,
                                    double positivity_tol) {
  const MinEig e = min_eigenvalue(f, samples);
  if (e.value < positivity_tol)
    throw PositivityViolation({e.where.x[0], e.where.x[1]}, e.value,
                              f.name + " is not positive: min eigenvalue " + format_real(e.value) + " at (" +
                                  format_real(e.where.x[0]) + ", " + format_real(e.where.x[1]) + ")");
  return {f.degree, f.dim, f.support, "(" + f.name + ")^-1", [g = f.fn](const SamplePoint& s) {
            const Eigen::MatrixXd A = g(s);
            Eigen::MatrixXd inv = A.ldlt().solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
            return (0.5 * (inv + inv.transpose())).eval();
          }};
}

nlohmann::json sample_table(const EndomorphismField& f, const std::vector<SamplePoint>& samples) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : samples) {
    const Eigen::MatrixXd A = f(s);
    nlohmann::json mat = nlohmann::json::array();
    for (int i = 0; i < A.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
      mat.push_back(row);
    }
    rows.push_back({{"point", {s.x[0], s.x[1]}}, {"matrix", mat}});
  }
  return {{"field", f.name}, {"degree", f.degree}, {"dim", f.dim}, {"samples", rows}};
}

}  // namespace whodge
