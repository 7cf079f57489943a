#include "whodge/potential.hpp"

#include <random>
#include <regex>

#include "whodge/error.hpp"
#include "whodge/util.hpp"

namespace whodge {

Potential::Potential() : name_("zero"), base_([](const Jet& x, const Jet&) { return Jet::constant(0.0, x.order()); }) {}

Potential Potential::zero() { return Potential(); }

Potential Potential::quadratic(double alpha) {
  Potential v;
  v.name_ = "quadratic(" + format_real(alpha) + ")";
  v.base_ = [alpha](const Jet& x, const Jet& y) { return 0.5 * alpha * (x * x + y * y); };
  v.constant_ = alpha == 0.0;
  v.terms_ = {{2, 0, 0.5 * alpha}, {0, 2, 0.5 * alpha}};
  return v;
}

Potential Potential::quartic_double_well(double a) {
  Potential v;
  v.name_ = "quartic_double_well(" + format_real(a) + ")";
  v.base_ = [a](const Jet& x, const Jet& y) {
    const Jet r = x * x + y * y - a * a;
    return 0.25 * (r * r);
  };
  v.constant_ = false;
  const double a2 = a * a;
  v.terms_ = {{4, 0, 0.25}, {0, 4, 0.25}, {2, 2, 0.5}, {2, 0, -0.5 * a2}, {0, 2, -0.5 * a2}, {0, 0, 0.25 * a2 * a2}};
  return v;
}

Potential Potential::linear(double c) {
  Potential v;
  v.name_ = "linear(" + format_real(c) + ")";
  v.base_ = [c](const Jet& x, const Jet&) { return c * x; };
  v.constant_ = c == 0.0;
  v.terms_ = {{1, 0, c}};
  return v;
}

Potential Potential::polynomial(std::vector<Term> terms) {
  Potential v;
  std::string name = "polynomial(";
  bool constant = true;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const Term& t = terms[k];
    if (t.i < 0 || t.j < 0) throw ValidationError("potential.terms", "negative exponent");
    if (!std::isfinite(t.c)) throw ValidationError("potential.terms", "non-finite coefficient");
    if (t.i + t.j > 0 && t.c != 0.0) constant = false;
    name += (k ? "," : "") + format_real(t.c) + "*x^" + std::to_string(t.i) + "*y^" + std::to_string(t.j);
  }
  v.name_ = name + ")";
  v.constant_ = constant;
  v.terms_ = terms;
  v.base_ = [terms = std::move(terms)](const Jet& x, const Jet& y) {
    Jet r = Jet::constant(0.0, x.order());
    for (const Term& t : terms) {
      Jet m = Jet::constant(t.c, x.order());
      for (int k = 0; k < t.i; ++k) m = m * x;
      for (int k = 0; k < t.j; ++k) m = m * y;
      r += m;
    }
    return r;
  };
  return v;
}

Potential Potential::custom(std::string name, ScalarFn fn, bool constant) {
  Potential v;
  v.name_ = std::move(name);
  v.base_ = std::move(fn);
  v.constant_ = constant;
  return v;
}

Potential Potential::parse(const std::string& text) {
  static const std::regex re(R"(^\s*([a-z_]+)\s*(?:\(\s*([^)]*?)\s*\))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw ValidationError("potential", "cannot parse '" + text + "'");
  const std::string name = m[1];
  const bool has_arg = m[2].matched && !m[2].str().empty();
  const double arg = has_arg ? parse_extended_real(m[2]) : 1.0;
  if (has_arg && !std::isfinite(arg)) throw ValidationError("potential", "parameter must be finite");
  if (name == "zero" && !has_arg) return zero();
  if (name == "quadratic") return quadratic(arg);
  if (name == "quartic_double_well") return quartic_double_well(arg);
  if (name == "linear") return linear(arg);
  throw ValidationError("potential", "unknown preset '" + text + "'");
}

std::vector<std::string> Potential::preset_names() {
  return {"zero", "quadratic(alpha)", "quartic_double_well(a)", "linear(c)", "polynomial [[i, j, c], ...]"};
}

Potential Potential::with_h(double h) const {
  if (!(h > 0) || !std::isfinite(h)) throw ValidationError("h_param", "must be positive and finite");
  Potential v = *this;
  v.h_ = h;
  return v;
}

Potential Potential::negated() const {
  Potential v = *this;
  v.sign_ = -sign_;
  return v;
}

ScalarFn Potential::fn() const {
  const double s = sign_ / h_;
  if (s == 1.0) return base_;
  return [base = base_, s](const Jet& x, const Jet& y) { return s * base(x, y); };
}

Jet Potential::jet(const Point& x, int order) const {
  Jet j = eval_jet(base_, x[0], x[1], order);
  j *= sign_ / h_;
  return j;
}

double Potential::value(const Point& x) const {
  const double v = jet(x, 0).value();
  if (!std::isfinite(v)) throw DomainError("potential " + name_ + " is not finite at (" + format_real(x[0]) + ", " + format_real(x[1]) + ")");
  return v;
}

Eigen::VectorXd Potential::gradient(const Point& x, int n) const {
  const Jet j = jet(x, 1);
  Eigen::VectorXd g(n);
  g[0] = j.derivative(1, 0);
  if (n > 1) g[1] = j.derivative(0, 1);
  return g;
}

Eigen::MatrixXd Potential::hessian(const Point& x, int n) const {
  const Jet j = jet(x, 2);
  Eigen::MatrixXd H(n, n);
  H(0, 0) = j.derivative(2, 0);
  if (n > 1) {
    H(0, 1) = H(1, 0) = j.derivative(1, 1);
    H(1, 1) = j.derivative(0, 2);
  }
  return H;
}

double Potential::laplacian(const Point& x, int n) const {
  const Jet j = jet(x, 2);
  return j.derivative(2, 0) + (n > 1 ? j.derivative(0, 2) : 0.0);
}

ConsistencyReport check_consistency(const Potential& V, int n, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double e = 1e-5;
  ConsistencyReport r;
  for (int s = 0; s < samples; ++s) {
    Point x{u(rng), n > 1 ? u(rng) : 0.0};
    const Eigen::VectorXd g = V.gradient(x, n);
    const Eigen::MatrixXd H = V.hessian(x, n);
    for (int k = 0; k < n; ++k) {
      Point xp = x, xm = x;
      xp[k] += e;
      xm[k] -= e;
      const double fd = (V.value(xp) - V.value(xm)) / (2 * e);
      r.grad_err = std::max(r.grad_err, std::abs(fd - g[k]) / (1 + g.norm()));
      const Eigen::VectorXd col = (V.gradient(xp, n) - V.gradient(xm, n)) / (2 * e);
      r.hess_err = std::max(r.hess_err, (col - H.col(k)).norm() / (1 + H.norm()));
    }
    r.lap_err = std::max(r.lap_err, std::abs(V.laplacian(x, n) - H.trace()));
  }
  return r;
}

}  // namespace whodge
