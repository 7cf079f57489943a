#include "whodge/forms.hpp"

#include "whodge/error.hpp"
#include "whodge/exterior.hpp"

namespace whodge {

const char* to_string(Realization b) {
  switch (b) {
    case Realization::tangential: return "tangential";
    case Realization::normal: return "normal";
    case Realization::none: return "none";
  }
  return "?";
}

Realization realization_from_string(const std::string& s) {
  if (s == "tangential" || s == "t") return Realization::tangential;
  if (s == "normal" || s == "n") return Realization::normal;
  if (s == "none") return Realization::none;
  throw ValidationError("b", "unknown realization '" + s + "'");
}

std::vector<Jet> AnalyticForm::jets(const Point& x, int order) const {
  const Jet jx = Jet::variable(0, x[0], order), jy = Jet::variable(1, x[1], order);
  std::vector<Jet> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(c(jx, jy));
  return out;
}

Eigen::VectorXd AnalyticForm::value(const Point& x) const {
  const auto j = jets(x, 0);
  Eigen::VectorXd v(size());
  for (int k = 0; k < size(); ++k) v[k] = j[k].value();
  return v;
}

Eigen::MatrixXd AnalyticForm::jacobian(const Point& x) const {
  const auto j = jets(x, 1);
  Eigen::MatrixXd J(size(), n);
  for (int k = 0; k < size(); ++k) {
    J(k, 0) = j[k].derivative(1, 0);
    if (n > 1) J(k, 1) = j[k].derivative(0, 1);
  }
  return J;
}

namespace {

Jet zero_jet(const Jet& x, const Jet&) { return Jet::constant(0.0, x.order()); }

// Evaluates f one order higher than the incoming coordinate jets.
Jet eval_up(const ScalarFn& f, const Jet& x, const Jet& y) {
  const int o = x.order() + 1;
  return f(Jet::variable(0, x.value(), o), Jet::variable(1, y.value(), o));
}

}  // namespace

AnalyticForm zero_form(int n, int p) {
  AnalyticForm w;
  w.n = n;
  w.p = p;
  w.components.assign(ext::binom(n, p), zero_jet);
  w.name = "0";
  return w;
}

AnalyticForm scalar_form(int n, ScalarFn f, std::string name) {
  AnalyticForm w;
  w.n = n;
  w.p = 0;
  w.components = {std::move(f)};
  w.name = std::move(name);
  return w;
}

AnalyticForm top_form(int n, ScalarFn g, std::string name) {
  AnalyticForm w;
  w.n = n;
  w.p = n;
  w.components = {std::move(g)};
  w.name = std::move(name);
  return w;
}

AnalyticForm one_form(int n, std::vector<ScalarFn> comps, std::string name) {
  if (static_cast<int>(comps.size()) != n) throw ValidationError("form", "1-form needs n components");
  AnalyticForm w;
  w.n = n;
  w.p = 1;
  w.components = std::move(comps);
  w.name = std::move(name);
  return w;
}

AnalyticForm exterior_derivative(const AnalyticForm& w) {
  if (w.p >= w.n) return zero_form(w.n, w.p + 1 > w.n ? w.n : w.p + 1);
  AnalyticForm r;
  r.n = w.n;
  r.p = w.p + 1;
  r.name = "d(" + w.name + ")";
  const int m = ext::binom(w.n, r.p);
  for (int J = 0; J < m; ++J) {
    // (dw)_J = sum over (k, I) with e_k ∧ e_I = ±e_J of ±∂_k w_I
    std::vector<std::tuple<int, int, int>> terms;
    for (int k = 0; k < w.n; ++k)
      for (int I = 0; I < w.size(); ++I) {
        const auto s = ext::wedge_basis(w.n, k, I, w.p);
        if (s.index == J) terms.emplace_back(k, I, s.sign);
      }
    r.components.push_back([comps = w.components, terms](const Jet& x, const Jet& y) {
      Jet acc = Jet::constant(0.0, x.order());
      for (const auto& [k, I, sign] : terms) {
        Jet t = eval_up(comps[I], x, y).diff(k);
        t *= sign;
        acc += t;
      }
      return acc;
    });
  }
  return r;
}

AnalyticForm codifferential(const AnalyticForm& w, const Potential& V) {
  if (w.p == 0) throw ValidationError("form", "codifferential of a 0-form");
  AnalyticForm r;
  r.n = w.n;
  r.p = w.p - 1;
  r.name = "d*_V(" + w.name + ")";
  const int m = ext::binom(w.n, r.p);
  const ScalarFn vf = V.fn();
  for (int J = 0; J < m; ++J) {
    std::vector<std::tuple<int, int, int>> terms;  // i_{e_k} e_I = sign e_J
    for (int k = 0; k < w.n; ++k)
      for (int I = 0; I < w.size(); ++I) {
        const auto s = ext::interior_basis(w.n, k, I, w.p);
        if (s.index == J) terms.emplace_back(k, I, s.sign);
      }
    r.components.push_back([comps = w.components, terms, vf](const Jet& x, const Jet& y) {
      Jet acc = Jet::constant(0.0, x.order());
      const Jet vj = eval_up(vf, x, y);
      for (const auto& [k, I, sign] : terms) {
        const Jet wi = eval_up(comps[I], x, y);
        Jet t = vj.diff(k) * wi - wi.diff(k);
        t *= sign;
        acc += t;
      }
      return acc;
    });
  }
  return r;
}

AnalyticForm multiply(const AnalyticForm& w, ScalarFn g) {
  AnalyticForm r = w;
  r.declared = Realization::none;
  for (auto& c : r.components)
    c = [c, g](const Jet& x, const Jet& y) { return g(x, y) * c(x, y); };
  return r;
}

AnalyticForm scale(const AnalyticForm& w, double s) {
  AnalyticForm r = w;
  for (auto& c : r.components)
    c = [c, s](const Jet& x, const Jet& y) { return s * c(x, y); };
  return r;
}

AnalyticForm add(const AnalyticForm& a, const AnalyticForm& b) {
  if (a.n != b.n || a.p != b.p) throw ValidationError("form", "degree mismatch in add");
  AnalyticForm r = a;
  r.declared = a.declared == b.declared ? a.declared : Realization::none;
  r.name = a.name + "+" + b.name;
  for (int k = 0; k < a.size(); ++k)
    r.components[k] = [ca = a.components[k], cb = b.components[k]](const Jet& x, const Jet& y) {
      return ca(x, y) + cb(x, y);
    };
  return r;
}

double boundary_residual(const AnalyticForm& w, Realization b, const BoundaryGeometry& g) {
  if (b == Realization::none) return 0.0;
  double r = 0.0;
  for (const BoundaryPoint& bp : g.points) {
    const Eigen::VectorXd v = w.value(bp.x);
    Eigen::VectorXd nv(w.n);
    nv[0] = bp.normal[0];
    if (w.n > 1) nv[1] = bp.normal[1];
    // n w  corresponds to i_n w; t w = w - n♭ ∧ i_n w.
    Eigen::VectorXd part;
    if (b == Realization::normal) {
      part = w.p == 0 ? Eigen::VectorXd::Zero(1) : ext::interior(nv, v, w.n, w.p);
    } else {
      part = w.p == 0 ? v : Eigen::VectorXd(v - ext::wedge(nv, ext::interior(nv, v, w.n, w.p), w.n, w.p - 1));
    }
    r = std::max(r, part.lpNorm<Eigen::Infinity>());
  }
  return r;
}

void validate_declared_bc(const AnalyticForm& w, const DomainSpec& spec, int quad_order) {
  if (w.declared == Realization::none || !spec.has_boundary()) return;
  const double r = boundary_residual(w, w.declared, analytic_boundary_rule(spec, quad_order));
  if (r > 1e-10)
    throw ValidationError("form.declared", std::string("form '") + w.name + "' violates declared " +
                                               to_string(w.declared) + " condition (residual " +
                                               std::to_string(r) + ")");
}

}  // namespace whodge
