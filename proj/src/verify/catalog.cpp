#include <cmath>
#include <map>
#include <numbers>

#include "whodge/error.hpp"
#include "whodge/verify.hpp"

namespace whodge {

namespace {

using std::numbers::pi;

AnalyticForm declared(AnalyticForm w, Realization b, std::string name) {
  w.declared = b;
  w.name = std::move(name);
  return w;
}

Jet r2(const Jet& x, const Jet& y) { return x * x + y * y; }

using Factory = AnalyticForm (*)();

const std::map<std::string, Factory>& catalog() {
  static const std::map<std::string, Factory> m = {
      {"const_2d", [] { return scalar_form(2, [](const Jet& x, const Jet&) { return Jet::constant(1.0, x.order()); }, "1"); }},
      {"x1_1d", [] { return scalar_form(1, [](const Jet& x, const Jet&) { return x; }, "x"); }},
      {"x1_2d", [] { return scalar_form(2, [](const Jet& x, const Jet&) { return x; }, "x1"); }},
      {"x1_plus_y2", [] { return scalar_form(2, [](const Jet& x, const Jet& y) { return x + y * y; }, "x1 + x2^2"); }},
      {"sin_pi_x", [] {
         return declared(scalar_form(1, [](const Jet& x, const Jet&) { return sin(pi * x); }),
                         Realization::tangential, "sin(pi x)");
       }},
      {"bubble_2d", [] {
         return declared(scalar_form(2, [](const Jet& x, const Jet& y) { return 1.0 - r2(x, y); }),
                         Realization::tangential, "1 - |x|^2");
       }},
      {"bump_1d", [] { return scalar_form(1, bump_function({0.5, 0.0}, 0.35), "bump(0.5, 0.35)"); }},
      {"bump_centered_1d", [] { return scalar_form(1, bump_function({0.0, 0.0}, 0.7), "bump(0, 0.7)"); }},
      {"bump_2d", [] { return scalar_form(2, bump_function({0.5, 0.5}, 0.35), "bump((0.5,0.5), 0.35)"); }},
      {"x2_dx_1d", [] {
         return declared(one_form(1, {[](const Jet& x, const Jet&) { return x * x; }}), Realization::tangential,
                         "x^2 dx");
       }},
      {"radial_1form", [] {
         return declared(one_form(2, {[](const Jet& x, const Jet&) { return x; },
                                      [](const Jet&, const Jet& y) { return y; }}),
                         Realization::tangential, "x dx + y dy");
       }},
      {"rotation_1form", [] {
         return declared(one_form(2, {[](const Jet&, const Jet& y) { return -y; },
                                      [](const Jet& x, const Jet&) { return x; }}),
                         Realization::normal, "-y dx + x dy");
       }},
      {"disk_tangential_1form", [] {
         return declared(one_form(2, {[](const Jet& x, const Jet& y) { return 1.0 - r2(x, y); },
                                      [](const Jet& x, const Jet&) { return Jet::constant(0.0, x.order()); }}),
                         Realization::tangential, "(1 - |x|^2) dx1");
       }},
      {"bubble_top_form", [] {
         return declared(top_form(2, [](const Jet& x, const Jet& y) { return 1.0 - r2(x, y); }),
                         Realization::normal, "(1 - |x|^2) vol");
       }},
      {"shifted_top_form", [] {
         return declared(top_form(2, [](const Jet& x, const Jet& y) { return 1.0 + x + 0.5 * y * y; }),
                         Realization::tangential, "(1 + x + y^2/2) vol");
       }},
      {"square_normal_1form", [] {
         return declared(one_form(2, {[](const Jet& x, const Jet& y) { return sin(pi * x) * exp(y); },
                                      [](const Jet& x, const Jet& y) { return x * y * (1.0 - y); }}),
                         Realization::normal, "sin(pi x) e^y dx + x y (1 - y) dy");
       }},
      {"square_tangential_1form", [] {
         return declared(one_form(2, {[](const Jet&, const Jet& y) { return y * (1.0 - y); },
                                      [](const Jet& x, const Jet& y) { return sin(pi * x) * cos(y); }}),
                         Realization::tangential, "y (1 - y) dx + sin(pi x) cos(y) dy");
       }},
      {"square_bubble_top_form", [] {
         return declared(top_form(2, [](const Jet& x, const Jet& y) { return x * (1.0 - x) * y * (1.0 - y); }),
                         Realization::normal, "x (1 - x) y (1 - y) vol");
       }},
  };
  return m;
}

Potential tilted_quadratic() {
  return Potential::polynomial({{1, 0, 0.5}, {0, 2, 1.0}, {1, 1, 0.3}, {2, 0, 0.5}});
}

// d*_V (φ vol): coclosed by construction.
AnalyticForm coexact_1form(ScalarFn phi, const Potential& V, std::string name, Realization b) {
  AnalyticForm w = codifferential(top_form(2, std::move(phi)), V);
  w.name = std::move(name);
  w.declared = b;
  return w;
}

}  // namespace

ScalarFn bump_function(Point center, double radius) {
  return [center, radius](const Jet& x, const Jet& y) {
    const Jet dx = x - center[0], dy = y - center[1];
    const Jet s = (dx * dx + dy * dy) / (radius * radius);
    if (s.value() >= 1.0) return Jet::constant(0.0, x.order());
    return exp(-1.0 / (1.0 - s));
  };
}

AnalyticForm catalog_form(const std::string& name) {
  const auto& m = catalog();
  const auto it = m.find(name);
  if (it == m.end()) throw ValidationError("form", "unknown catalog form '" + name + "'");
  return it->second();
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : catalog()) out.push_back(k);
  return out;
}

std::vector<IdentityCase> decomposition_cases() {
  const DomainSpec disk = DomainSpec::disk(1.0), sq = DomainSpec::rectangle(0, 1, 0, 1);
  const Realization t = Realization::tangential, n = Realization::normal;
  return {
      {"disk (1-|x|^2) dx1, V=|x|^2, t", catalog_form("disk_tangential_1form"), Potential::quadratic(2.0), disk, t},
      {"disk radial 1-form, V=|x|^2, t", catalog_form("radial_1form"), Potential::quadratic(2.0), disk, t},
      {"disk rotation 1-form, tilted V, n", catalog_form("rotation_1form"), tilted_quadratic(), disk, n},
      {"disk x1 + x2^2, V=|x|^2/2, n", catalog_form("x1_plus_y2"), Potential::quadratic(1.0), disk, n},
      {"disk top bubble, V=|x|^2, n", catalog_form("bubble_top_form"), Potential::quadratic(2.0), disk, n},
      {"square normal 1-form, tilted V, n", catalog_form("square_normal_1form"), tilted_quadratic(), sq, n},
      {"square tangential 1-form, V=|x|^2/2, t", catalog_form("square_tangential_1form"), Potential::quadratic(1.0), sq, t},
      {"disk zero 1-form, t", declared(zero_form(2, 1), t, "0"), Potential::quadratic(2.0), disk, t},
  };
}

std::vector<IdentityCase> green_cases() {
  const DomainSpec I = DomainSpec::interval(0, 1), disk = DomainSpec::disk(1.0), sq = DomainSpec::rectangle(0, 1, 0, 1);
  const Realization t = Realization::tangential, n = Realization::normal;
  AnalyticForm sin_n = catalog_form("sin_pi_x");
  sin_n.declared = n;
  return {
      {"interval sin(pi x), V=x, t", catalog_form("sin_pi_x"), Potential::linear(1.0), I, t},
      {"interval x^2 dx, V=x^2/2, t", catalog_form("x2_dx_1d"), Potential::quadratic(1.0), I, t},
      {"disk radial 1-form, tilted V, t", catalog_form("radial_1form"), tilted_quadratic(), disk, t},
      {"disk rotation 1-form, tilted V, n", catalog_form("rotation_1form"), tilted_quadratic(), disk, n},
      {"square normal 1-form, V=|x|^2/2, n", catalog_form("square_normal_1form"), Potential::quadratic(1.0), sq, n},
      {"disk rotation 1-form, V=0, n", catalog_form("rotation_1form"), Potential::zero(), disk, n},
      {"interval sin(pi x), V=x, n", sin_n, Potential::linear(1.0), I, n},
  };
}

std::vector<IdentityCase> bochner_cases() {
  const DomainSpec disk = DomainSpec::disk(1.0), sq = DomainSpec::rectangle(0, 1, 0, 1);
  const Realization t = Realization::tangential, n = Realization::normal;
  return {
      {"disk radial 1-form, t", catalog_form("radial_1form"), Potential::zero(), disk, t},
      {"disk rotation 1-form, n", catalog_form("rotation_1form"), Potential::zero(), disk, n},
      {"square tangential 1-form, t", catalog_form("square_tangential_1form"), Potential::zero(), sq, t},
      {"annulus rotation 1-form, n", catalog_form("rotation_1form"), Potential::zero(), domain_preset("annulus"), n},
      {"disk x1 + x2^2, n", catalog_form("x1_plus_y2"), Potential::zero(), disk, n},
  };
}

std::vector<IdentityCase> gamma_cases() {
  return {
      {"interval bump, V=0", catalog_form("bump_1d"), Potential::zero(), DomainSpec::interval(0, 1), Realization::none},
      {"interval bump, V=3x^2/2", catalog_form("bump_centered_1d"), Potential::quadratic(3.0),
       DomainSpec::interval(-1, 1), Realization::none},
      {"square bump, tilted V", catalog_form("bump_2d"), tilted_quadratic(), DomainSpec::rectangle(0, 1, 0, 1),
       Realization::none},
  };
}

std::vector<InequalityCase> bl_suite() {
  const DomainSpec disk = DomainSpec::disk(1.0), sq = DomainSpec::rectangle(0, 1, 0, 1);
  const DomainSpec I = DomainSpec::interval(-1, 1);
  const Realization t = Realization::tangential, n = Realization::normal;
  const Potential q2 = Potential::quadratic(2.0), q1 = Potential::quadratic(1.0), qh = Potential::quadratic(0.5);
  const FormVariant co = FormVariant::coclosed, cl = FormVariant::closed;
  const AnalyticForm x1 = catalog_form("x1_2d"), bubble = catalog_form("bubble_2d");
  const AnalyticForm x1_1d = catalog_form("x1_1d");
  auto bubble_sq = [](const Jet& x, const Jet& y) { return (1.0 - r2(x, y)) * (1.0 - r2(x, y)); };
  auto sq_phi = [](const Jet& x, const Jet& y) { return x * (1.0 - x) * y * (1.0 - y); };
  AnalyticForm closed_1form = exterior_derivative(scalar_form(2, bubble_sq));
  closed_1form.name = "d((1-|x|^2)^2)";
  closed_1form.declared = n;
  std::vector<InequalityCase> s = {
      // hypotheses satisfied
      {"scalar disk x1, V=|x|^2, n, N=inf", x1, q2, disk, n, kInf},
      {"scalar disk x1, V=|x|^2/2, n, N=4", x1, q1, disk, n, 4.0},
      {"scalar disk x1, V=|x|^2/2, n, N=-1", x1, q1, disk, n, -1.0},
      {"scalar disk x1, V=|x|^2/2, n, N=0", x1, q1, disk, n, 0.0},
      {"scalar disk 1-|x|^2, V=|x|^2/4, t", bubble, qh, disk, t, kInf},
      {"scalar square x1 + x2^2, V=|x|^2/2, n", catalog_form("x1_plus_y2"), q1, sq, n, kInf},
      {"scalar interval x, V=x^2/2, n, N=inf", x1_1d, q1, I, n, kInf},
      {"scalar interval x, V=x^2/2, n, N=4", x1_1d, q1, I, n, 4.0},
      {"forms q=0 disk x1, V=|x|^2, n", x1, q2, disk, n, kInf, false, co},
      {"forms q=0 disk 1-|x|^2, V=|x|^2/4, t", bubble, qh, disk, t, kInf, false, co},
      {"forms q=1 disk d*_V((1-|x|^2) vol), V=|x|^2, n",
       coexact_1form([](const Jet& x, const Jet& y) { return 1.0 - r2(x, y); }, q2, "d*_V((1-|x|^2) vol)", n), q2,
       disk, n, kInf, false, co},
      {"forms q=1 square d*_V(phi vol), V=|x|^2/2, n", coexact_1form(sq_phi, q1, "d*_V(x(1-x)y(1-y) vol)", n), q1, sq,
       n, kInf, false, co},
      {"forms q=2 disk (1-|x|^2) vol, V=|x|^2, n", catalog_form("bubble_top_form"), q2, disk, n, kInf, false, cl},
      {"forms q=2 disk shifted vol, V=|x|^2/4, t", catalog_form("shifted_top_form"), qh, disk, t, kInf, false, cl},
      {"forms q=2 square bubble vol, V=|x|^2/2, n", catalog_form("square_bubble_top_form"), q1, sq, n, kInf, false,
       cl},
      // hypotheses violated: never a pass
      {"scalar disk x1, double well, n", x1, Potential::quartic_double_well(1.0), disk, n, kInf, true, co, false},
      {"scalar notched L x1, V=|x|^2/2, n", x1, q1, domain_preset("lshape_notch"), n, kInf, true, co, false},
      {"scalar annulus x1, V=|x|^2/2, n", x1, q1, domain_preset("annulus"), n, kInf, true, co, false},
      {"scalar disk 1-|x|^2, V=|x|^2, t", bubble, q2, disk, t, kInf, true, co, false},
      {"scalar interval 1-x^2, V=x^2/2, t",
       declared(scalar_form(1, [](const Jet& x, const Jet&) { return 1.0 - x * x; }), t, "1 - x^2"), q1, I, t, kInf,
       true, co, false},
      {"scalar disk x1, V=0, n, N=2", x1, Potential::zero(), disk, n, 2.0, true, co, false},
      {"forms q=1 disk d((1-|x|^2)^2), V=|x|^2, n (p=0)", closed_1form, q2, disk, n, kInf, false, cl, false},
      {"forms q=1 disk d*_V((1-|x|^2)^2 vol), V=|x|^2, t (p=2)",
       coexact_1form(bubble_sq, q2, "d*_V((1-|x|^2)^2 vol)", t), q2, disk, t, kInf, false, co, false},
  };
  return s;
}

CheckRecord run_inequality_case(const InequalityCase& c, int quad_order, double mesh_h) {
  CheckRecord r = c.scalar ? check_bl_scalar(c.w, c.V, c.spec, c.b, c.N, quad_order)
                           : check_bl_forms(c.w, c.V, c.spec, c.b, c.variant, quad_order, mesh_h);
  r.case_name = c.name;
  return r;
}

}  // namespace whodge
