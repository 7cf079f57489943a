#pragma once

#include <chrono>

#include "whodge/error.hpp"
#include "whodge/exterior.hpp"
#include "whodge/verify.hpp"

namespace whodge::detail {

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double ms() const {
    if (!record_timing()) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

inline Eigen::VectorXd normal_of(const BoundaryPoint& bp, int n) {
  Eigen::VectorXd v(n);
  v[0] = bp.normal[0];
  if (n > 1) v[1] = bp.normal[1];
  return v;
}

inline void require_dims(const AnalyticForm& w, const DomainSpec& spec) {
  if (w.n != spec.ambient_dim) throw ValidationError("form", "form dimension does not match the domain");
}

// The form must carry b (or no declaration) and satisfy b w = 0.
inline void require_bc(const AnalyticForm& w, const DomainSpec& spec, Realization b, int quad_order) {
  if (w.declared != Realization::none && w.declared != b)
    throw ValidationError("form.declared", std::string("form '") + w.name + "' is declared " +
                                               to_string(w.declared) + " but checked as " + to_string(b));
  if (b == Realization::none) {
    if (spec.has_boundary())
      throw ValidationError("b", "a boundary condition is required on domains with boundary");
    return;
  }
  AnalyticForm c = w;
  c.declared = b;
  validate_declared_bc(c, spec, quad_order);
}

inline AnalyticForm weighted_picture(const AnalyticForm& w, const Potential& V) {
  const ScalarFn vf = V.fn();
  AnalyticForm u = multiply(w, [vf](const Jet& x, const Jet& y) { return exp(0.5 * vf(x, y)); });
  u.name = "e^f " + w.name;
  return u;
}

// Filleted polygons have no exact-domain rule; a fine mesh rule stands in.
inline std::vector<QuadPoint> domain_rule(const DomainSpec& spec, int quad_order) {
  if (spec.kind == DomainKind::polygon && spec.fillet > 0)
    return mesh_interior_rule(generate_mesh(spec, 0.05), quad_order);
  return analytic_interior_rule(spec, quad_order);
}

}  // namespace whodge::detail
