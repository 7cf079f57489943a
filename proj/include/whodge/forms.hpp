#pragma once

// Analytic differential forms in the Cartesian frame of R^n, n in {1, 2}.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "whodge/jet.hpp"
#include "whodge/mesh.hpp"
#include "whodge/potential.hpp"

namespace whodge {

enum class Realization { tangential, normal, none };

const char* to_string(Realization b);
Realization realization_from_string(const std::string& s);

// Component k multiplies e_I for the k-th increasing multi-index I of
// ext::basis(n, p). Component functions must be called with coordinate jets
// (Jet::variable); derived forms rely on that to re-expand at higher order.
struct AnalyticForm {
  int p = 0;
  int n = 1;
  std::vector<ScalarFn> components;
  Realization declared = Realization::none;
  std::string name;

  int size() const { return static_cast<int>(components.size()); }
  std::vector<Jet> jets(const Point& x, int order) const;
  Eigen::VectorXd value(const Point& x) const;
  // Row k holds the gradient of component k.
  Eigen::MatrixXd jacobian(const Point& x) const;
};

AnalyticForm zero_form(int n, int p);
AnalyticForm scalar_form(int n, ScalarFn f, std::string name = "");
// g * vol on R^n
AnalyticForm top_form(int n, ScalarFn g, std::string name = "");
AnalyticForm one_form(int n, std::vector<ScalarFn> comps, std::string name = "");

AnalyticForm exterior_derivative(const AnalyticForm& w);
// d*_V w = d* w + i_{∇V} w, the adjoint of d in L^2(e^{-V} dx).
AnalyticForm codifferential(const AnalyticForm& w, const Potential& V);
AnalyticForm multiply(const AnalyticForm& w, ScalarFn g);
AnalyticForm scale(const AnalyticForm& w, double s);
AnalyticForm add(const AnalyticForm& a, const AnalyticForm& b);

// Max over the points of |t w| (tangential) or |n w| (normal).
double boundary_residual(const AnalyticForm& w, Realization b, const BoundaryGeometry& g);
// Throws ValidationError when the declared condition fails by more than 1e-10
// on the analytic boundary rule.
void validate_declared_bc(const AnalyticForm& w, const DomainSpec& spec, int quad_order);

}  // namespace whodge
