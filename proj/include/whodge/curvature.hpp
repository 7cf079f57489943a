#pragma once

// Pointwise symmetric endomorphisms of Λ^p in the Cartesian frame: lifts,
// Hess^(p) V, Ric^(p), the boundary operators K_b^(p) and the N-dimensional
// Bakry-Émery tensor.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "whodge/forms.hpp"
#include "whodge/mesh.hpp"
#include "whodge/potential.hpp"

namespace whodge {

enum class Support { interior, boundary };

struct SamplePoint {
  Point x{};
  Point normal{};  // boundary samples only
  double k1 = 0.0;
  double trace_k1 = 0.0;
};
SamplePoint interior_sample(const Point& x);
SamplePoint boundary_sample(const BoundaryPoint& b);
std::vector<SamplePoint> boundary_samples(const BoundaryGeometry& g);
std::vector<SamplePoint> interior_samples(const std::vector<QuadPoint>& q);

struct EndomorphismField {
  int degree = 0;
  int dim = 1;
  Support support = Support::interior;
  std::string name;
  std::function<Eigen::MatrixXd(const SamplePoint&)> fn;

  // Throws Error if the value is not symmetric to 1e-12.
  Eigen::MatrixXd operator()(const SamplePoint& s) const;
};

EndomorphismField constant_field(const Eigen::MatrixXd& A, int p, std::string name = "const");
EndomorphismField zero_field(int n, int p, Support s = Support::interior);
EndomorphismField add(const EndomorphismField& a, const EndomorphismField& b);

EndomorphismField lift_endomorphism(const EndomorphismField& A, int p);
EndomorphismField hessian_p(const Potential& V, int n, int p);

struct CurvatureData {
  EndomorphismField ric1;  // zero on every supported flat domain
  BoundaryGeometry boundary;
};
CurvatureData flat_curvature(int n, BoundaryGeometry boundary);
EndomorphismField ricci_p(const CurvatureData& curv, int p);

// N in (-inf, 0] ∪ [n, +inf]; N = n only for constant V. Throws DomainError.
void check_admissible_N(double N, int n, const Potential& V);
// Ric + Hess V - ∇V ⊗ ∇V / (N - n) on 1-forms.
EndomorphismField bakry_emery_tensor(const Potential& V, int n, double N);
// (N - 1) / N with the limits 1 at N = +inf and +inf at N = 0.
double bl_factor(double N);

EndomorphismField boundary_operator(Realization b, int n, int p);

// Orthonormal columns spanning the p-forms the boundary hypothesis is tested
// on at a boundary sample: tangential forms (i_n w = 0) for b = normal and
// normal forms (n♭ ∧ Λ^{p-1}) for b = tangential.
Eigen::MatrixXd hypothesis_subspace(Realization b, int n, int p, const SamplePoint& s);

struct MinEig {
  double value = 0.0;
  SamplePoint where{};
};
MinEig min_eigenvalue(const EndomorphismField& f, const std::vector<SamplePoint>& samples);

// Pointwise inverse; throws PositivityViolation (witness, min eigenvalue)
// when some sample has min-eig < positivity_tol.
EndomorphismField invert_endo_field(const EndomorphismField& f, const std::vector<SamplePoint>& samples,
                                    double positivity_tol = 1e-10);

nlohmann::json sample_table(const EndomorphismField& f, const std::vector<SamplePoint>& samples);

}  // namespace whodge
