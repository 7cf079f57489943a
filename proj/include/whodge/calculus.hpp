#pragma once

// Whitney-form discretization of the weighted Hodge complex: weighted mass
// matrices, the integer exterior derivative, the weighted codifferential and
// the two boundary realizations of the weighted Laplacian L_V.

#include <Eigen/Sparse>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "whodge/forms.hpp"
#include "whodge/mesh.hpp"
#include "whodge/potential.hpp"

namespace whodge {

using SpMat = Eigen::SparseMatrix<double>;

struct Cochain {
  int degree = 0;
  Realization b = Realization::none;
  Eigen::VectorXd coefficients;
};

// Global simplex ids carrying degrees of freedom: all simplices except, for
// the tangential realization, those on the boundary.
std::vector<int> retained_dofs(const SimplicialComplex& c, int p, Realization b);
Eigen::VectorXd embed(const SimplicialComplex& c, const Cochain& x);
Cochain restrict_to(const SimplicialComplex& c, int p, Realization b, const Eigen::VectorXd& full);

// Values of the Whitney basis functions of the degree-p simplices of top
// element t at barycentric point `bary`. Row a holds the Cartesian components
// of the a-th local basis function; `ids` receives their global simplex ids.
Eigen::MatrixXd whitney_values(const SimplicialComplex& c, int p, int t, const std::array<double, 3>& bary,
                               std::vector<int>& ids);

// Full (unrestricted) weighted mass matrix, consistent quadrature.
// Warnings (e.g. quadrature order below 4 for a nonconstant V) are appended.
SpMat assemble_mass(const SimplicialComplex& c, int p, const Potential& V, int quad_order,
                    std::vector<std::string>* warnings = nullptr);

struct WeightedMeasure {
  Potential potential;
  double Z = 0.0;  // ∫ e^{-V} dμ on the analytic domain
  int quad_order = 0;
};
WeightedMeasure weighted_measure(const DomainSpec& spec, const Potential& V, int quad_order);

struct FactorCache;

// L_V^{b,(p)} = M_p^{-1} S_p with
//   S_p = D_p^T M_{p+1} D_p + M_p D_{p-1} M_{p-1}^{-1} D_{p-1}^T M_p.
// The second term is dense, so S_p is only available as a linear map.
class AssembledOperator {
 public:
  int degree = 0;
  Realization realization = Realization::normal;
  int quad_order = 4;
  std::shared_ptr<const SimplicialComplex> complex;
  Potential potential;

  std::vector<int> dofs_prev, dofs, dofs_next;
  SpMat M_prev, M, M_next;  // restricted weighted masses (empty when absent)
  SpMat D_prev, D;          // restricted incidences (p-1 -> p) and (p -> p+1)
  SpMat K;                  // D^T M_next D
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(dofs.size()); }
  int dim() const { return complex->dim; }

  Eigen::VectorXd apply_S(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_L(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_M(const Eigen::VectorXd& x) const { return M * x; }
  Eigen::VectorXd solve_M(const Eigen::VectorXd& b) const;
  Eigen::VectorXd solve_M_prev(const Eigen::VectorXd& b) const;
  // d*_V on coefficient vectors: M_{p-1}^{-1} D_{p-1}^T M_p x.
  Eigen::VectorXd codiff(const Eigen::VectorXd& x) const;
  // (S - sigma M)^{-1} b through the sparse block system
  //   [K - sigma M,  M D_prev; D_prev^T M, -M_prev].
  // Factorizations are cached per sigma.
  Eigen::VectorXd shift_solve(double sigma, const Eigen::VectorXd& b) const;
  Eigen::MatrixXd dense_S() const;

  std::shared_ptr<FactorCache> cache;
};

AssembledOperator assemble_weighted_laplacian(std::shared_ptr<const SimplicialComplex> c, int p,
                                              const Potential& V, Realization b, int quad_order = 4);

Cochain apply_d(const SimplicialComplex& c, const Cochain& x);
Cochain apply_codifferential_V(const Cochain& x, const AssembledOperator& op);

struct DualProblem {
  int degree = 0;
  Realization b = Realization::normal;
  Potential potential;
};
// Hodge star: (p, normal, V) <-> (n - p, tangential, -V).
DualProblem dual_problem(int n, int p, Realization b, const Potential& V);

struct AnalyticValue {
  double value = 0.0;
  double refined = 0.0;  // same integral at twice the quadrature order
  bool converged = true;  // |value - refined| <= 1e-6 |refined|
};
// ∫ |dw|^2 e^{-V} + ∫ |d*_V w|^2 e^{-V} on the analytic domain.
AnalyticValue quadratic_form_analytic(const AnalyticForm& w, const Potential& V, const DomainSpec& spec,
                                      int quad_order);

// de Rham map: integrals of w over the oriented simplices.
Cochain interpolate(const SimplicialComplex& c, const AnalyticForm& w, Realization b, int quad_order = 10);

// Largest relative gap between the spectrum of L and its flat Witten
// conjugate E^{1/2} L E^{-1/2}, E = e^{-V} at simplex barycenters. Dense;
// meant for coarse meshes.
double witten_conjugation_residual(const AssembledOperator& op);

void write_cochain_csv(std::ostream& os, const SimplicialComplex& c, const Cochain& x);

}  // namespace whodge
