#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "whodge/calculus.hpp"

namespace whodge {

struct SpectralResult {
  std::vector<double> eigenvalues;  // ascending
  std::vector<Cochain> eigenvectors;  // M-orthonormal
  int kernel_dim = 0;
  double kernel_threshold = 0.0;
  double lambda_max_estimate = 0.0;
  std::vector<double> residual_norms;  // ‖S v - λ M v‖_{M^-1}
  int iterations = 0;
  double tol = 0.0;
  double shift = 0.0;
  std::uint64_t seed = 0;
  double mesh_h = 0.0;

  nlohmann::json to_json() const;
};

constexpr std::uint64_t kDefaultSeed = 20240607;

// Block subspace iteration on (S - σM)^{-1} M with Rayleigh-Ritz, σ = -1.
// Throws ConvergenceError with the best residuals after 500 sweeps.
SpectralResult lowest_eigenpairs(const AssembledOperator& op, int k, double tol = 1e-8,
                                 std::uint64_t seed = kDefaultSeed);

// Power iteration bound for the largest eigenvalue of M^{-1} S.
double lambda_max_estimate(const AssembledOperator& op, std::uint64_t seed = kDefaultSeed);

class KernelProjector {
 public:
  Eigen::MatrixXd basis;  // M-orthonormal columns
  SpMat M;
  double threshold = 0.0;
  std::vector<double> window;  // computed eigenvalues around the gap

  int dim() const { return static_cast<int>(basis.cols()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd complement(const Eigen::VectorXd& x) const { return x - apply(x); }
};

// kernel_threshold <= 0 selects 1e-8 * lambda_max_estimate. Throws Error when
// λ_{dim+1} <= 10 * threshold (no clean gap).
KernelProjector kernel_projector(const AssembledOperator& op, double kernel_threshold = 0.0);

struct HodgeSplit {
  Cochain kernel_part, exact_part, coexact_part;
  double recomposition = 0.0;      // ‖sum - x‖_M / ‖x‖_M
  double kernel_exact = 0.0;       // |<a, b>_M| / ‖x‖_M^2
  double kernel_coexact = 0.0;
  double exact_coexact = 0.0;
  int iterations = 0;
};

HodgeSplit hodge_decompose(const Cochain& x, const AssembledOperator& op, const KernelProjector* proj = nullptr,
                           double tol = 1e-12);

struct RangeSolve {
  Cochain w;
  int iterations = 0;
  double residual = 0.0;  // ‖S w - M rhs‖_{M^-1} / ‖rhs‖_M
};

// Solves L^{(p+1)} w = rhs on the kernel complement by conjugate gradients
// preconditioned with the mass matrix, deflating the kernel every step.
RangeSolve solve_on_range(const AssembledOperator& op, const Cochain& rhs, double tol = 1e-12,
                          const KernelProjector* proj = nullptr, int max_iter = 20000);

struct IntertwiningReport {
  double max_residual = 0.0;  // max ‖L^{(p+1)} D x - D L^{(p)} x‖ / ‖L^{(p)} x‖
  int samples = 0;
  bool within_contract = false;  // max_residual <= 1e-10
};

IntertwiningReport check_intertwining(const AssembledOperator& op_p, const AssembledOperator& op_next,
                                      int samples = 10, std::uint64_t seed = kDefaultSeed);

}  // namespace whodge
