#pragma once

// Combinatorics of Λ^p(R^n) in the standard basis e_I, I increasing.

#include <Eigen/Dense>
#include <vector>

namespace whodge::ext {

int binom(int n, int p);
// Increasing multi-indices of length p in {0..n-1}, lexicographic.
const std::vector<std::vector<int>>& basis(int n, int p);
int index_of(int n, const std::vector<int>& multi);

struct Signed {
  int index;  // -1 when the result vanishes
  int sign;
};
// e_k ∧ e_I
Signed wedge_basis(int n, int k, int I, int p);
// i_{e_k} e_I
Signed interior_basis(int n, int k, int I, int p);

// Lift of a 1-form endomorphism: acts on e_I as the sum over slots.
Eigen::MatrixXd lift(const Eigen::MatrixXd& A, int p);

// Components of v^♭ ∧ ω and i_v ω for a p-form ω.
Eigen::VectorXd wedge(const Eigen::VectorXd& v, const Eigen::VectorXd& omega, int n, int p);
Eigen::VectorXd interior(const Eigen::VectorXd& v, const Eigen::VectorXd& omega, int n, int p);

}  // namespace whodge::ext
