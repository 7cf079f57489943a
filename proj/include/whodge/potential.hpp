#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "whodge/jet.hpp"
#include "whodge/mesh.hpp"

namespace whodge {

// Smooth potential V on the plane (1D domains read it along y = 0). All
// evaluators return the effective potential V / h_param.
class Potential {
 public:
  struct Term {
    int i = 0, j = 0;  // c * x^i * y^j
    double c = 0.0;
  };

  Potential();  // zero
  static Potential zero();
  static Potential quadratic(double alpha);          // alpha |x|^2 / 2
  static Potential quartic_double_well(double a);    // (|x|^2 - a^2)^2 / 4
  static Potential linear(double c);                 // c x_1
  static Potential polynomial(std::vector<Term> terms);
  static Potential custom(std::string name, ScalarFn fn, bool constant = false);
  // "zero", "quadratic(1.5)", "quartic_double_well(1)", "linear(-2)".
  static Potential parse(const std::string& text);
  static std::vector<std::string> preset_names();

  const std::string& name() const { return name_; }
  double h_param() const { return h_; }
  Potential with_h(double h) const;
  Potential negated() const;
  bool is_constant() const { return constant_; }
  const std::vector<Term>& terms() const { return terms_; }

  Jet jet(const Point& x, int order) const;
  double value(const Point& x) const;
  double weight(const Point& x) const { return std::exp(-value(x)); }
  Eigen::VectorXd gradient(const Point& x, int n) const;
  Eigen::MatrixXd hessian(const Point& x, int n) const;
  double laplacian(const Point& x, int n) const;  // trace of the Hessian

  // Raw function of V / h_param for building derived analytic fields.
  ScalarFn fn() const;

 private:
  std::string name_;
  ScalarFn base_;
  double h_ = 1.0;
  double sign_ = 1.0;
  bool constant_ = true;
  std::vector<Term> terms_;
};

struct ConsistencyReport {
  double grad_err = 0.0;  // max |FD(V) - ∇V| / (1 + |∇V|)
  double hess_err = 0.0;  // max |FD(∇V) - HessV| / (1 + |HessV|)
  double lap_err = 0.0;   // max |ΔV - tr HessV|
};
// Central differences at `samples` points drawn uniformly from [-1,1]^n.
ConsistencyReport check_consistency(const Potential& V, int n, int samples, std::uint64_t seed);

}  // namespace whodge
