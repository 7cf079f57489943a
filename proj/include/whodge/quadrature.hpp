#pragma once

#include <array>
#include <vector>

namespace whodge::quad {

struct Rule1D {
  std::vector<double> x;  // nodes in [0, 1]
  std::vector<double> w;  // weights summing to 1
};

struct RuleTri {
  std::vector<std::array<double, 3>> bary;  // barycentric coordinates
  std::vector<double> w;                    // weights summing to 1
};

// Gauss-Legendre with m nodes mapped to [0, 1].
const Rule1D& gauss_legendre(int m);
// Number of Gauss nodes exact for polynomials of degree `order`.
int nodes_for_order(int order);
// Exact on [0,1] for polynomials of degree `order`.
const Rule1D& segment_rule(int order);
// Collapsed-Gauss rule exact on the reference triangle for degree `order`.
const RuleTri& triangle_rule(int order);

}  // namespace whodge::quad
