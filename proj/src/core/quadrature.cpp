#include "whodge/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace whodge::quad {

namespace {

Rule1D compute_gl(int m) {
  Rule1D r;
  r.x.resize(m);
  r.w.resize(m);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= m; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      const double dp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) {
        double q0 = 1.0, q1 = 0.0;
        for (int k = 1; k <= m; ++k) {
          const double q2 = q1;
          q1 = q0;
          q0 = ((2.0 * k - 1.0) * z * q1 - (k - 1.0) * q2) / k;
        }
        const double d = m * (z * q0 - q1) / (z * z - 1.0);
        r.w[m - 1 - i] = 1.0 / ((1.0 - z * z) * d * d);
        r.x[m - 1 - i] = 0.5 * (1.0 + z);
        break;
      }
    }
  }
  return r;
}

std::mutex g_mutex;

}  // namespace

const Rule1D& gauss_legendre(int m) {
  if (m < 1 || m > 64) throw std::out_of_range("gauss_legendre: node count out of range");
  static std::map<int, Rule1D> cache;
  std::lock_guard<std::mutex> lock(g_mutex);
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, compute_gl(m)).first;
  return it->second;
}

int nodes_for_order(int order) { return order < 1 ? 1 : order / 2 + 1; }

const Rule1D& segment_rule(int order) { return gauss_legendre(nodes_for_order(order)); }

const RuleTri& triangle_rule(int order) {
  static std::map<int, RuleTri> cache;
  const int m = nodes_for_order(order + 1);
  const Rule1D& g = gauss_legendre(m);
  std::lock_guard<std::mutex> lock(g_mutex);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  // Duffy map (u, v) -> (u, (1-u) v); Jacobian (1-u). Area of reference triangle 1/2.
  RuleTri r;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double u = g.x[i], v = g.x[j];
      const double s = u, t = (1.0 - u) * v;
      r.bary.push_back({1.0 - s - t, s, t});
      r.w.push_back(2.0 * g.w[i] * g.w[j] * (1.0 - u));
    }
  return cache.emplace(m, std::move(r)).first->second;
}

}  // namespace whodge::quad
