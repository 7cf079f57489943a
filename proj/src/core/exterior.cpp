#include "whodge/exterior.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace whodge::ext {

int binom(int n, int p) {
  if (p < 0 || p > n) return 0;
  int r = 1;
  for (int k = 1; k <= p; ++k) r = r * (n - k + 1) / k;
  return r;
}

namespace {

void enumerate(int n, int p, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == p) {
    out.push_back(cur);
    return;
  }
  for (int k = start; k < n; ++k) {
    cur.push_back(k);
    enumerate(n, p, k + 1, cur, out);
    cur.pop_back();
  }
}

constexpr int kMaxDim = 4;

}  // namespace

const std::vector<std::vector<int>>& basis(int n, int p) {
  if (n < 0 || n > kMaxDim || p < 0 || p > n) throw std::out_of_range("exterior basis: bad (n, p)");
  static const auto tables = [] {
    std::array<std::array<std::vector<std::vector<int>>, kMaxDim + 1>, kMaxDim + 1> t;
    for (int nn = 0; nn <= kMaxDim; ++nn)
      for (int pp = 0; pp <= nn; ++pp) {
        std::vector<int> cur;
        enumerate(nn, pp, 0, cur, t[nn][pp]);
      }
    return t;
  }();
  return tables[n][p];
}

int index_of(int n, const std::vector<int>& multi) {
  const auto& b = basis(n, static_cast<int>(multi.size()));
  auto it = std::find(b.begin(), b.end(), multi);
  return it == b.end() ? -1 : static_cast<int>(it - b.begin());
}

Signed wedge_basis(int n, int k, int I, int p) {
  const auto& idx = basis(n, p)[I];
  if (std::find(idx.begin(), idx.end(), k) != idx.end()) return {-1, 0};
  std::vector<int> m = idx;
  int pos = 0;
  while (pos < p && m[pos] < k) ++pos;
  m.insert(m.begin() + pos, k);
  return {index_of(n, m), pos % 2 == 0 ? 1 : -1};
}

Signed interior_basis(int n, int k, int I, int p) {
  const auto& idx = basis(n, p)[I];
  auto it = std::find(idx.begin(), idx.end(), k);
  if (it == idx.end()) return {-1, 0};
  const int pos = static_cast<int>(it - idx.begin());
  std::vector<int> m = idx;
  m.erase(m.begin() + pos);
  return {index_of(n, m), pos % 2 == 0 ? 1 : -1};
}

Eigen::MatrixXd lift(const Eigen::MatrixXd& A, int p) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw std::invalid_argument("lift: A must be square");
  if (p < 0 || p > n) throw std::out_of_range("lift: p out of range");
  const auto& b = basis(n, p);
  const int m = static_cast<int>(b.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  // Column J: image of e_J. Slot s holds e_j; A e_j = sum_i A(i,j) e_i.
  for (int J = 0; J < m; ++J) {
    for (int s = 0; s < p; ++s) {
      const int j = b[J][s];
      for (int i = 0; i < n; ++i) {
        if (A(i, j) == 0.0) continue;
        std::vector<int> m2 = b[J];
        m2[s] = i;
        // Sort with sign; repeated index kills the term.
        int sign = 1;
        bool dup = false;
        for (int a = 0; a < p && !dup; ++a)
          for (int c = a + 1; c < p; ++c) {
            if (m2[a] == m2[c]) {
              dup = true;
              break;
            }
          }
        if (dup) continue;
        for (int a = 0; a < p; ++a)
          for (int c = 0; c + 1 < p - a; ++c)
            if (m2[c] > m2[c + 1]) {
              std::swap(m2[c], m2[c + 1]);
              sign = -sign;
            }
        L(index_of(n, m2), J) += sign * A(i, j);
      }
    }
  }
  return L;
}

Eigen::VectorXd wedge(const Eigen::VectorXd& v, const Eigen::VectorXd& omega, int n, int p) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(binom(n, p + 1));
  for (int I = 0; I < omega.size(); ++I)
    for (int k = 0; k < n; ++k) {
      const Signed s = wedge_basis(n, k, I, p);
      if (s.index >= 0) out[s.index] += s.sign * v[k] * omega[I];
    }
  return out;
}

Eigen::VectorXd interior(const Eigen::VectorXd& v, const Eigen::VectorXd& omega, int n, int p) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(binom(n, p - 1));
  if (p == 0) return out;
  for (int I = 0; I < omega.size(); ++I)
    for (int k = 0; k < n; ++k) {
      const Signed s = interior_basis(n, k, I, p);
      if (s.index >= 0) out[s.index] += s.sign * v[k] * omega[I];
    }
  return out;
}

}  // namespace whodge::ext
