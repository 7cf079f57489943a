#include "whodge/calculus.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "whodge/error.hpp"
#include "whodge/exterior.hpp"
#include "whodge/quadrature.hpp"
#include "whodge/util.hpp"

namespace whodge {

std::vector<int> retained_dofs(const SimplicialComplex& c, int p, Realization b) {
  std::vector<int> ids;
  ids.reserve(c.count(p));
  for (int i = 0; i < c.count(p); ++i)
    if (b != Realization::tangential || !c.boundary_marker[p][i]) ids.push_back(i);
  return ids;
}

namespace {

SpMat selector(const std::vector<int>& ids, int full) {
  SpMat R(static_cast<int>(ids.size()), full);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) t.emplace_back(static_cast<int>(i), ids[i], 1.0);
  R.setFromTriplets(t.begin(), t.end());
  return R;
}

void check_realization(const SimplicialComplex& c, Realization b) {
  if (b == Realization::none && c.domain.has_boundary())
    throw UnsupportedRealization(
        "realization 'none' needs an empty boundary; use tangential, or normal (dual_problem maps a normal "
        "problem to the tangential one of degree n - p with potential -V)");
}

}  // namespace

Eigen::VectorXd embed(const SimplicialComplex& c, const Cochain& x) {
  const auto ids = retained_dofs(c, x.degree, x.b);
  if (static_cast<int>(ids.size()) != x.coefficients.size())
    throw ValidationError("cochain", "coefficient length does not match the realization");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(c.count(x.degree));
  for (std::size_t i = 0; i < ids.size(); ++i) full[ids[i]] = x.coefficients[static_cast<int>(i)];
  return full;
}

Cochain restrict_to(const SimplicialComplex& c, int p, Realization b, const Eigen::VectorXd& full) {
  const auto ids = retained_dofs(c, p, b);
  Cochain x{p, b, Eigen::VectorXd(static_cast<int>(ids.size()))};
  for (std::size_t i = 0; i < ids.size(); ++i) x.coefficients[static_cast<int>(i)] = full[ids[i]];
  return x;
}

Eigen::MatrixXd whitney_values(const SimplicialComplex& c, int p, int t, const std::array<double, 3>& bary,
                               std::vector<int>& ids) {
  const int n = c.dim;
  const auto P = c.simplex_points(n, t);
  const auto& tv = c.simplices[n][t];
  ids.clear();
  if (p == n) {
    ids.push_back(t);
    Eigen::MatrixXd v(1, 1);
    v(0, 0) = 1.0 / c.top_volume(t);
    return v;
  }
  if (p == 0) {
    Eigen::MatrixXd v(n + 1, 1);
    for (int k = 0; k <= n; ++k) {
      ids.push_back(tv[k]);
      v(k, 0) = bary[k];
    }
    return v;
  }
  // p = 1, n = 2: λ_a ∇λ_b - λ_b ∇λ_a for the edge (a, b).
  Eigen::Matrix2d J;
  J << P[1][0] - P[0][0], P[2][0] - P[0][0], P[1][1] - P[0][1], P[2][1] - P[0][1];
  const Eigen::Matrix2d Ji = J.inverse();
  Eigen::Vector2d g[3];
  g[1] = Ji.row(0).transpose();
  g[2] = Ji.row(1).transpose();
  g[0] = -(g[1] + g[2]);
  auto local = [&](int v) {
    for (int k = 0; k < 3; ++k)
      if (tv[k] == v) return k;
    throw Error("whitney_values: edge vertex not in element");
  };
  Eigen::MatrixXd v(3, 2);
  for (int k = 0; k < 3; ++k) {
    const int e = c.faces[2][t][k];
    ids.push_back(e);
    const int a = local(c.simplices[1][e][0]), b = local(c.simplices[1][e][1]);
    v.row(k) = (bary[a] * g[b] - bary[b] * g[a]).transpose();
  }
  return v;
}

SpMat assemble_mass(const SimplicialComplex& c, int p, const Potential& V, int quad_order,
                    std::vector<std::string>* warnings) {
  if (p < 0 || p > c.dim) throw ValidationError("p", "degree out of range");
  if (quad_order < 2) throw ValidationError("quad_order", "must be at least 2");
  if (warnings && !V.is_constant() && quad_order < 4)
    warnings->push_back("quad_order " + std::to_string(quad_order) + " is low for nonconstant potential " +
                        V.name());
  const int n = c.dim, tops = c.count(n);
  const int m = ext::binom(n + 1, p + 1);  // local basis size
  std::vector<std::array<double, 9>> elem(tops);
  std::vector<std::array<int, 3>> elem_ids(tops);

  std::vector<std::array<double, 3>> bary;
  std::vector<double> wq;
  if (n == 1) {
    const auto& r = quad::segment_rule(quad_order);
    for (std::size_t i = 0; i < r.x.size(); ++i) bary.push_back({1.0 - r.x[i], r.x[i], 0.0}), wq.push_back(r.w[i]);
  } else {
    const auto& r = quad::triangle_rule(quad_order);
    bary = r.bary;
    wq = r.w;
  }

  auto work = [&](int begin, int end) {
    std::vector<int> ids;
    for (int t = begin; t < end; ++t) {
      const auto P = c.simplex_points(n, t);
      const double vol = c.top_volume(t);
      std::array<double, 9> A{};
      for (std::size_t q = 0; q < wq.size(); ++q) {
        const auto& l = bary[q];
        Point x{0.0, 0.0};
        for (int k = 0; k <= n; ++k) x[0] += l[k] * P[k][0], x[1] += l[k] * P[k][1];
        const double w = wq[q] * vol * V.weight(wrap_point(c.domain, x));
        if (!std::isfinite(w)) throw DomainError("non-finite weight in mass assembly");
        const Eigen::MatrixXd phi = whitney_values(c, p, t, l, ids);
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) A[a * m + b] += w * phi.row(a).dot(phi.row(b));
      }
      elem[t] = A;
      for (int a = 0; a < m; ++a) elem_ids[t][a] = ids[a];
    }
  };

  const int nt = std::min(thread_count(), std::max(1, tops / 256));
  if (nt <= 1) {
    work(0, tops);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    for (int k = 0; k < nt; ++k)
      pool.emplace_back([&, k] {
        try {
          work(k * tops / nt, (k + 1) * tops / nt);
        } catch (...) {
          errs[k] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(tops) * m * m);
  for (int t = 0; t < tops; ++t)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) trip.emplace_back(elem_ids[t][a], elem_ids[t][b], elem[t][a * m + b]);
  SpMat M(c.count(p), c.count(p));
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

WeightedMeasure weighted_measure(const DomainSpec& spec, const Potential& V, int quad_order) {
  WeightedMeasure wm{V, 0.0, quad_order};
  for (const auto& q : analytic_interior_rule(spec, quad_order)) wm.Z += q.w * V.weight(q.x);
  if (!(wm.Z > 0) || !std::isfinite(wm.Z)) throw DomainError("normalization Z is not positive and finite");
  return wm;
}

// ---------------------------------------------------------------------------

struct ShiftFactor {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  Eigen::SparseLU<SpMat> lu;
  bool use_lu = false;
};

struct FactorCache {
  Eigen::SimplicialLLT<SpMat> mass, mass_prev;
  std::mutex mu;
  std::map<double, std::shared_ptr<ShiftFactor>> shifts;
};

AssembledOperator assemble_weighted_laplacian(std::shared_ptr<const SimplicialComplex> cp, int p,
                                              const Potential& V, Realization b, int quad_order) {
  const SimplicialComplex& c = *cp;
  if (p < 0 || p > c.dim) throw ValidationError("p", "degree out of range");
  check_realization(c, b);
  AssembledOperator op;
  op.degree = p;
  op.realization = b;
  op.quad_order = quad_order;
  op.complex = cp;
  op.potential = V;
  op.cache = std::make_shared<FactorCache>();

  op.dofs = retained_dofs(c, p, b);
  const SpMat R = selector(op.dofs, c.count(p));
  op.M = R * assemble_mass(c, p, V, quad_order, &op.warnings) * R.transpose();
  op.cache->mass.compute(op.M);
  if (op.cache->mass.info() != Eigen::Success) throw Error("mass matrix is not positive definite");
  if (p > 0) {
    op.dofs_prev = retained_dofs(c, p - 1, b);
    const SpMat Rp = selector(op.dofs_prev, c.count(p - 1));
    op.M_prev = Rp * assemble_mass(c, p - 1, V, quad_order) * Rp.transpose();
    op.D_prev = R * incidence_matrix(c, p - 1).entries.cast<double>() * Rp.transpose();
    op.cache->mass_prev.compute(op.M_prev);
    if (op.cache->mass_prev.info() != Eigen::Success) throw Error("mass matrix is not positive definite");
  }
  if (p < c.dim) {
    op.dofs_next = retained_dofs(c, p + 1, b);
    const SpMat Rn = selector(op.dofs_next, c.count(p + 1));
    op.M_next = Rn * assemble_mass(c, p + 1, V, quad_order) * Rn.transpose();
    op.D = Rn * incidence_matrix(c, p).entries.cast<double>() * R.transpose();
    op.K = SpMat(op.D.transpose() * op.M_next * op.D);
  } else {
    op.K = SpMat(op.size(), op.size());
  }
  return op;
}

Eigen::VectorXd AssembledOperator::solve_M(const Eigen::VectorXd& b) const { return cache->mass.solve(b); }

Eigen::VectorXd AssembledOperator::solve_M_prev(const Eigen::VectorXd& b) const {
  if (degree == 0) throw Error("no degree p-1 space");
  return cache->mass_prev.solve(b);
}

Eigen::VectorXd AssembledOperator::codiff(const Eigen::VectorXd& x) const {
  if (degree == 0) throw ValidationError("p", "codifferential of a 0-cochain");
  return solve_M_prev(D_prev.transpose() * (M * x));
}

Eigen::VectorXd AssembledOperator::apply_S(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = K * x;
  if (degree > 0) y += M * (D_prev * codiff(x));
  return y;
}

Eigen::VectorXd AssembledOperator::apply_L(const Eigen::VectorXd& x) const { return solve_M(apply_S(x)); }

Eigen::VectorXd AssembledOperator::shift_solve(double sigma, const Eigen::VectorXd& b) const {
  std::shared_ptr<ShiftFactor> f;
  const int m = size();
  const int mp = degree > 0 ? static_cast<int>(dofs_prev.size()) : 0;
  {
    std::lock_guard<std::mutex> lock(cache->mu);
    auto& slot = cache->shifts[sigma];
    if (!slot) {
      slot = std::make_shared<ShiftFactor>();
      std::vector<Eigen::Triplet<double>> t;
      auto put = [&t](const SpMat& A, int r0, int c0, double s) {
        for (int k = 0; k < A.outerSize(); ++k)
          for (SpMat::InnerIterator it(A, k); it; ++it) t.emplace_back(r0 + it.row(), c0 + it.col(), s * it.value());
      };
      put(K, 0, 0, 1.0);
      put(M, 0, 0, -sigma);
      if (mp > 0) {
        const SpMat B = M * D_prev;
        put(B, 0, m, 1.0);
        put(SpMat(B.transpose()), m, 0, 1.0);
        put(M_prev, m, m, -1.0);
      }
      SpMat A(m + mp, m + mp);
      A.setFromTriplets(t.begin(), t.end());
      slot->ldlt.compute(A);
      if (slot->ldlt.info() != Eigen::Success) {
        slot->use_lu = true;
        slot->lu.compute(A);
        if (slot->lu.info() != Eigen::Success) throw Error("shift-invert factorization failed");
      }
    }
    f = slot;
  }
  auto raw = [&](const Eigen::VectorXd& r) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + mp);
    rhs.head(m) = r;
    const Eigen::VectorXd s = f->use_lu ? Eigen::VectorXd(f->lu.solve(rhs)) : Eigen::VectorXd(f->ldlt.solve(rhs));
    return Eigen::VectorXd(s.head(m));
  };
  Eigen::VectorXd x = raw(b);
  for (int it = 0; it < 2; ++it) x += raw(b - (apply_S(x) - sigma * (M * x)));
  return x;
}

Eigen::MatrixXd AssembledOperator::dense_S() const {
  Eigen::MatrixXd S = Eigen::MatrixXd(K);
  if (degree > 0) {
    const Eigen::MatrixXd B = Eigen::MatrixXd(M * D_prev);
    const Eigen::MatrixXd Mp = Eigen::MatrixXd(M_prev);
    S += B * Mp.llt().solve(B.transpose());
  }
  return 0.5 * (S + S.transpose());
}

// ---------------------------------------------------------------------------

Cochain apply_d(const SimplicialComplex& c, const Cochain& x) {
  if (x.degree < 0 || x.degree >= c.dim) throw ValidationError("degree", "apply_d needs p < dim");
  const Eigen::VectorXd full = incidence_matrix(c, x.degree).entries.cast<double>() * embed(c, x);
  return restrict_to(c, x.degree + 1, x.b, full);
}

Cochain apply_codifferential_V(const Cochain& x, const AssembledOperator& op) {
  if (x.degree != op.degree || x.b != op.realization)
    throw ValidationError("cochain", "degree or realization does not match the operator");
  if (x.degree == 0) throw ValidationError("degree", "codifferential needs p >= 1");
  return {x.degree - 1, x.b, op.codiff(x.coefficients)};
}

DualProblem dual_problem(int n, int p, Realization b, const Potential& V) {
  if (p < 0 || p > n) throw ValidationError("p", "degree out of range");
  const Realization rb = b == Realization::normal       ? Realization::tangential
                         : b == Realization::tangential ? Realization::normal
                                                        : Realization::none;
  return {n - p, rb, V.negated()};
}

AnalyticValue quadratic_form_analytic(const AnalyticForm& w, const Potential& V, const DomainSpec& spec,
                                      int quad_order) {
  const bool has_d = w.p < w.n, has_ds = w.p > 0;
  const AnalyticForm dw = has_d ? exterior_derivative(w) : AnalyticForm{};
  const AnalyticForm dsw = has_ds ? codifferential(w, V) : AnalyticForm{};
  auto integrate = [&](int order) {
    double s = 0.0;
    for (const auto& q : analytic_interior_rule(spec, order)) {
      double v = 0.0;
      if (has_d) v += dw.value(q.x).squaredNorm();
      if (has_ds) v += dsw.value(q.x).squaredNorm();
      s += q.w * V.weight(q.x) * v;
    }
    return s;
  };
  AnalyticValue r;
  r.value = integrate(quad_order);
  r.refined = integrate(2 * quad_order);
  r.converged = std::abs(r.value - r.refined) <= 1e-6 * std::abs(r.refined) + 1e-300;
  return r;
}

Cochain interpolate(const SimplicialComplex& c, const AnalyticForm& w, Realization b, int quad_order) {
  if (w.n != c.dim) throw ValidationError("form", "form dimension does not match the complex");
  const int p = w.p;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(c.count(p));
  const auto& seg = quad::segment_rule(quad_order);
  const auto& tri = quad::triangle_rule(quad_order);
  for (int i = 0; i < c.count(p); ++i) {
    const auto P = c.simplex_points(p, i);
    if (p == 0) {
      full[i] = w.value(P[0])[0];
    } else if (p == 1) {
      const double tx = P[1][0] - P[0][0], ty = P[1][1] - P[0][1];
      double s = 0.0;
      for (std::size_t q = 0; q < seg.x.size(); ++q) {
        const Point x{P[0][0] + seg.x[q] * tx, P[0][1] + seg.x[q] * ty};
        const Eigen::VectorXd v = w.value(x);
        s += seg.w[q] * (v[0] * tx + (c.dim > 1 ? v[1] * ty : 0.0));
      }
      full[i] = s;
    } else {
      const double A = c.top_volume(i);
      double s = 0.0;
      for (std::size_t q = 0; q < tri.w.size(); ++q) {
        const auto& l = tri.bary[q];
        const Point x{l[0] * P[0][0] + l[1] * P[1][0] + l[2] * P[2][0], l[0] * P[0][1] + l[1] * P[1][1] + l[2] * P[2][1]};
        s += tri.w[q] * w.value(x)[0];
      }
      full[i] = A * s;
    }
  }
  return restrict_to(c, p, b, full);
}

double witten_conjugation_residual(const AssembledOperator& op) {
  const SimplicialComplex& c = *op.complex;
  const Eigen::MatrixXd S = op.dense_S();
  const Eigen::MatrixXd M = Eigen::MatrixXd(op.M);
  const Eigen::MatrixXd L = M.llt().solve(S);
  Eigen::VectorXd e(op.size());
  for (int i = 0; i < op.size(); ++i) {
    const auto P = c.simplex_points(op.degree, op.dofs[i]);
    Point x{0.0, 0.0};
    for (int k = 0; k <= op.degree; ++k) x[0] += P[k][0] / (op.degree + 1), x[1] += P[k][1] / (op.degree + 1);
    e[i] = std::sqrt(op.potential.weight(wrap_point(c.domain, x)));
  }
  const Eigen::MatrixXd W = e.asDiagonal() * L * e.cwiseInverse().asDiagonal();
  Eigen::VectorXd a = Eigen::EigenSolver<Eigen::MatrixXd>(W, false).eigenvalues().real();
  Eigen::VectorXd b = Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd>(S, M, Eigen::EigenvaluesOnly).eigenvalues();
  std::sort(a.data(), a.data() + a.size());
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

void write_cochain_csv(std::ostream& os, const SimplicialComplex& c, const Cochain& x) {
  const auto ids = retained_dofs(c, x.degree, x.b);
  os << "simplex_id,value\n";
  for (std::size_t i = 0; i < ids.size(); ++i) os << ids[i] << "," << format_real(x.coefficients[static_cast<int>(i)]) << "\n";
}

}  // namespace whodge
