#include "whodge/spectral.hpp"

#include <Eigen/Dense>
#include <random>

#include "whodge/error.hpp"
#include "whodge/kernels.hpp"

namespace whodge {

namespace {

constexpr int kMaxSweeps = 500;

Eigen::MatrixXd random_block(int m, int b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(m, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < m; ++i) X(i, j) = g(rng);
  return X;
}

// Two passes of Cholesky QR in the M inner product; drops dependent columns.
Eigen::MatrixXd m_orthonormalize(const Eigen::MatrixXd& X, const SpMat& M) {
  Eigen::MatrixXd Q = X;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::MatrixXd G = Q.transpose() * (M * Q);
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (G + G.transpose()));
    if (llt.info() == Eigen::Success) {
      Q = llt.matrixU().solve<Eigen::OnTheRight>(Q);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()));
    const double top = es.eigenvalues().maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()[i] > 1e-14 * top) keep.push_back(i);
    Eigen::MatrixXd R(G.rows(), keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j)
      R.col(j) = es.eigenvectors().col(keep[j]) / std::sqrt(es.eigenvalues()[keep[j]]);
    Q = Q * R;
  }
  return Q;
}

double m_inv_norm(const AssembledOperator& op, const Eigen::VectorXd& r) {
  return std::sqrt(std::max(0.0, r.dot(op.solve_M(r))));
}

}  // namespace

double lambda_max_estimate(const AssembledOperator& op, std::uint64_t seed) {
  Eigen::VectorXd x = random_block(op.size(), 1, seed ^ 0x9e3779b97f4a7c15ULL).col(0);
  double lam = 0.0;
  for (int it = 0; it < 40; ++it) {
    x /= std::sqrt(x.dot(op.M * x));
    const Eigen::VectorXd y = op.apply_L(x);
    lam = x.dot(op.M * y);
    x = y;
  }
  return 1.1 * lam;
}

SpectralResult lowest_eigenpairs(const AssembledOperator& op, int k, double tol, std::uint64_t seed) {
  const int m = op.size();
  if (k < 1 || k > m) throw ValidationError("k", "must satisfy 1 <= k <= dimension");
  if (!(tol > 0)) throw ValidationError("tol", "must be positive");
  SpectralResult res;
  res.tol = tol;
  res.seed = seed;
  res.shift = -1.0;
  res.mesh_h = op.complex->mesh_size_h;
  res.lambda_max_estimate = lambda_max_estimate(op, seed);
  res.kernel_threshold = 1e-8 * res.lambda_max_estimate;

  const int b = std::min(m, std::max(2 * k, k + 8));
  Eigen::MatrixXd Q = m_orthonormalize(random_block(m, b, seed), op.M);
  Eigen::VectorXd theta;
  Eigen::MatrixXd V;
  std::vector<double> best(k, INFINITY);
  auto rayleigh_ritz = [&]() {
    Eigen::MatrixXd SQ(m, Q.cols());
    for (int j = 0; j < Q.cols(); ++j) SQ.col(j) = op.apply_S(Q.col(j));
    const Eigen::MatrixXd H = Q.transpose() * SQ;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
    theta = es.eigenvalues();
    V = Q * es.eigenvectors();
    const Eigen::MatrixXd SV = SQ * es.eigenvectors();
    std::vector<double> r(std::min<int>(k, static_cast<int>(theta.size())));
    for (std::size_t i = 0; i < r.size(); ++i)
      r[i] = m_inv_norm(op, SV.col(i) - theta[i] * (op.M * V.col(i)));
    return r;
  };
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    Eigen::MatrixXd Y(m, Q.cols());
    const Eigen::MatrixXd MQ = op.M * Q;
    for (int j = 0; j < Q.cols(); ++j) Y.col(j) = op.shift_solve(res.shift, MQ.col(j));
    Q = m_orthonormalize(Y, op.M);
    if (Q.cols() < k) throw ConvergenceError("subspace collapsed", best);
    const auto r = rayleigh_ritz();
    Q = V;
    bool done = true;
    for (int i = 0; i < k; ++i) {
      best[i] = std::min(best[i], r[i]);
      if (r[i] > tol * (1.0 + std::abs(theta[i]))) done = false;
    }
    res.iterations = sweep;
    if (done) {
      for (int i = 0; i < k; ++i) {
        res.eigenvalues.push_back(theta[i]);
        res.residual_norms.push_back(r[i]);
        res.eigenvectors.push_back({op.degree, op.realization, V.col(i)});
        if (theta[i] < res.kernel_threshold) ++res.kernel_dim;
      }
      return res;
    }
  }
  throw ConvergenceError("eigensolver did not converge in " + std::to_string(kMaxSweeps) + " sweeps", best);
}

nlohmann::json SpectralResult::to_json() const {
  return {{"eigenvalues", eigenvalues},
          {"kernel_dim", kernel_dim},
          {"residuals", residual_norms},
          {"seed", seed},
          {"mesh_h", mesh_h}};
}

Eigen::VectorXd KernelProjector::apply(const Eigen::VectorXd& x) const {
  if (dim() == 0) return Eigen::VectorXd::Zero(x.size());
  return basis * (basis.transpose() * (M * x));
}

KernelProjector kernel_projector(const AssembledOperator& op, double kernel_threshold) {
  KernelProjector P;
  P.M = op.M;
  int k = std::min(op.size(), 4);
  for (;;) {
    const SpectralResult r = lowest_eigenpairs(op, k, 1e-10);
    const double thr = kernel_threshold > 0 ? kernel_threshold : r.kernel_threshold;
    int dim = 0;
    while (dim < k && r.eigenvalues[dim] < thr) ++dim;
    if (dim == k && k < op.size()) {
      k = std::min(op.size(), 2 * k);
      continue;
    }
    P.threshold = thr;
    P.window = r.eigenvalues;
    if (dim < op.size() && r.eigenvalues[dim] <= 10 * thr) {
      std::string w;
      for (double v : r.eigenvalues) w += " " + std::to_string(v);
      throw Error("ambiguous kernel: no clean gap above threshold " + std::to_string(thr) + "; eigenvalues:" + w);
    }
    P.basis.resize(op.size(), dim);
    for (int i = 0; i < dim; ++i) P.basis.col(i) = r.eigenvectors[i].coefficients;
    return P;
  }
}

RangeSolve solve_on_range(const AssembledOperator& op, const Cochain& rhs, double tol, const KernelProjector* proj,
                          int max_iter) {
  if (rhs.degree != op.degree || rhs.b != op.realization)
    throw ValidationError("rhs", "degree or realization does not match the operator");
  KernelProjector local;
  if (!proj) {
    local = kernel_projector(op);
    proj = &local;
  }
  const int m = op.size();
  RangeSolve out;
  out.w = {op.degree, op.realization, Eigen::VectorXd::Zero(m)};
  const Eigen::VectorXd f = proj->complement(rhs.coefficients);
  const double fn = std::sqrt(f.dot(op.M * f));
  if (fn == 0.0) return out;
  // S w = M f; the residual lives in the dual space, z = P M^{-1} r.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd r = op.M * f;
  Eigen::VectorXd z = proj->complement(op.solve_M(r));
  Eigen::VectorXd d = z;
  double rz = kernels::dot(r.data(), z.data(), m);
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd Sd = op.apply_S(d);
    const double alpha = rz / kernels::dot(d.data(), Sd.data(), m);
    kernels::axpy(alpha, d.data(), w.data(), m);
    kernels::axpy(-alpha, Sd.data(), r.data(), m);
    z = proj->complement(op.solve_M(r));
    const double rz_new = kernels::dot(r.data(), z.data(), m);
    out.iterations = it;
    if (std::sqrt(std::max(rz_new, 0.0)) <= tol * fn) {
      rz = rz_new;
      break;
    }
    kernels::xpby(z.data(), rz_new / rz, d.data(), m);
    rz = rz_new;
    if (it == max_iter) throw ConvergenceError("solve_on_range stagnated", {std::sqrt(std::max(rz, 0.0)) / fn});
  }
  w = proj->complement(w);
  out.w.coefficients = w;
  out.residual = m_inv_norm(op, op.apply_S(w) - op.M * f) / fn;
  return out;
}

HodgeSplit hodge_decompose(const Cochain& x, const AssembledOperator& op, const KernelProjector* proj, double tol) {
  if (x.degree != op.degree || x.b != op.realization)
    throw ValidationError("x", "degree or realization does not match the operator");
  KernelProjector local;
  if (!proj) {
    local = kernel_projector(op);
    proj = &local;
  }
  HodgeSplit h;
  const Eigen::VectorXd k = proj->apply(x.coefficients);
  h.kernel_part = {x.degree, x.b, k};
  const RangeSolve v = solve_on_range(op, {x.degree, x.b, x.coefficients - k}, tol, proj);
  h.iterations = v.iterations;
  const int m = op.size();
  Eigen::VectorXd ex = Eigen::VectorXd::Zero(m), co = Eigen::VectorXd::Zero(m);
  if (op.degree > 0) ex = op.D_prev * op.codiff(v.w.coefficients);
  if (op.degree < op.dim()) co = op.solve_M(op.K * v.w.coefficients);
  h.exact_part = {x.degree, x.b, ex};
  h.coexact_part = {x.degree, x.b, co};
  auto ip = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(op.M * b); };
  const double nx = ip(x.coefficients, x.coefficients);
  if (nx == 0.0) return h;
  const Eigen::VectorXd sum = k + ex + co - x.coefficients;
  h.recomposition = std::sqrt(ip(sum, sum) / nx);
  h.kernel_exact = std::abs(ip(k, ex)) / nx;
  h.kernel_coexact = std::abs(ip(k, co)) / nx;
  h.exact_coexact = std::abs(ip(ex, co)) / nx;
  return h;
}

IntertwiningReport check_intertwining(const AssembledOperator& a, const AssembledOperator& b, int samples,
                                      std::uint64_t seed) {
  if (b.degree != a.degree + 1 || a.complex != b.complex || a.realization != b.realization ||
      a.dofs_next != b.dofs)
    throw ValidationError("operators", "need compatible operators of degrees p and p+1");
  IntertwiningReport rep;
  rep.samples = samples;
  const Eigen::MatrixXd X = random_block(a.size(), samples, seed);
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = X.col(s);
    const Eigen::VectorXd Lx = a.apply_L(x);
    const Eigen::VectorXd diff = b.apply_L(a.D * x) - a.D * Lx;
    rep.max_residual = std::max(rep.max_residual, diff.norm() / Lx.norm());
  }
  rep.within_contract = rep.max_residual <= 1e-10;
  return rep;
}

}  // namespace whodge
