#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "wstab/errors.hpp"
#include "wstab/stability.hpp"

namespace wstab {

namespace {

// Fixes the sign so the first entry of largest magnitude is positive.
void normalize_sign(VecX& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v[k] < 0) v = -v;
}

void fill_residuals(const SpMat& A, const SpMat& M, SpectralResult& r) {
  r.solver_residuals.clear();
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    const VecX& u = r.eigenfunctions[i];
    r.solver_residuals.push_back((A * u - r.eigenvalues[i] * (M * u)).norm() / u.norm());
  }
}

// Dense solve on the complement of c (c empty: unconstrained).
SpectralResult dense_pencil(const SpMat& A, const SpMat& M, const VecX& c, int count) {
  MatX Ad = MatX(A), Md = MatX(M);
  MatX Q;
  if (c.size() > 0) {
    // Householder reflector mapping c to a multiple of e0; its other columns span c-perp.
    VecX v = c;
    v[0] += (c[0] >= 0 ? 1.0 : -1.0) * c.norm();
    MatX H = MatX::Identity(c.size(), c.size()) - (2.0 / v.squaredNorm()) * v * v.transpose();
    Q = H.rightCols(c.size() - 1);
    Ad = Q.transpose() * Ad * Q;
    Md = Q.transpose() * Md * Q;
  }
  Ad = 0.5 * (Ad + Ad.transpose()).eval();
  Md = 0.5 * (Md + Md.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatX> es(Ad, Md);
  if (es.info() != Eigen::Success) throw NumericalError("dense generalized eigensolver failed");
  SpectralResult r;
  r.solver = "dense";
  r.dof = static_cast<int>(A.rows());
  const int k = std::min<int>(count, es.eigenvalues().size());
  for (int i = 0; i < k; ++i) {
    r.eigenvalues.push_back(es.eigenvalues()[i]);
    VecX u = es.eigenvectors().col(i);
    if (c.size() > 0) u = Q * u;
    normalize_sign(u);
    r.eigenfunctions.push_back(u);
  }
  fill_residuals(A, M, r);
  return r;
}

// M-orthonormalizes the columns of W against V (first `used` columns) and
// among themselves; drops near-dependent columns.
MatX orthonormalize(const MatX& V, int used, MatX W, const SpMat& M) {
  std::vector<VecX> keep;
  for (int j = 0; j < W.cols(); ++j) {
    VecX w = W.col(j);
    const double n0 = std::sqrt(std::max(0.0, w.dot(M * w)));
    for (int pass = 0; pass < 2; ++pass) {
      if (used > 0) {
        const VecX Mw = M * w;
        w -= V.leftCols(used) * (V.leftCols(used).transpose() * Mw);
      }
      for (const VecX& q : keep) w -= q * q.dot(M * w);
    }
    const double nw = std::sqrt(std::max(0.0, w.dot(M * w)));
    if (nw > 1e-10 * n0 && nw > 0.0) keep.push_back(w / nw);
  }
  MatX out(W.rows(), keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) out.col(j) = keep[j];
  return out;
}

SpectralResult krylov_pencil(const SpMat& A, const SpMat& M, const VecX& c, int count,
                             const EigenOptions& opt) {
  const int n = static_cast<int>(A.rows());
  const double diag_scale = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s = std::max(s, std::abs(A.coeff(i, i) / M.coeff(i, i)));
    return s;
  }();

  // Lower the shift until A - sigma M is positive definite (all LDLT pivots positive).
  Eigen::SimplicialLDLT<SpMat> S;
  double sigma = -1.0;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 80) throw NumericalError("no admissible shift found for the eigensolver");
    S.compute(SpMat(A - sigma * M));
    if (S.info() == Eigen::Success && (S.vectorD().array() > 0.0).all()) break;
    sigma = sigma * 2.0 - 1e-3 * diag_scale;
  }
  // Positive pivots put every eigenvalue above sigma, but one may sit right
  // at it; back off so the shifted operator is well conditioned.
  sigma -= 0.5 * std::max(1.0, std::abs(sigma));
  S.compute(SpMat(A - sigma * M));
  if (S.info() != Eigen::Success) throw NumericalError("shifted factorization failed");

  const bool constrained = c.size() > 0;
  VecX Sc;
  double cSc = 0.0;
  if (constrained) {
    Sc = S.solve(c);
    cSc = c.dot(Sc);
  }
  // (A - sigma M)^{-1} M restricted to {c^T u = 0}.
  auto op = [&](const MatX& X) {
    MatX Y = S.solve(MatX(M * X));
    if (constrained)
      for (int j = 0; j < Y.cols(); ++j) Y.col(j) -= Sc * (c.dot(Y.col(j)) / cSc);
    return Y;
  };
  auto project = [&](MatX X) {
    if (constrained)
      for (int j = 0; j < X.cols(); ++j) X.col(j) -= c * (c.dot(X.col(j)) / c.squaredNorm());
    return X;
  };

  const int b = std::max(1, opt.block_size);
  const int max_basis = std::min(n - (constrained ? 1 : 0), std::max(8 * (count + b), 80));
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  MatX start(n, std::max(b, count));
  for (int j = 0; j < start.cols(); ++j)
    for (int i = 0; i < n; ++i) start(i, j) = nd(rng);

  MatX V(n, max_basis + start.cols());
  int used = 0;
  MatX block = orthonormalize(V, 0, project(start), M);
  SpectralResult r;
  r.dof = n;
  r.solver = "block-shift-invert";
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    const int add = std::min<int>(block.cols(), V.cols() - used);
    V.middleCols(used, add) = block.leftCols(add);
    used += add;

    // Rayleigh-Ritz on (A, M).
    const MatX Vu = V.leftCols(used);
    MatX Ar = Vu.transpose() * (A * Vu);
    MatX Mr = Vu.transpose() * (M * Vu);
    Ar = 0.5 * (Ar + Ar.transpose()).eval();
    Mr = 0.5 * (Mr + Mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<MatX> es(Ar, Mr);
    if (es.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz step failed");
    const int k = std::min<int>(count, used);
    bool converged = used >= count;
    std::vector<VecX> vecs;
    std::vector<double> vals;
    for (int i = 0; i < std::min<int>(used, count + b); ++i) {
      VecX y = Vu * es.eigenvectors().col(i);
      const double th = es.eigenvalues()[i];
      if (i < k) {
        // The constrained pencil leaves a multiplier component along c.
        const double res = project(A * y - th * (M * y)).norm() / y.norm();
        if (!(res <= opt.tolerance * std::max(1.0, std::abs(th)))) converged = false;
      }
      vecs.push_back(y);
      vals.push_back(th);
    }
    if (converged || used >= n - (constrained ? 1 : 0)) {
      for (int i = 0; i < k; ++i) {
        VecX u = vecs[i];
        normalize_sign(u);
        r.eigenvalues.push_back(vals[i]);
        r.eigenfunctions.push_back(u);
      }
      fill_residuals(A, M, r);
      return r;
    }
    if (used + b > max_basis) {
      // Thick restart from the leading Ritz vectors.
      MatX R(n, vecs.size());
      for (std::size_t j = 0; j < vecs.size(); ++j) R.col(j) = vecs[j];
      MatX Rn = orthonormalize(V, 0, R, M);
      used = 0;
      V.leftCols(Rn.cols()) = Rn;
      used = static_cast<int>(Rn.cols());
      block = orthonormalize(V, used, op(Rn.rightCols(std::min<int>(b, Rn.cols()))), M);
    } else {
      block = orthonormalize(V, used, op(V.middleCols(used - add, add)), M);
    }
    if (block.cols() == 0) {
      MatX fresh(n, b);
      for (int j = 0; j < b; ++j)
        for (int i = 0; i < n; ++i) fresh(i, j) = nd(rng);
      block = orthonormalize(V, used, project(fresh), M);
    }
  }
  std::ostringstream os;
  os << "eigensolver did not converge in " << opt.max_iterations << " iterations";
  throw NumericalError(os.str());
}

}  // namespace

SpectralResult symmetric_pencil(const SpMat& A, const SpMat& M, int count,
                                const EigenOptions& opt) {
  if (A.rows() <= opt.dense_limit) return dense_pencil(A, M, VecX(), count);
  return krylov_pencil(A, M, VecX(), count, opt);
}

SpectralResult constrained_eigenproblem(const IndexFormAssembly& a, int count,
                                        const EigenOptions& opt) {
  if (a.dof < 2) throw InputError("constrained eigenproblem needs at least two DOF");
  count = std::min(count, a.dof - 1);
  const SpMat A = a.form();
  SpectralResult r = a.dof <= opt.dense_limit ? dense_pencil(A, a.M, a.load, count)
                                              : krylov_pencil(A, a.M, a.load, count, opt);
  // Residuals of the constrained pencil exclude the multiplier direction M 1.
  r.solver_residuals.clear();
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    const VecX& u = r.eigenfunctions[i];
    VecX res = A * u - r.eigenvalues[i] * (a.M * u);
    res -= a.load * (a.load.dot(res) / a.load.squaredNorm());
    r.solver_residuals.push_back(res.norm() / u.norm());
  }
  return r;
}

}  // namespace wstab
