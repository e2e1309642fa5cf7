#include "driftscale/linsolve.hpp"

#include <cmath>
#include <string>

namespace driftscale {

namespace {

void remove_mean(Vec& v) {
  if (v.size() > 0) v.array() -= v.mean();
}

}  // namespace

KrylovResult solve_singular_meanzero(const SparseMat& A, Vec& x, const Vec& b,
                                     double tol, int max_iter) {
  const Eigen::Index n = A.rows();
  KrylovResult res;
  Vec rhs = b;
  remove_mean(rhs);
  const double bnorm = rhs.norm();
  x = Vec::Zero(n);
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }

  Vec invdiag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = A.coeff(i, i);
    invdiag[i] = std::abs(d) > 1e-300 ? 1.0 / d : 1.0;
  }

  Vec r = rhs;  // x = 0 start
  Vec rhat = r;
  Vec p = Vec::Zero(n), v = Vec::Zero(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  const double target = tol * bnorm;

  for (int it = 1; it <= max_iter; ++it) {
    double rho_new = rhat.dot(r);
    if (std::abs(rho_new) < 1e-300 * bnorm * bnorm) {
      // breakdown: restart with the current residual
      rhat = r;
      rho_new = r.squaredNorm();
      if (rho_new < target * target) {
        res.converged = true;
        res.iterations = it;
        break;
      }
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    p = r + beta * (p - omega * v);
    Vec phat = invdiag.asDiagonal() * p;
    v = A * phat;
    const double rv = rhat.dot(v);
    if (std::abs(rv) < 1e-300)
      throw SolverError("BiCGSTAB breakdown, residual " +
                        std::to_string(r.norm() / bnorm));
    alpha = rho_new / rv;
    Vec s = r - alpha * v;
    if (s.norm() <= target) {
      x += alpha * phat;
      r = s;
      res.converged = true;
      res.iterations = it;
      break;
    }
    Vec shat = invdiag.asDiagonal() * s;
    Vec t = A * shat;
    const double tt = t.squaredNorm();
    if (tt < 1e-300)
      throw SolverError("BiCGSTAB breakdown (t = 0), residual " +
                        std::to_string(r.norm() / bnorm));
    omega = t.dot(s) / tt;
    x += alpha * phat + omega * shat;
    r = s - omega * t;
    rho = rho_new;
    res.iterations = it;
    if (r.norm() <= target) {
      res.converged = true;
      break;
    }
  }

  remove_mean(x);
  res.residual = (rhs - A * x).norm() / bnorm;
  if (!res.converged && res.residual > tol)
    throw SolverError("BiCGSTAB stagnated after " +
                      std::to_string(res.iterations) + " iterations, residual " +
                      std::to_string(res.residual));
  res.converged = true;
  return res;
}

}  // namespace driftscale
