#pragma once

#include "driftscale/types.hpp"

namespace driftscale {

struct KrylovResult {
  int iterations = 0;
  double residual = 0;  // relative to |b|, absolute when b = 0
  bool converged = false;
};

// Jacobi-preconditioned BiCGSTAB for consistent singular systems whose
// nullspace is the constant vector (conservative periodic operators). The
// right-hand side and the returned solution are projected to zero mean.
// Throws SolverError on stagnation or breakdown.
KrylovResult solve_singular_meanzero(const SparseMat& A, Vec& x, const Vec& b,
                                     double tol, int max_iter);

}  // namespace driftscale
