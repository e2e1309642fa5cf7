#pragma once

#include <utility>
#include <vector>

#include "driftscale/coefficients.hpp"
#include "driftscale/grid.hpp"
#include "driftscale/types.hpp"

namespace driftscale {

struct SolveOptions {
  double solve_tol = 1e-10;   // relative Krylov residual
  double compat_tol = 1e-8;   // data compatibility tolerance
  int max_iter_factor = 10;   // iteration cap = factor * unknowns
};

// Thrown when source and boundary flux violate the solvability condition of
// a periodic Neumann problem.
struct CompatibilityError : SolverError {
  explicit CompatibilityError(const std::string& what) : SolverError(what) {}
};

// Scalar field on the fluid cells of a CellGrid, gauge-fixed to zero mean.
struct PeriodicField {
  Vec values;
  bool mean_zero = true;
  double residual_norm = 0;
};

// Corrector pair W = (w1, w2) at a fixed macro state value, together with
// the per-cell gradient matrix grad[p](i, j) = d w_j / d y_i.
struct CellCorrector {
  double u0 = 0;
  PeriodicField w1, w2;
  std::vector<Matrix2> grad;
};

// Solves -lap v = rhs on the fluid cells with periodic wrap and prescribed
// outward flux of -grad(v) on the obstacle faces (one value per boundary
// face of the grid, same order). Compatibility: integral of rhs equals the
// total boundary flux.
PeriodicField solve_periodic_poisson(const CellGrid& grid, const Vec& rhs,
                                     const Vec& face_flux,
                                     const SolveOptions& opts = {});

// Auxiliary potentials of the drift fluctuation: -lap G_i = B*.e_i - B.e_i,
// zero flux on the obstacle.
std::pair<PeriodicField, PeriodicField> solve_aux_G(
    const CellGrid& grid, const DiscreteCoefficients& disc,
    const SolveOptions& opts = {});

// Auxiliary potentials of the drift-capacity product: -lap H_i = (B C).e_i,
// zero flux on the obstacle. Requires the projected coefficients.
std::pair<PeriodicField, PeriodicField> solve_aux_H(
    const CellGrid& grid, const DiscreteCoefficients& disc,
    const SolveOptions& opts = {});

// Solves the cell problem for the corrector pair at macro state u0:
// convection-diffusion with drift B(1-2Cu0), unit-vector forcing and
// diffusive flux balance on the obstacle boundary.
CellCorrector solve_corrector(const CellGrid& grid,
                              const DiscreteCoefficients& disc, double u0,
                              const SolveOptions& opts = {});

// Central differences of (w1, w2) honoring the obstacle mask (one-sided next
// to solid cells).
std::vector<Matrix2> corrector_gradient_matrix(const CellGrid& grid,
                                               const PeriodicField& w1,
                                               const PeriodicField& w2);

// Potential of the fluid-indicator fluctuation on the full periodic torus
// at resolution n (no cells are masked; the indicator comes from geom).
PeriodicField solve_indicator_potential(const CellGeometry& geom, int n,
                                        const SolveOptions& opts = {});

}  // namespace driftscale
