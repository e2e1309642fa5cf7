#pragma once

#include <memory>
#include <vector>

#include "driftscale/cell_solver.hpp"
#include "driftscale/coefficients.hpp"
#include "driftscale/grid.hpp"
#include "driftscale/types.hpp"

namespace driftscale {

struct EffectiveTensorSample {
  double u0 = 0;
  Matrix2 Dstar = Matrix2::Zero();
  int corrector_ref = -1;   // index into EffectiveTable::correctors
  bool sym_positive = false;  // symmetric part positive definite
};

// Effective drift plus a tabulation u0 -> D*(u0, W) with monotone cubic
// interpolation per tensor entry. The correctors behind each sample are kept
// for reuse by the corrector-error harness.
struct EffectiveTable {
  Vector2 Bstar = Vector2::Zero();
  std::vector<EffectiveTensorSample> samples;
  std::vector<CellCorrector> correctors;
  double u_max = 0;
  double fluid_area = 0;
  double obstacle_perimeter = 0;
  std::shared_ptr<const CellGrid> grid;
};

Vector2 compute_Bstar(const DiscreteCoefficients& disc, const CellGrid& grid);

// Dispersion tensor from the three midpoint quadratures over the fluid cells.
Matrix2 assemble_Dstar(const DiscreteCoefficients& disc, const CellGrid& grid,
                       const CellCorrector& corrector);

EffectiveTable tabulate_Dstar(const DiscreteCoefficients& disc,
                              std::shared_ptr<const CellGrid> grid,
                              double u_max, int n_samples,
                              const SolveOptions& opts = {});

// Per-entry interpolation, exact at the nodes; s is clamped to the table
// range and *clamped set when that happens.
Matrix2 eval_Dstar(const EffectiveTable& table, double s,
                   bool* clamped = nullptr);

// 1.25 x the larger of the initial-state sup and the steady balance of the
// source against the boundary sink.
double default_u_max(const CoefficientSet& set, const CellGrid& grid);

bool sym_positive_definite(const Matrix2& m);

}  // namespace driftscale
