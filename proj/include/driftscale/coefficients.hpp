#pragma once

#include <string>
#include <vector>

#include "driftscale/grid.hpp"
#include "driftscale/types.hpp"

namespace driftscale {

enum class DiffusionKind { constant_diag, modulated_iso };
enum class DriftKind { none, constant, strip_shear };
enum class CapacityKind { none, constant, strip };
enum class RobinKind { linear, constant };

// Compactly supported polynomial bump a * (1 - |x - x0|^2 / rho^2)_+^3.
struct BumpSpec {
  double amplitude = 0;
  double radius = 1;
  Vector2 center{0, 0};

  double operator()(const Vector2& x) const {
    const double r2 = (x - center).squaredNorm() / (radius * radius);
    if (r2 >= 1.0) return 0.0;
    const double q = 1.0 - r2;
    return amplitude * q * q * q;
  }
};

// Model data on the unit cell: diffusion tensor D, drift B (generated from a
// stream function so that discrete incompressibility is exact), capacity C,
// volume source f, initial state g, and the boundary production g_N.
struct CoefficientSet {
  DiffusionKind d_kind = DiffusionKind::constant_diag;
  double d1 = 1.0, d2 = 1.0;       // constant_diag entries
  double d_base = 1.0, d_mod = 0;  // modulated_iso: d_base*(1 + d_mod*cos*cos)

  DriftKind b_kind = DriftKind::none;
  double b_max = 0;                // strip_shear amplitude
  Vector2 b_const{0, 0};           // constant drift vector
  double strip = 0.25;             // shear strip width, strips [0,s] and [1-s,1]

  CapacityKind c_kind = CapacityKind::none;
  double c0 = 0;                   // strip profile amplitude
  double c_const = 0;              // constant capacity value

  RobinKind gn_kind = RobinKind::linear;
  double gn_k = 0;                 // constant g_N value

  BumpSpec f;                      // volume source, x-only
  BumpSpec g;                      // initial state

  double theta = 1.0;              // ellipticity bounds for D
  double theta_tilde = 1.0;

  Matrix2 D(const Vector2& y) const;
  double stream(const Vector2& y) const;  // B = (d(psi)/dy2, -d(psi)/dy1)
  Vector2 stream_increments() const;      // net change over one period in x, y
  double stream_ext(const Vector2& y) const;  // extension beyond the unit cell
  Vector2 B(const Vector2& y) const;
  double C(const Vector2& y) const;
  double gN(double r) const;
  // max |g_N'| over [lo, hi]; used by stability bounds
  double gN_slope_bound() const { return gn_kind == RobinKind::linear ? 1.0 : 0.0; }
};

// Coefficients sampled on a CellGrid. Drift lives on faces as normal
// velocities obtained from stream-function differences; bx_face[f] is the
// velocity through the west face of cell f, by_face[f] through its south
// face (periodic wrap). Cell-centered drift averages the two faces and is
// the quadrature used for every integral of B.
struct DiscreteCoefficients {
  Vec bx_face, by_face;      // size n*n
  Vec bx_cell, by_cell;      // size n*n
  Vec d1_face_x, d2_face_y;  // D11 at west faces, D22 at south faces
  Vec d1_cell, d2_cell;      // D diagonal at centers
  Vec c_cell;                // size n*n
  double c_offset = 0;       // shift applied by project_zero_mean_BC
  RobinKind gn_kind = RobinKind::linear;
  double gn_k = 0;
  double theta = 1.0, theta_tilde = 1.0;
};

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  double residual = 0;
  std::string detail;
};

// Machine check of the structural assumptions; one entry per assumption
// plus the zero-mean drift-capacity constraint.
struct AssumptionReport {
  AssumptionCheck a1, a2, a3, a4, a5, bc;
  double min_eig = 0, max_eig = 0;
  double max_div_B = 0, max_Bn = 0, max_div_BC = 0;
  double int_BC_norm = 0;
  double min_g = 0, min_gn_sign = 0;

  std::vector<const AssumptionCheck*> entries() const {
    return {&a1, &a2, &a3, &a4, &a5, &bc};
  }
  bool all_pass() const {
    for (auto* e : entries())
      if (!e->pass) return false;
    return true;
  }
};

DiscreteCoefficients sample_coefficients(const CoefficientSet& set,
                                         const CellGrid& grid);

AssumptionReport verify_assumptions(const CoefficientSet& set,
                                    const DiscreteCoefficients& disc,
                                    const CellGrid& grid, double tol);

// Shifts C by a constant so that the discrete integral of B*C vanishes
// componentwise. Requires the residual integral to be parallel to B.
DiscreteCoefficients project_zero_mean_BC(const DiscreteCoefficients& disc,
                                          const CellGrid& grid);

// Midpoint quadrature over fluid cells with cell-centered drift.
Vector2 integrate_B(const DiscreteCoefficients& disc, const CellGrid& grid);
Vector2 integrate_BC(const DiscreteCoefficients& disc, const CellGrid& grid);

// Discrete divergence of the face drift field in one fluid cell (flux form).
double cell_div_B(const DiscreteCoefficients& disc, const CellGrid& grid,
                  int flat);

}  // namespace driftscale
