#pragma once

#include <array>
#include <vector>

#include "driftscale/effective.hpp"
#include "driftscale/types.hpp"

namespace driftscale {

// Upscaled state on a box [-L, L]^2, cell-centered, homogeneous Dirichlet
// data on the outer boundary.
struct MacroState {
  double halfwidth = 1;
  int m = 0;
  double h = 0;
  Vec u;  // m*m, flat = ix + m*iy
  double t = 0;

  int flat(int ix, int iy) const { return ix + m * iy; }
  Vector2 cell_center(int f) const {
    return Vector2(-halfwidth + (f % m + 0.5) * h,
                   -halfwidth + (f / m + 0.5) * h);
  }
  double mass() const { return u.sum() * h * h; }
  double l2_norm() const { return std::sqrt(u.squaredNorm() * h * h); }
};

MacroState make_macro_state(double halfwidth, int m);

// One semi-implicit step of the reaction-dispersion equation: diffusion with
// the tensor lagged at the previous state and full cross terms, the boundary
// sink implicit for linear g_N and explicit for constant g_N, the source
// explicit.
MacroState step_macro(const MacroState& state, const EffectiveTable& table,
                      double dt, const Vec& fbar, RobinKind gn_kind,
                      double gn_k, bool* clamped = nullptr);

struct MacroRunResult {
  std::vector<MacroState> snapshots;
  std::vector<std::array<double, 5>> summary;  // t, mass, min, max, l2
  bool boundary_warning = false;  // outer-ring values above 1e-8
  bool clamp_warning = false;     // table evaluated outside its range
};

// Steps exactly to each requested snapshot time with steps of at most dt.
MacroRunResult run_macro(const MacroState& initial, const EffectiveTable& table,
                         const Vec& fbar, RobinKind gn_kind, double gn_k,
                         const std::vector<double>& snapshot_times, double dt);

}  // namespace driftscale
