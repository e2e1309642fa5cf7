#pragma once

#include <string>
#include <vector>

#include "driftscale/coefficients.hpp"
#include "driftscale/grid.hpp"
#include "driftscale/types.hpp"

namespace driftscale {

// Full description of a run. Defaults form the built-in strip-shear
// experiment: unit diffusion, strip-shear drift with a mid-band square
// obstacle, odd strip capacity, linear boundary production, bump initial
// state.
struct RunConfig {
  CellGeometry geometry{ObstacleKind::axis_square, 0.25, {0.5, 0.5}};
  CoefficientSet coefficients;

  // discretization
  int cell_n = 64;
  int macro_m = 256;
  int cells_per_eps = 16;
  double solve_tol = 1e-10;
  double compat_tol = 1e-8;
  double assumption_tol = 1e-12;
  double macro_dt = 5e-4;

  // experiment
  std::vector<double> eps_list{0.25, 0.125, 0.0625};
  double t_end = 0.05;
  std::vector<double> snapshots{0.025, 0.05};
  double u_max = -1;           // < 0: derive from the data
  int n_samples = 5;
  double macro_halfwidth = 2.0;
  double micro_halfwidth = -1; // < 0: size per epsilon from support and drift
  std::string out_dir = "out";

  RunConfig();
  void validate() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

}  // namespace driftscale
