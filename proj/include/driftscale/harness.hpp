#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "driftscale/config.hpp"
#include "driftscale/effective.hpp"
#include "driftscale/macro_solver.hpp"
#include "driftscale/micro_solver.hpp"

namespace driftscale {

// Everything derived from a configuration that the experiments share.
struct ModelSetup {
  std::shared_ptr<const CellGrid> grid;
  DiscreteCoefficients disc;  // zero-mean projected
  AssumptionReport report;
  EffectiveTable table;       // empty when built without a table
  double u_max = 0;
};

ModelSetup build_model(const RunConfig& cfg, bool with_table = true);

SolveOptions solve_options(const RunConfig& cfg);

// Smallest admissible micro box for the moving-frame window: macro box plus
// the drift displacement plus a whole-cell margin.
double micro_halfwidth_for(const RunConfig& cfg, const Vector2& Bstar,
                           double eps);

Vec sample_macro_field(const MacroState& shape, const BumpSpec& bump);
MacroState initial_macro_state(const RunConfig& cfg);

// L2 distance between the micro solution in the moving frame and the macro
// state, over the unmasked macro sample points.
double moving_frame_l2_error(const MicroState& micro, const MacroState& macro,
                             const Vector2& Bstar);

// H1 seminorm of the corrector residual
//   u_eps(x) - u0(x - shift) - eps W(x/eps; u0) . grad u0(x - shift)
// with W interpolated in u0 between table nodes and the gradient taken by
// differencing the composed field on the micro grid.
double corrector_h1_error(const MicroState& micro, const MacroState& macro,
                          const EffectiveTable& table);

struct SeparableTest {
  std::function<double(double)> time_part;            // phi1(t)
  std::function<double(const Vector2&)> macro_part;   // phi2(x)
  std::function<double(const Vector2&)> cell_part;    // phi3(y), Z-periodic
};

// Space-time pairing of the micro solution against an oscillating test
// function evaluated in the drifting frame; trapezoid rule over snapshots.
double two_scale_drift_pairing(const std::vector<MicroState>& snapshots,
                               const SeparableTest& phi, const Vector2& Bstar);

// Limit-side triple integral with the macro solution.
double two_scale_drift_pairing_limit(const std::vector<MacroState>& snapshots,
                                     const CellGrid& grid,
                                     const SeparableTest& phi);

// Quadrature self-test: |phi(x - shift, x/eps)|^2 summed over a perforated
// box at micro resolution against the product integral. phi is the built-in
// trigonometric test windowed by a compactly supported bump envelope.
struct OscillationCheck {
  double quadrature = 0;
  double limit = 0;
  double error = 0;
};

OscillationCheck oscillation_quadrature(const RunConfig& cfg,
                                        const Vector2& Bstar, double eps,
                                        double t);

struct ConvergenceReport {
  std::vector<double> eps_list;
  std::vector<double> snapshot_times;
  std::vector<std::vector<double>> l2_moving;     // [eps][snapshot]
  std::vector<std::vector<double>> h1_corrector;  // [eps][snapshot]
  std::vector<std::vector<double>> rates_l2;      // [pair][snapshot]
  std::vector<std::vector<double>> rates_h1;
  Vector2 Bstar = Vector2::Zero();
  std::vector<std::string> notes;
};

// true when every snapshot column decreases strictly down the eps rows
bool strictly_decreasing_columns(const std::vector<std::vector<double>>& err);

ConvergenceReport run_convergence_study(const RunConfig& cfg,
                                        bool write_files = true);

std::vector<std::string> report_csv_lines(const ConvergenceReport& rep);
std::vector<std::string> rates_csv_lines(const ConvergenceReport& rep);

// periodic bilinear evaluation of a fluid-compressed cell field; false when
// every stencil corner is solid
bool interp_cell_periodic(const CellGrid& grid, const Vec& values,
                          const Vector2& y, double* out);

}  // namespace driftscale
