#pragma once

#include <Eigen/SparseCholesky>

#include <array>
#include <memory>
#include <vector>

#include "driftscale/coefficients.hpp"
#include "driftscale/grid.hpp"
#include "driftscale/types.hpp"

namespace driftscale {

struct MicroState {
  std::shared_ptr<const MicroDomain> domain;
  Vec u;  // fluid-compressed
  double t = 0;
};

struct MicroOptions {
  double cfl = 0.4;          // advective safety factor
  double linf_margin = 1e-6; // allowed overshoot of the a-priori sup bound
};

// IMEX integrator for the microscopic problem: explicit upwind drift with
// the nonlinearity evaluated on the upwind side, implicit diffusion
// (factorized once per step size), explicit Robin flux on obstacle faces,
// homogeneous Dirichlet data on the outer box.
class MicroStepper {
 public:
  MicroStepper(std::shared_ptr<const MicroDomain> domain,
               const CoefficientSet& set, double c_offset, double m_bound,
               MicroOptions opts = {});

  MicroState initial_state() const;  // u = g on the fluid cells

  // largest admissible step for states bounded by umax
  double max_stable_dt(double umax) const;

  void step(MicroState& state, double dt);

  // rate of change from the upwind drift sub-step alone
  Vec advective_rate(const Vec& u) const;

  double mass(const Vec& u) const;
  double dissipation(const Vec& u) const;  // integral of D |grad u|^2
  double source_l2sq() const { return f_cell_.squaredNorm() * domain_->h * domain_->h; }
  double m_bound() const { return m_bound_; }
  double sup_drift() const { return max_b_; }
  const MicroDomain& domain() const { return *domain_; }

 private:
  int fx(int ix, int iy) const { return ix + (domain_->n + 1) * iy; }
  int fy(int ix, int iy) const { return ix + domain_->n * iy; }

  std::shared_ptr<const MicroDomain> domain_;
  MicroOptions opts_;
  RobinKind gn_kind_;
  double gn_k_ = 0;
  double epsilon_ = 0;
  double m_bound_ = 0;
  double max_b_ = 0;
  double c_min_ = 0, c_max_ = 0;
  Vec bx_face_, by_face_;  // (n+1)*n and n*(n+1) face drift samples
  Vec d1_face_, d2_face_;  // same layouts
  Vec c_cell_, f_cell_, g_cell_;  // fluid-compressed
  SparseMat diff_op_;
  Eigen::SimplicialLDLT<SparseMat> solver_;
  double factored_dt_ = -1;

  void factorize(double dt);
};

struct MicroRunResult {
  std::vector<MicroState> snapshots;
  std::vector<std::array<double, 5>> summary;  // t, mass, min, max, energy
  double min_u = 0;
  double max_u = 0;
  bool linf_ok = true;
  bool energy_ok = true;
  double dissipation_integral = 0;  // time integral of D |grad u|^2
};

// Steps exactly to each snapshot time; the step never exceeds the stability
// bound nor dt_cap.
MicroRunResult run_micro(MicroStepper& stepper,
                         const std::vector<double>& snapshot_times,
                         double dt_cap);

// View of the micro solution in the frame moving with Bstar/epsilon, sampled
// at the centers of an m x m macro grid on [-halfwidth, halfwidth]^2. Sample
// points landing in the shifted perforation are masked out.
struct MovingFrameField {
  int m = 0;
  double halfwidth = 0;
  Vec values;
  std::vector<std::uint8_t> mask;
};

MovingFrameField shift_to_moving_frame(const MicroState& state,
                                       const Vector2& Bstar, int m,
                                       double halfwidth);

// Bilinear interpolation of a fluid-compressed field at a point of the box;
// solid corners are dropped and the weights renormalized. Returns false when
// the containing cell is solid.
bool interp_micro(const MicroDomain& domain, const Vec& u, const Vector2& x,
                  double* out);

}  // namespace driftscale
