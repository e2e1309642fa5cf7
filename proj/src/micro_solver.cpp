#include "driftscale/micro_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace driftscale {

namespace {

double wrap_unit(double t) { return t - std::floor(t); }

inline double drift_flux(double u, double c) { return u * (1.0 - c * u); }

}  // namespace

MicroStepper::MicroStepper(std::shared_ptr<const MicroDomain> domain,
                           const CoefficientSet& set, double c_offset,
                           double m_bound, MicroOptions opts)
    : domain_(std::move(domain)), opts_(opts) {
  if (!domain_) throw ConfigError("micro stepper: null domain");
  const MicroDomain& d = *domain_;
  const int n = d.n;
  const double h = d.h;
  const double L = d.halfwidth;
  epsilon_ = d.epsilon;
  gn_kind_ = set.gn_kind;
  gn_k_ = set.gn_k;
  m_bound_ = m_bound;

  // drift through faces from the scaled stream function, exactly
  // divergence-free cell by cell
  auto node_stream = [&](int ix, int iy) {
    const Vector2 x(-L + ix * h, -L + iy * h);
    return epsilon_ * set.stream_ext(x / epsilon_);
  };
  bx_face_.resize((n + 1) * n);
  by_face_.resize(n * (n + 1));
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix <= n; ++ix)
      bx_face_[fx(ix, iy)] = (node_stream(ix, iy + 1) - node_stream(ix, iy)) / h;
  for (int iy = 0; iy <= n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      by_face_[fy(ix, iy)] = -(node_stream(ix + 1, iy) - node_stream(ix, iy)) / h;
  max_b_ = std::max(bx_face_.cwiseAbs().maxCoeff(),
                    by_face_.cwiseAbs().maxCoeff());

  d1_face_.resize((n + 1) * n);
  d2_face_.resize(n * (n + 1));
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix <= n; ++ix) {
      const Vector2 x(-L + ix * h, -L + (iy + 0.5) * h);
      const Vector2 y(wrap_unit(x[0] / epsilon_), wrap_unit(x[1] / epsilon_));
      d1_face_[fx(ix, iy)] = set.D(y)(0, 0);
    }
  for (int iy = 0; iy <= n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const Vector2 x(-L + (ix + 0.5) * h, -L + iy * h);
      const Vector2 y(wrap_unit(x[0] / epsilon_), wrap_unit(x[1] / epsilon_));
      d2_face_[fy(ix, iy)] = set.D(y)(1, 1);
    }

  const int m = d.fluid_count();
  c_cell_.resize(m);
  f_cell_.resize(m);
  g_cell_.resize(m);
  c_min_ = std::numeric_limits<double>::infinity();
  c_max_ = -c_min_;
  for (int p = 0; p < m; ++p) {
    const Vector2 x = d.cell_center(d.cells[p]);
    const Vector2 y(wrap_unit(x[0] / epsilon_), wrap_unit(x[1] / epsilon_));
    c_cell_[p] = set.C(y) - c_offset;
    f_cell_[p] = set.f(x);
    g_cell_[p] = set.g(x);
    c_min_ = std::min(c_min_, c_cell_[p]);
    c_max_ = std::max(c_max_, c_cell_[p]);
  }

  // the drift must vanish on the obstacle boundary
  for (const auto& face : d.obstacle_faces) {
    const int f = d.cells[face.cell];
    const int ix = f % n, iy = f / n;
    const double bn = face.axis == 0
                          ? bx_face_[fx(ix + (face.sign > 0 ? 1 : 0), iy)]
                          : by_face_[fy(ix, iy + (face.sign > 0 ? 1 : 0))];
    if (std::abs(bn) > 1e-12 * std::max(1.0, max_b_))
      throw ConfigError("micro drift does not vanish on the obstacle boundary");
  }

  // diffusion operator, assembled once
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(m) * 5);
  const double ih2 = 1.0 / (h * h);
  for (int p = 0; p < m; ++p) {
    const int f = d.cells[p];
    const int ix = f % n, iy = f / n;
    double diag = 0;
    for (int axis = 0; axis < 2; ++axis)
      for (int dir = -1; dir <= 1; dir += 2) {
        const int jx = ix + (axis == 0 ? dir : 0);
        const int jy = iy + (axis == 1 ? dir : 0);
        const double dcoef =
            axis == 0 ? d1_face_[fx(dir > 0 ? ix + 1 : ix, iy)]
                      : d2_face_[fy(ix, dir > 0 ? iy + 1 : iy)];
        if (!d.in_range(jx, jy)) {
          diag += 2.0 * dcoef * ih2;  // Dirichlet ghost at half-cell distance
          continue;
        }
        if (!d.fluid[d.flat(jx, jy)]) continue;  // Robin face, explicit
        diag += dcoef * ih2;
        trip.emplace_back(p, d.index[d.flat(jx, jy)], -dcoef * ih2);
      }
    trip.emplace_back(p, p, diag);
  }
  diff_op_.resize(m, m);
  diff_op_.setFromTriplets(trip.begin(), trip.end());
}

MicroState MicroStepper::initial_state() const {
  MicroState s;
  s.domain = domain_;
  s.u = g_cell_;
  s.t = 0;
  return s;
}

double MicroStepper::max_stable_dt(double umax) const {
  const double h = domain_->h;
  umax = std::max(umax, 0.0);
  const double pprime =
      std::max({1.0, std::abs(1.0 - 2.0 * c_min_ * umax),
                std::abs(1.0 - 2.0 * c_max_ * umax)});
  double dt = 0.5 * h;  // resolution-scaled cap when the drift is absent
  if (max_b_ * pprime > 0)
    dt = std::min(dt, opts_.cfl * epsilon_ * h / (max_b_ * pprime));
  if (gn_kind_ == RobinKind::linear)
    dt = std::min(dt, 0.9 * h / epsilon_);
  return dt;
}

void MicroStepper::factorize(double dt) {
  SparseMat M = diff_op_ * dt;
  SparseMat id(diff_op_.rows(), diff_op_.cols());
  id.setIdentity();
  M = M + id;
  solver_.compute(M);
  if (solver_.info() != Eigen::Success)
    throw SolverError("micro implicit diffusion: factorization failed");
  factored_dt_ = dt;
}

Vec MicroStepper::advective_rate(const Vec& u) const {
  const MicroDomain& d = *domain_;
  const int n = d.n;
  const double h = d.h;
  Vec rate = Vec::Zero(u.size());

  // upwind drift fluxes, nonlinearity taken from the upwind cell
  auto add_flux = [&](int flat_l, int flat_r, double b) {
    if (b == 0.0) return;
    const double v = b / epsilon_;
    const int l = flat_l >= 0 ? d.index[flat_l] : -1;
    const int r = flat_r >= 0 ? d.index[flat_r] : -1;
    if (l < 0 && r < 0) return;
    double flux;
    if (v > 0)
      flux = v * (l >= 0 ? drift_flux(u[l], c_cell_[l]) : 0.0);
    else
      flux = v * (r >= 0 ? drift_flux(u[r], c_cell_[r]) : 0.0);
    if (l >= 0) rate[l] -= flux / h;
    if (r >= 0) rate[r] += flux / h;
  };
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix <= n; ++ix) {
      const int fl = ix > 0 && d.fluid[d.flat(ix - 1, iy)] ? d.flat(ix - 1, iy) : -1;
      const int fr = ix < n && d.fluid[d.flat(ix, iy)] ? d.flat(ix, iy) : -1;
      add_flux(fl, fr, bx_face_[fx(ix, iy)]);
    }
  for (int iy = 0; iy <= n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int fl = iy > 0 && d.fluid[d.flat(ix, iy - 1)] ? d.flat(ix, iy - 1) : -1;
      const int fr = iy < n && d.fluid[d.flat(ix, iy)] ? d.flat(ix, iy) : -1;
      add_flux(fl, fr, by_face_[fy(ix, iy)]);
    }
  return rate;
}

void MicroStepper::step(MicroState& state, double dt) {
  const MicroDomain& d = *domain_;
  const double h = d.h;
  if (dt <= 0) throw ConfigError("micro time step must be positive");
  const double umax_now = state.u.size() ? state.u.cwiseAbs().maxCoeff() : 0.0;
  if (umax_now > m_bound_ * (1.0 + opts_.linf_margin))
    throw SolverError("micro state exceeded its sup bound: " +
                      std::to_string(umax_now) + " > " +
                      std::to_string(m_bound_));
  if (dt > max_stable_dt(std::max(umax_now, m_bound_)) * (1.0 + 1e-12))
    throw SolverError("micro step " + std::to_string(dt) +
                      " above the advective stability bound " +
                      std::to_string(max_stable_dt(m_bound_)));

  Vec rate = advective_rate(state.u);

  // Robin flux on obstacle faces, explicit (the flux is O(epsilon))
  for (const auto& face : d.obstacle_faces) {
    const int p = face.cell;
    const double g = gn_kind_ == RobinKind::linear ? state.u[p] : gn_k_;
    rate[p] -= epsilon_ * g / h;
  }

  rate += f_cell_;

  Vec ustar = state.u + dt * rate;

  if (factored_dt_ < 0 || std::abs(dt - factored_dt_) > 1e-14 * dt)
    factorize(dt);
  state.u = solver_.solve(ustar);
  if (solver_.info() != Eigen::Success)
    throw SolverError("micro implicit diffusion solve failed");
  state.t += dt;
}

double MicroStepper::mass(const Vec& u) const {
  return u.sum() * domain_->h * domain_->h;
}

double MicroStepper::dissipation(const Vec& u) const {
  const MicroDomain& d = *domain_;
  const int n = d.n;
  const double h = d.h;
  double total = 0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 1; ix < n; ++ix) {
      const int l = d.flat(ix - 1, iy), r = d.flat(ix, iy);
      if (!d.fluid[l] || !d.fluid[r]) continue;
      const double g = (u[d.index[r]] - u[d.index[l]]) / h;
      total += d1_face_[fx(ix, iy)] * g * g * h * h;
    }
  for (int iy = 1; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int l = d.flat(ix, iy - 1), r = d.flat(ix, iy);
      if (!d.fluid[l] || !d.fluid[r]) continue;
      const double g = (u[d.index[r]] - u[d.index[l]]) / h;
      total += d2_face_[fy(ix, iy)] * g * g * h * h;
    }
  return total;
}

MicroRunResult run_micro(MicroStepper& stepper,
                         const std::vector<double>& snapshot_times,
                         double dt_cap) {
  MicroRunResult res;
  MicroState s = stepper.initial_state();
  const double e0 = 0.5 * s.u.squaredNorm() * stepper.domain().h *
                    stepper.domain().h;
  const double fnorm2 = 0.5 * stepper.source_l2sq();
  res.min_u = s.u.size() ? s.u.minCoeff() : 0.0;
  res.max_u = s.u.size() ? s.u.maxCoeff() : 0.0;

  auto record = [&](const MicroState& st) {
    const double energy = 0.5 * st.u.squaredNorm() * stepper.domain().h *
                          stepper.domain().h;
    res.snapshots.push_back(st);
    res.summary.push_back({st.t, stepper.mass(st.u),
                           st.u.size() ? st.u.minCoeff() : 0.0,
                           st.u.size() ? st.u.maxCoeff() : 0.0, energy});
  };

  for (double target : snapshot_times) {
    if (target < s.t - 1e-12)
      throw ConfigError("micro snapshot times must be nondecreasing");
    const double span = target - s.t;
    if (span > 1e-14) {
      const double bound =
          std::min(dt_cap, stepper.max_stable_dt(stepper.m_bound()));
      const int steps =
          std::max(1, static_cast<int>(std::ceil(span / bound - 1e-12)));
      const double dt = span / steps;
      for (int k = 0; k < steps; ++k) {
        stepper.step(s, dt);
        res.min_u = std::min(res.min_u, s.u.minCoeff());
        res.max_u = std::max(res.max_u, s.u.maxCoeff());
        res.dissipation_integral += dt * stepper.dissipation(s.u);
      }
      s.t = target;
    }
    record(s);
    const double energy = res.summary.back()[4];
    const double bound = std::exp(s.t) * (e0 + s.t * fnorm2) + 1e-12;
    if (energy > 1.05 * bound) res.energy_ok = false;
  }
  if (res.max_u > stepper.m_bound() * (1.0 + 1e-6)) res.linf_ok = false;
  return res;
}

bool interp_micro(const MicroDomain& d, const Vec& u, const Vector2& x,
                  double* out) {
  const int n = d.n;
  const double h = d.h;
  const double gx = (x[0] + d.halfwidth) / h;
  const double gy = (x[1] + d.halfwidth) / h;
  const int cx = std::clamp(static_cast<int>(std::floor(gx)), 0, n - 1);
  const int cy = std::clamp(static_cast<int>(std::floor(gy)), 0, n - 1);
  if (!d.fluid[d.flat(cx, cy)]) return false;

  const double sx = gx - 0.5, sy = gy - 0.5;
  int i0 = static_cast<int>(std::floor(sx));
  int j0 = static_cast<int>(std::floor(sy));
  const double wx = sx - i0, wy = sy - j0;
  i0 = std::clamp(i0, 0, n - 1);
  j0 = std::clamp(j0, 0, n - 1);
  const int i1 = std::min(i0 + 1, n - 1);
  const int j1 = std::min(j0 + 1, n - 1);

  const int corner[4] = {d.flat(i0, j0), d.flat(i1, j0), d.flat(i0, j1),
                         d.flat(i1, j1)};
  const double weight[4] = {(1 - wx) * (1 - wy), wx * (1 - wy), (1 - wx) * wy,
                            wx * wy};
  double val = 0, wsum = 0;
  for (int k = 0; k < 4; ++k) {
    if (!d.fluid[corner[k]]) continue;
    val += weight[k] * u[d.index[corner[k]]];
    wsum += weight[k];
  }
  if (wsum <= 0) {
    *out = u[d.index[d.flat(cx, cy)]];
    return true;
  }
  *out = val / wsum;
  return true;
}

MovingFrameField shift_to_moving_frame(const MicroState& state,
                                       const Vector2& Bstar, int m,
                                       double halfwidth) {
  const MicroDomain& d = *state.domain;
  const Vector2 shift = Bstar * (state.t / d.epsilon);
  const double hm = 2.0 * halfwidth / m;

  // the whole sampled window must stay inside the micro box
  double need = 0;
  for (int a = 0; a < 2; ++a)
    need = std::max(need, halfwidth + std::abs(shift[a]));
  if (need > d.halfwidth + 1e-12)
    throw SolverError("moving-frame window leaves the micro box; requires "
                      "micro halfwidth >= " + std::to_string(need));

  MovingFrameField out;
  out.m = m;
  out.halfwidth = halfwidth;
  out.values = Vec::Zero(m * m);
  out.mask.assign(static_cast<size_t>(m) * m, 0);
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      const Vector2 x(-halfwidth + (ix + 0.5) * hm,
                      -halfwidth + (iy + 0.5) * hm);
      double v = 0;
      if (interp_micro(d, state.u, x + shift, &v)) {
        out.values[ix + m * iy] = v;
        out.mask[ix + m * iy] = 1;
      }
    }
  return out;
}

}  // namespace driftscale
