#include "driftscale/macro_solver.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace driftscale {

MacroState make_macro_state(double halfwidth, int m) {
  if (m < 4) throw ConfigError("macro grid needs at least 4 cells per side");
  if (halfwidth <= 0) throw ConfigError("macro halfwidth must be positive");
  MacroState s;
  s.halfwidth = halfwidth;
  s.m = m;
  s.h = 2.0 * halfwidth / m;
  s.u = Vec::Zero(m * m);
  return s;
}

MacroState step_macro(const MacroState& state, const EffectiveTable& table,
                      double dt, const Vec& fbar, RobinKind gn_kind,
                      double gn_k, bool* clamped) {
  if (dt <= 0) throw ConfigError("macro time step must be positive");
  const int m = state.m;
  const double h = state.h;
  const int nn = m * m;
  if (fbar.size() != nn) throw ConfigError("macro source size mismatch");

  // lagged tensor per cell
  std::vector<Matrix2> dc(nn);
  bool clamped_any = false;
  for (int f = 0; f < nn; ++f) {
    bool clamped = false;
    dc[f] = eval_Dstar(table, state.u[f], &clamped);
    clamped_any |= clamped;
  }

  const double lambda = table.fluid_area > 0
                            ? table.obstacle_perimeter / table.fluid_area
                            : 0.0;

  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(nn) * 10);
  Vec rhs = state.u + dt * fbar;
  Vec diag = Vec::Ones(nn);
  if (gn_kind == RobinKind::linear)
    diag.array() += dt * lambda;
  else
    rhs.array() -= dt * lambda * gn_k;

  const double beta = dt / (h * h);
  auto add = [&](int row, int col, double v) { trip.emplace_back(row, col, v); };

  // interior x-faces: flux -(D11 du/dx + D12 du/dy), conservative on both rows
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix + 1 < m; ++ix) {
      const int p = state.flat(ix, iy);
      const int e = state.flat(ix + 1, iy);
      const Matrix2 df = 0.5 * (dc[p] + dc[e]);
      const double a = beta * df(0, 0);
      add(p, p, a);
      add(p, e, -a);
      add(e, e, a);
      add(e, p, -a);
      // cross term with the four-cell averaged y-gradient
      const double c = beta * df(0, 1) / 4.0;
      for (int base : {p, e}) {
        const int bx = base % m, by = base / m;
        if (by + 1 < m) {
          add(p, state.flat(bx, by + 1), -c);
          add(e, state.flat(bx, by + 1), c);
        }
        if (by - 1 >= 0) {
          add(p, state.flat(bx, by - 1), c);
          add(e, state.flat(bx, by - 1), -c);
        }
      }
    }
  // interior y-faces
  for (int iy = 0; iy + 1 < m; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      const int p = state.flat(ix, iy);
      const int nb = state.flat(ix, iy + 1);
      const Matrix2 df = 0.5 * (dc[p] + dc[nb]);
      const double a = beta * df(1, 1);
      add(p, p, a);
      add(p, nb, -a);
      add(nb, nb, a);
      add(nb, p, -a);
      const double c = beta * df(1, 0) / 4.0;
      for (int base : {p, nb}) {
        const int bx = base % m, by = base / m;
        if (bx + 1 < m) {
          add(p, state.flat(bx + 1, by), -c);
          add(nb, state.flat(bx + 1, by), c);
        }
        if (bx - 1 >= 0) {
          add(p, state.flat(bx - 1, by), c);
          add(nb, state.flat(bx - 1, by), -c);
        }
      }
    }
  // outer Dirichlet faces, normal term only (half-cell distance)
  for (int iy = 0; iy < m; ++iy) {
    add(state.flat(0, iy), state.flat(0, iy), beta * 2.0 * dc[state.flat(0, iy)](0, 0));
    add(state.flat(m - 1, iy), state.flat(m - 1, iy),
        beta * 2.0 * dc[state.flat(m - 1, iy)](0, 0));
  }
  for (int ix = 0; ix < m; ++ix) {
    add(state.flat(ix, 0), state.flat(ix, 0), beta * 2.0 * dc[state.flat(ix, 0)](1, 1));
    add(state.flat(ix, m - 1), state.flat(ix, m - 1),
        beta * 2.0 * dc[state.flat(ix, m - 1)](1, 1));
  }
  for (int f = 0; f < nn; ++f) add(f, f, diag[f]);

  SparseMat A(nn, nn);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<SparseMat> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw SolverError("macro implicit solve: factorization failed");
  MacroState next = state;
  next.u = lu.solve(rhs);
  if (lu.info() != Eigen::Success)
    throw SolverError("macro implicit solve failed");
  next.t = state.t + dt;
  if (clamped) *clamped = clamped_any;
  return next;
}

MacroRunResult run_macro(const MacroState& initial, const EffectiveTable& table,
                         const Vec& fbar, RobinKind gn_kind, double gn_k,
                         const std::vector<double>& snapshot_times, double dt) {
  MacroRunResult res;
  MacroState s = initial;
  auto record = [&](const MacroState& st) {
    res.snapshots.push_back(st);
    res.summary.push_back({st.t, st.mass(), st.u.minCoeff(), st.u.maxCoeff(),
                           st.l2_norm()});
  };
  auto check_boundary = [&](const MacroState& st) {
    double b = 0;
    for (int i = 0; i < st.m; ++i) {
      b = std::max({b, std::abs(st.u[st.flat(i, 0)]),
                    std::abs(st.u[st.flat(i, st.m - 1)]),
                    std::abs(st.u[st.flat(0, i)]),
                    std::abs(st.u[st.flat(st.m - 1, i)])});
    }
    if (b > 1e-8) res.boundary_warning = true;
  };

  for (double target : snapshot_times) {
    if (target < s.t - 1e-12)
      throw ConfigError("macro snapshot times must be nondecreasing");
    const double span = target - s.t;
    if (span > 1e-14) {
      const int steps = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-12)));
      const double step_dt = span / steps;
      for (int k = 0; k < steps; ++k) {
        bool clamped = false;
        s = step_macro(s, table, step_dt, fbar, gn_kind, gn_k, &clamped);
        if (clamped) res.clamp_warning = true;
      }
      s.t = target;  // avoid accumulated round-off in the time stamp
    }
    check_boundary(s);
    record(s);
  }
  return res;
}

}  // namespace driftscale
