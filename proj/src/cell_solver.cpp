#include "driftscale/cell_solver.hpp"

#include <cmath>
#include <string>

#include "driftscale/linsolve.hpp"

namespace driftscale {

namespace {

double face_b(const DiscreteCoefficients& disc, const CellGrid& grid, int flat,
              int axis, int dir) {
  // face of cell `flat` in direction (axis, dir); west/south arrays store
  // the face shared with the previous cell
  if (axis == 0)
    return dir > 0 ? disc.bx_face[grid.neighbor(flat, 0, +1)]
                   : disc.bx_face[flat];
  return dir > 0 ? disc.by_face[grid.neighbor(flat, 1, +1)]
                 : disc.by_face[flat];
}

double face_d(const DiscreteCoefficients& disc, const CellGrid& grid, int flat,
              int axis, int dir) {
  if (axis == 0)
    return dir > 0 ? disc.d1_face_x[grid.neighbor(flat, 0, +1)]
                   : disc.d1_face_x[flat];
  return dir > 0 ? disc.d2_face_y[grid.neighbor(flat, 1, +1)]
                 : disc.d2_face_y[flat];
}

PeriodicField run_meanzero_solve(const SparseMat& A, const Vec& rhs,
                                 const SolveOptions& opts) {
  PeriodicField out;
  const int m = static_cast<int>(rhs.size());
  auto res = solve_singular_meanzero(A, out.values, rhs, opts.solve_tol,
                                     opts.max_iter_factor * m);
  out.residual_norm = res.residual;
  return out;
}

}  // namespace

PeriodicField solve_periodic_poisson(const CellGrid& grid, const Vec& rhs,
                                     const Vec& face_flux,
                                     const SolveOptions& opts) {
  const int m = grid.fluid_count();
  const double h = grid.h;
  if (rhs.size() != m)
    throw ConfigError("rhs size does not match the fluid cell count");
  if (face_flux.size() != static_cast<Eigen::Index>(grid.boundary_faces.size()))
    throw ConfigError("face flux size does not match the boundary face count");

  const double vol_sum = rhs.sum() * h * h;
  const double flux_sum = face_flux.sum() * h;
  const double scale =
      std::max({1e-30, std::abs(vol_sum), std::abs(flux_sum),
                rhs.cwiseAbs().maxCoeff() * h * h});
  if (std::abs(vol_sum - flux_sum) > opts.compat_tol * scale)
    throw CompatibilityError(
        "incompatible data: integral of rhs (" + std::to_string(vol_sum) +
        ") does not match the boundary flux (" + std::to_string(flux_sum) + ")");

  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(m) * 5);
  Vec b = rhs;
  for (int p = 0; p < m; ++p) {
    const int f = grid.cells[p];
    double diag = 0;
    for (int axis = 0; axis < 2; ++axis)
      for (int dir = -1; dir <= 1; dir += 2) {
        const int nb = grid.neighbor(f, axis, dir);
        if (!grid.fluid[nb]) continue;  // obstacle face: flux prescribed
        diag += 1.0 / (h * h);
        trip.emplace_back(p, grid.index[nb], -1.0 / (h * h));
      }
    trip.emplace_back(p, p, diag);
  }
  for (size_t k = 0; k < grid.boundary_faces.size(); ++k)
    b[grid.boundary_faces[k].cell] -= face_flux[k] / h;

  SparseMat A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
  return run_meanzero_solve(A, b, opts);
}

std::pair<PeriodicField, PeriodicField> solve_aux_G(
    const CellGrid& grid, const DiscreteCoefficients& disc,
    const SolveOptions& opts) {
  const int m = grid.fluid_count();
  const Vector2 bstar = integrate_B(disc, grid) / grid.fluid_area;
  Vec rhs1(m), rhs2(m);
  for (int p = 0; p < m; ++p) {
    const int f = grid.cells[p];
    rhs1[p] = bstar[0] - disc.bx_cell[f];
    rhs2[p] = bstar[1] - disc.by_cell[f];
  }
  const Vec zero_flux = Vec::Zero(grid.boundary_faces.size());
  return {solve_periodic_poisson(grid, rhs1, zero_flux, opts),
          solve_periodic_poisson(grid, rhs2, zero_flux, opts)};
}

std::pair<PeriodicField, PeriodicField> solve_aux_H(
    const CellGrid& grid, const DiscreteCoefficients& disc,
    const SolveOptions& opts) {
  const int m = grid.fluid_count();
  Vec rhs1(m), rhs2(m);
  for (int p = 0; p < m; ++p) {
    const int f = grid.cells[p];
    rhs1[p] = disc.bx_cell[f] * disc.c_cell[f];
    rhs2[p] = disc.by_cell[f] * disc.c_cell[f];
  }
  const Vec zero_flux = Vec::Zero(grid.boundary_faces.size());
  return {solve_periodic_poisson(grid, rhs1, zero_flux, opts),
          solve_periodic_poisson(grid, rhs2, zero_flux, opts)};
}

CellCorrector solve_corrector(const CellGrid& grid,
                              const DiscreteCoefficients& disc, double u0,
                              const SolveOptions& opts) {
  const int m = grid.fluid_count();
  const double h = grid.h;
  const Vector2 bstar = integrate_B(disc, grid) / grid.fluid_area;

  double max_conv = 0, min_d = std::numeric_limits<double>::infinity();
  for (int p = 0; p < m; ++p) {
    const int f = grid.cells[p];
    const double q = 1.0 - 2.0 * disc.c_cell[f] * u0;
    max_conv = std::max(max_conv, std::hypot(disc.bx_cell[f], disc.by_cell[f]) *
                                      std::abs(q));
    min_d = std::min({min_d, disc.d1_cell[f], disc.d2_cell[f]});
  }
  const double peclet = max_conv * h / min_d;
  if (peclet >= 2.0)
    throw SolverError("cell Peclet number " + std::to_string(peclet) +
                      " >= 2 at u0 = " + std::to_string(u0) +
                      "; refine the cell grid");

  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(m) * 5);
  Vec rhs1(m), rhs2(m);
  for (int p = 0; p < m; ++p) {
    const int f = grid.cells[p];
    double diag = 0;
    double r1 = bstar[0] - disc.bx_cell[f] * (1.0 - 2.0 * disc.c_cell[f] * u0);
    double r2 = bstar[1] - disc.by_cell[f] * (1.0 - 2.0 * disc.c_cell[f] * u0);
    for (int axis = 0; axis < 2; ++axis)
      for (int dir = -1; dir <= 1; dir += 2) {
        const int nb = grid.neighbor(f, axis, dir);
        if (!grid.fluid[nb]) continue;  // total flux vanishes on the obstacle
        const int q = grid.index[nb];
        const double dcoef = face_d(disc, grid, f, axis, dir);
        const double bf = face_b(disc, grid, f, axis, dir);
        const double cf = 0.5 * (disc.c_cell[f] + disc.c_cell[nb]);
        const double qf = 1.0 - 2.0 * cf * u0;
        diag += dcoef / (h * h);
        trip.emplace_back(p, q, -dcoef / (h * h));
        const double conv = dir * bf * qf / (2.0 * h);
        diag += conv;
        trip.emplace_back(p, q, conv);
        // unit-vector diffusive flux through this face, moved to the rhs
        if (axis == 0)
          r1 += dcoef * dir / h;
        else
          r2 += dcoef * dir / h;
      }
    trip.emplace_back(p, p, diag);
    rhs1[p] = r1;
    rhs2[p] = r2;
  }

  for (const Vec* r : {&rhs1, &rhs2}) {
    const double total = r->sum() * h * h;
    const double scale = std::max(1e-30, r->cwiseAbs().maxCoeff() * h * h * m);
    if (std::abs(total) > opts.compat_tol * std::max(1.0, scale))
      throw CompatibilityError("cell problem data incompatible: rhs integral " +
                               std::to_string(total));
  }

  SparseMat A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());

  CellCorrector c;
  c.u0 = u0;
  c.w1 = run_meanzero_solve(A, rhs1, opts);
  c.w2 = run_meanzero_solve(A, rhs2, opts);
  c.grad = corrector_gradient_matrix(grid, c.w1, c.w2);
  return c;
}

std::vector<Matrix2> corrector_gradient_matrix(const CellGrid& grid,
                                               const PeriodicField& w1,
                                               const PeriodicField& w2) {
  const int m = grid.fluid_count();
  const double h = grid.h;
  std::vector<Matrix2> grad(m, Matrix2::Zero());
  const Vec* w[2] = {&w1.values, &w2.values};
  for (int p = 0; p < m; ++p) {
    const int f = grid.cells[p];
    for (int axis = 0; axis < 2; ++axis) {
      const int fp = grid.neighbor(f, axis, +1);
      const int fm = grid.neighbor(f, axis, -1);
      const bool has_p = grid.fluid[fp] != 0;
      const bool has_m = grid.fluid[fm] != 0;
      for (int j = 0; j < 2; ++j) {
        const Vec& wj = *w[j];
        double d = 0;
        if (has_p && has_m)
          d = (wj[grid.index[fp]] - wj[grid.index[fm]]) / (2.0 * h);
        else if (has_p)
          d = (wj[grid.index[fp]] - wj[p]) / h;
        else if (has_m)
          d = (wj[p] - wj[grid.index[fm]]) / h;
        grad[p](axis, j) = d;
      }
    }
  }
  return grad;
}

PeriodicField solve_indicator_potential(const CellGeometry& geom, int n,
                                        const SolveOptions& opts) {
  CellGeometry none;
  const CellGrid torus = build_cell_grid(none, n);
  int fluid_count = 0;
  std::vector<std::uint8_t> indicator(static_cast<size_t>(n) * n, 1);
  for (int f = 0; f < n * n; ++f) {
    if (in_obstacle(geom, torus.cell_center(f))) indicator[f] = 0;
    fluid_count += indicator[f];
  }
  // discrete mask fraction keeps the rhs mean exactly zero
  const double fraction = static_cast<double>(fluid_count) / (n * n);
  Vec rhs(n * n);
  for (int f = 0; f < n * n; ++f) rhs[f] = indicator[f] - fraction;
  return solve_periodic_poisson(torus, rhs, Vec::Zero(0), opts);
}

}  // namespace driftscale
