#include "driftscale/grid.hpp"

#include <cmath>

namespace driftscale {

namespace {

bool nearly_integer(double x, double tol = 1e-9) {
  return std::abs(x - std::round(x)) < tol;
}

void check_geometry(const CellGeometry& geom) {
  if (geom.kind == ObstacleKind::none) return;
  if (geom.size <= 0) throw ConfigError("obstacle size must be positive");
  const double half = geom.kind == ObstacleKind::axis_square ? geom.size / 2
                                                             : geom.size;
  for (int a = 0; a < 2; ++a) {
    if (geom.center[a] - half <= 0.0 || geom.center[a] + half >= 1.0)
      throw ConfigError("obstacle must be strictly interior to the unit cell");
  }
}

void check_square_alignment(const CellGeometry& geom, int n) {
  if (geom.kind != ObstacleKind::axis_square) return;
  if (!nearly_integer(geom.size * n) || !nearly_integer(geom.center[0] * n) ||
      !nearly_integer(geom.center[1] * n))
    throw ConfigError("square obstacle not aligned to the grid: side*n and "
                      "center*n must be integral (n=" + std::to_string(n) + ")");
}

std::vector<std::uint8_t> build_mask(const CellGeometry& geom, int n) {
  std::vector<std::uint8_t> fluid(static_cast<size_t>(n) * n, 1);
  if (geom.kind == ObstacleKind::none) return fluid;
  const double h = 1.0 / n;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      Vector2 c((ix + 0.5) * h, (iy + 0.5) * h);
      if (in_obstacle(geom, c)) fluid[ix + n * iy] = 0;
    }
  return fluid;
}

}  // namespace

bool in_obstacle(const CellGeometry& geom, const Vector2& y) {
  switch (geom.kind) {
    case ObstacleKind::none:
      return false;
    case ObstacleKind::axis_square:
      return std::abs(y[0] - geom.center[0]) < geom.size / 2 &&
             std::abs(y[1] - geom.center[1]) < geom.size / 2;
    case ObstacleKind::disk:
      return (y - geom.center).norm() < geom.size;
  }
  return false;
}

CellGrid build_cell_grid(const CellGeometry& geom, int n) {
  if (n < 8) throw ConfigError("cell grid resolution must be at least 8");
  check_geometry(geom);
  check_square_alignment(geom, n);

  CellGrid g;
  g.n = n;
  g.h = 1.0 / n;
  g.geom = geom;
  g.fluid = build_mask(geom, n);
  g.index.assign(g.fluid.size(), -1);
  for (int f = 0; f < n * n; ++f) {
    if (g.fluid[f]) {
      g.index[f] = static_cast<int>(g.cells.size());
      g.cells.push_back(f);
    }
  }
  if (g.cells.empty()) throw ConfigError("obstacle fills the whole cell");

  for (int f = 0; f < n * n; ++f) {
    if (!g.fluid[f]) continue;
    for (int axis = 0; axis < 2; ++axis)
      for (int dir = -1; dir <= 1; dir += 2) {
        const int nb = g.neighbor(f, axis, dir);
        if (g.fluid[nb]) continue;
        BoundaryFace face;
        face.cell = g.index[f];
        face.axis = axis;
        face.sign = dir;
        Vector2 mid = g.cell_center(f);
        mid[axis] += 0.5 * dir * g.h;
        face.midpoint = mid;
        g.boundary_faces.push_back(face);
      }
  }

  switch (geom.kind) {
    case ObstacleKind::none:
      g.fluid_area = 1.0;
      g.obstacle_perimeter = 0.0;
      break;
    case ObstacleKind::axis_square:
      g.fluid_area = g.h * g.h * g.fluid_count();  // exact: 1 - side^2
      g.obstacle_perimeter = 4.0 * geom.size;
      break;
    case ObstacleKind::disk:
      // analytic values; the mask itself is a staircase approximation
      g.fluid_area = 1.0 - M_PI * geom.size * geom.size;
      g.obstacle_perimeter = 2.0 * M_PI * geom.size;
      break;
  }
  return g;
}

MicroDomain build_micro_domain(const CellGeometry& geom, double epsilon,
                               double halfwidth, int cells_per_eps) {
  if (epsilon <= 0) throw ConfigError("epsilon must be positive");
  if (cells_per_eps < 8)
    throw ConfigError("cells_per_eps must be at least 8");
  const double ratio = 2.0 * halfwidth / epsilon;
  if (!nearly_integer(ratio))
    throw ConfigError("micro box does not tile: 2*halfwidth/epsilon = " +
                      std::to_string(ratio) + " is not integral");
  const int eps_cells = static_cast<int>(std::round(ratio));
  if (eps_cells < 1) throw ConfigError("micro box smaller than one cell");
  check_geometry(geom);
  check_square_alignment(geom, cells_per_eps);

  MicroDomain d;
  d.epsilon = epsilon;
  d.halfwidth = halfwidth;
  d.cells_per_eps = cells_per_eps;
  d.n = eps_cells * cells_per_eps;
  d.h = epsilon / cells_per_eps;
  d.geom = geom;

  // one epsilon-cell worth of mask, tiled over the box
  const auto tile = build_mask(geom, cells_per_eps);
  const int nc = cells_per_eps;
  d.fluid.assign(static_cast<size_t>(d.n) * d.n, 1);
  for (int iy = 0; iy < d.n; ++iy)
    for (int ix = 0; ix < d.n; ++ix)
      d.fluid[d.flat(ix, iy)] = tile[(ix % nc) + nc * (iy % nc)];

  d.index.assign(d.fluid.size(), -1);
  for (int f = 0; f < d.n * d.n; ++f) {
    if (d.fluid[f]) {
      d.index[f] = static_cast<int>(d.cells.size());
      d.cells.push_back(f);
    }
  }

  int solid = d.n * d.n - d.fluid_count();
  int solid_per_copy = nc * nc - [&] {
    int c = 0;
    for (auto v : tile) c += v;
    return c;
  }();
  d.obstacle_copies = solid_per_copy > 0 ? solid / solid_per_copy : 0;

  for (int iy = 0; iy < d.n; ++iy)
    for (int ix = 0; ix < d.n; ++ix) {
      const int f = d.flat(ix, iy);
      if (!d.fluid[f]) continue;
      for (int axis = 0; axis < 2; ++axis)
        for (int dir = -1; dir <= 1; dir += 2) {
          int jx = ix + (axis == 0 ? dir : 0);
          int jy = iy + (axis == 1 ? dir : 0);
          if (!d.in_range(jx, jy)) continue;  // outer box boundary
          if (d.fluid[d.flat(jx, jy)]) continue;
          BoundaryFace face;
          face.cell = d.index[f];
          face.axis = axis;
          face.sign = dir;
          Vector2 mid = d.cell_center(f);
          mid[axis] += 0.5 * dir * d.h;
          face.midpoint = mid;
          d.obstacle_faces.push_back(face);
        }
    }
  return d;
}

}  // namespace driftscale
