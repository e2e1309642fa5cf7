#pragma once

#include <cstdint>
#include <vector>

#include "driftscale/types.hpp"

namespace driftscale {

enum class ObstacleKind { none, axis_square, disk };

// Unit cell [0,1]^2 with an impenetrable obstacle strictly inside it.
struct CellGeometry {
  ObstacleKind kind = ObstacleKind::none;
  double size = 0.25;            // square side length or disk radius
  Vector2 center{0.5, 0.5};
};

bool in_obstacle(const CellGeometry& geom, const Vector2& y);

// One face of the obstacle boundary. `cell` is the compressed index of the
// adjacent fluid cell; the outward normal is sign * e_axis and points into
// the obstacle.
struct BoundaryFace {
  int cell = -1;
  int axis = 0;    // 0 = x, 1 = y
  int sign = 1;    // +1 or -1
  Vector2 midpoint{0, 0};
};

// Cell-centered finite-volume discretization of the perforated unit cell
// with periodic wrap in both directions. Solid cells are masked out; fluid
// cells carry a compressed index used by all field vectors.
struct CellGrid {
  int n = 0;
  double h = 0;
  CellGeometry geom;
  std::vector<std::uint8_t> fluid;   // n*n mask, flat = ix + n*iy
  std::vector<int> index;            // flat -> compressed fluid index, -1 if solid
  std::vector<int> cells;            // compressed -> flat
  std::vector<BoundaryFace> boundary_faces;
  double fluid_area = 0;             // |Z|
  double obstacle_perimeter = 0;     // |Gamma_N|

  int flat(int ix, int iy) const { return ix + n * iy; }
  bool is_fluid(int ix, int iy) const { return fluid[flat(ix, iy)] != 0; }
  int fluid_count() const { return static_cast<int>(cells.size()); }

  Vector2 cell_center(int f) const {
    return Vector2((f % n + 0.5) * h, (f / n + 0.5) * h);
  }

  // Periodic neighbor of a flat index along `axis` in direction `dir` (+-1).
  int neighbor(int f, int axis, int dir) const {
    int ix = f % n, iy = f / n;
    if (axis == 0)
      ix = (ix + dir + n) % n;
    else
      iy = (iy + dir + n) % n;
    return flat(ix, iy);
  }
};

CellGrid build_cell_grid(const CellGeometry& geom, int n);

// Truncated periodically perforated box [-L, L]^2 at microscopic scale:
// the fluid mask tiles epsilon-scaled copies of the cell obstacle, with
// whole cells only. Cell size is epsilon / cells_per_eps.
struct MicroDomain {
  double epsilon = 0;
  double halfwidth = 0;          // L
  int cells_per_eps = 0;
  int n = 0;                     // cells per side
  double h = 0;
  CellGeometry geom;
  std::vector<std::uint8_t> fluid;
  std::vector<int> index;
  std::vector<int> cells;
  std::vector<BoundaryFace> obstacle_faces;  // midpoints in box coordinates
  int obstacle_copies = 0;

  int flat(int ix, int iy) const { return ix + n * iy; }
  bool in_range(int ix, int iy) const {
    return ix >= 0 && ix < n && iy >= 0 && iy < n;
  }
  bool is_fluid(int ix, int iy) const { return fluid[flat(ix, iy)] != 0; }
  int fluid_count() const { return static_cast<int>(cells.size()); }

  Vector2 cell_center(int f) const {
    return Vector2(-halfwidth + (f % n + 0.5) * h,
                   -halfwidth + (f / n + 0.5) * h);
  }

  double fluid_fraction() const {
    return static_cast<double>(cells.size()) / (static_cast<double>(n) * n);
  }
};

MicroDomain build_micro_domain(const CellGeometry& geom, double epsilon,
                               double halfwidth, int cells_per_eps);

}  // namespace driftscale
