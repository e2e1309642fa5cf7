#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <queue>

#include "driftscale/grid.hpp"

using namespace driftscale;

namespace {

CellGeometry square(double side = 0.25) {
  return CellGeometry{ObstacleKind::axis_square, side, {0.5, 0.5}};
}

// independent count of obstacle copies by flood-filling solid components
int count_solid_components(const MicroDomain& d) {
  std::vector<char> seen(d.fluid.size(), 0);
  int components = 0;
  for (int start = 0; start < d.n * d.n; ++start) {
    if (d.fluid[start] || seen[start]) continue;
    ++components;
    std::queue<int> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
      const int f = q.front();
      q.pop();
      const int ix = f % d.n, iy = f / d.n;
      const int nb[4][2] = {{ix + 1, iy}, {ix - 1, iy}, {ix, iy + 1}, {ix, iy - 1}};
      for (auto& [jx, jy] : nb) {
        if (!d.in_range(jx, jy)) continue;
        const int g = d.flat(jx, jy);
        if (!d.fluid[g] && !seen[g]) {
          seen[g] = 1;
          q.push(g);
        }
      }
    }
  }
  return components;
}

}  // namespace

TEST_CASE("empty cell") {
  const CellGrid g = build_cell_grid(CellGeometry{}, 32);
  CHECK(g.fluid_area == 1.0);
  CHECK(g.obstacle_perimeter == 0.0);
  CHECK(g.fluid_count() == 32 * 32);
  CHECK(g.boundary_faces.empty());
}

TEST_CASE("centered square obstacle") {
  const CellGrid g = build_cell_grid(square(), 32);
  CHECK(g.fluid_area == doctest::Approx(0.9375).epsilon(1e-15));
  CHECK(g.obstacle_perimeter == 1.0);
  CHECK(g.fluid_count() == 32 * 32 - 8 * 8);
  CHECK(g.boundary_faces.size() == 32);  // 8 faces per side

  for (const auto& face : g.boundary_faces) {
    const int f = g.cells[face.cell];
    CHECK(g.fluid[f]);
    const int nb = g.neighbor(f, face.axis, face.sign);
    CHECK_FALSE(g.fluid[nb]);
  }
}

TEST_CASE("disk obstacle stores analytic measures") {
  const CellGrid g = build_cell_grid(
      CellGeometry{ObstacleKind::disk, 0.25, {0.5, 0.5}}, 64);
  CHECK(g.fluid_area == doctest::Approx(1.0 - M_PI / 16).epsilon(1e-12));
  CHECK(g.obstacle_perimeter == doctest::Approx(M_PI / 2).epsilon(1e-12));
  // staircase mask is close to the analytic area
  const double mask_area = g.h * g.h * g.fluid_count();
  CHECK(mask_area == doctest::Approx(g.fluid_area).epsilon(0.02));
}

TEST_CASE("geometry and alignment errors") {
  CHECK_THROWS_AS(build_cell_grid(square(), 4), ConfigError);
  CHECK_THROWS_AS(build_cell_grid(square(0.3), 32), ConfigError);  // 0.3*32
  CHECK_THROWS_AS(build_cell_grid(square(1.0), 32), ConfigError);  // touches
  CHECK_THROWS_AS(
      build_cell_grid(CellGeometry{ObstacleKind::disk, 0.5, {0.5, 0.5}}, 32),
      ConfigError);
  CHECK_THROWS_AS(
      build_cell_grid(CellGeometry{ObstacleKind::axis_square, 0.25, {0.9, 0.5}},
                      32),
      ConfigError);
}

TEST_CASE("refinement doubles the boundary face count") {
  const auto g32 = build_cell_grid(square(), 32);
  const auto g64 = build_cell_grid(square(), 64);
  CHECK(g64.boundary_faces.size() == 2 * g32.boundary_faces.size());
  CHECK(g64.obstacle_perimeter == g32.obstacle_perimeter);
}

TEST_CASE("periodic neighbors invert") {
  const CellGrid g = build_cell_grid(square(), 16);
  for (int f = 0; f < g.n * g.n; ++f)
    for (int axis = 0; axis < 2; ++axis) {
      CHECK(g.neighbor(g.neighbor(f, axis, +1), axis, -1) == f);
      CHECK(g.neighbor(g.neighbor(f, axis, -1), axis, +1) == f);
    }
}

TEST_CASE("micro domain without obstacle") {
  const MicroDomain d = build_micro_domain(CellGeometry{}, 0.25, 1.0, 16);
  CHECK(d.n == 8 * 16);
  CHECK(d.fluid_fraction() == 1.0);
  CHECK(d.obstacle_copies == 0);
  CHECK(d.obstacle_faces.empty());
}

TEST_CASE("micro domain with square obstacle") {
  const MicroDomain d = build_micro_domain(square(), 0.25, 1.0, 16);
  CHECK(d.fluid_fraction() == 0.9375);
  CHECK(d.obstacle_copies == 64);
  CHECK(count_solid_components(d) == 64);

  const MicroDomain d8 = build_micro_domain(square(), 0.125, 1.0, 16);
  CHECK(d8.fluid_fraction() == 0.9375);
  CHECK(count_solid_components(d8) == 256);
}

TEST_CASE("micro fluid fraction matches the cell grid exactly") {
  const CellGrid g = build_cell_grid(square(), 16);
  for (double eps : {0.5, 0.25, 0.125}) {
    const MicroDomain d = build_micro_domain(square(), eps, 1.0, 16);
    CHECK(d.fluid_fraction() == g.h * g.h * g.fluid_count());
  }
}

TEST_CASE("micro tiling errors") {
  CHECK_THROWS_AS(build_micro_domain(square(), 0.3, 1.0, 16), ConfigError);
  CHECK_THROWS_AS(build_micro_domain(square(), 0.25, 1.0, 4), ConfigError);
}

TEST_CASE("micro obstacle faces separate fluid from solid") {
  const MicroDomain d = build_micro_domain(square(), 0.25, 0.5, 16);
  CHECK(d.obstacle_faces.size() == 4 * 32u);  // 4 copies, 8 faces per side
  for (const auto& face : d.obstacle_faces) {
    const int f = d.cells[face.cell];
    const int ix = f % d.n + (face.axis == 0 ? face.sign : 0);
    const int iy = f / d.n + (face.axis == 1 ? face.sign : 0);
    REQUIRE(d.in_range(ix, iy));
    CHECK_FALSE(d.fluid[d.flat(ix, iy)]);
  }
}
