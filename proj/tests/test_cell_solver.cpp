#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "driftscale/cell_solver.hpp"

using namespace driftscale;

namespace {

CellGeometry square_geom() {
  return CellGeometry{ObstacleKind::axis_square, 0.25, {0.5, 0.5}};
}

CoefficientSet strip_set(double b_max = 1.0, double c0 = 1.0) {
  CoefficientSet s;
  s.b_kind = DriftKind::strip_shear;
  s.b_max = b_max;
  s.strip = 0.25;
  s.c_kind = CapacityKind::strip;
  s.c0 = c0;
  return s;
}

// L2 error of the Poisson solve against the manufactured solution
double manufactured_error(int n) {
  const CellGrid g = build_cell_grid(CellGeometry{}, n);
  Vec rhs(g.fluid_count());
  Vec exact(g.fluid_count());
  for (int p = 0; p < g.fluid_count(); ++p) {
    const Vector2 y = g.cell_center(g.cells[p]);
    rhs[p] = std::sin(2 * M_PI * y[0]) * std::cos(2 * M_PI * y[1]);
    exact[p] = rhs[p] / (8 * M_PI * M_PI);
  }
  const PeriodicField v = solve_periodic_poisson(g, rhs, Vec::Zero(0));
  return std::sqrt((v.values - exact).squaredNorm() * g.h * g.h);
}

double linf(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("zero data gives the zero field") {
  const CellGrid g = build_cell_grid(square_geom(), 32);
  const PeriodicField v = solve_periodic_poisson(
      g, Vec::Zero(g.fluid_count()), Vec::Zero(g.boundary_faces.size()));
  CHECK(linf(v.values) == 0.0);
}

TEST_CASE("manufactured solution converges at second order") {
  const double e32 = manufactured_error(32);
  const double e64 = manufactured_error(64);
  const double e128 = manufactured_error(128);
  const double r1 = std::log2(e32 / e64);
  const double r2 = std::log2(e64 / e128);
  CHECK(r1 == doctest::Approx(2.0).epsilon(0.1));
  CHECK(r2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("incompatible data is rejected") {
  const CellGrid g = build_cell_grid(CellGeometry{}, 16);
  CHECK_THROWS_AS(
      solve_periodic_poisson(g, Vec::Ones(g.fluid_count()), Vec::Zero(0)),
      CompatibilityError);
}

TEST_CASE("indicator potential vanishes without an obstacle") {
  const PeriodicField v = solve_indicator_potential(CellGeometry{}, 32);
  CHECK(linf(v.values) == 0.0);
}

TEST_CASE("indicator potential with an obstacle is mean free") {
  const PeriodicField v = solve_indicator_potential(square_geom(), 32);
  CHECK(linf(v.values) > 0.0);
  CHECK(std::abs(v.values.mean()) < 1e-12 * linf(v.values));
  CHECK(v.residual_norm < 1e-9);
}

TEST_CASE("drift potentials vanish in the trivial cases") {
  const CellGrid torus = build_cell_grid(CellGeometry{}, 32);
  SUBCASE("no drift") {
    const auto disc = sample_coefficients(CoefficientSet{}, torus);
    const auto [g1, g2] = solve_aux_G(torus, disc);
    CHECK(linf(g1.values) == 0.0);
    CHECK(linf(g2.values) == 0.0);
  }
  SUBCASE("constant drift on the torus") {
    CoefficientSet s;
    s.b_kind = DriftKind::constant;
    s.b_const = Vector2(0.7, -0.3);
    const auto disc = sample_coefficients(s, torus);
    const auto [g1, g2] = solve_aux_G(torus, disc);
    CHECK(linf(g1.values) < 1e-12);
    CHECK(linf(g2.values) < 1e-12);
  }
}

TEST_CASE("shear drift potential self-converges") {
  const CellGrid g64 = build_cell_grid(square_geom(), 64);
  const CellGrid g128 = build_cell_grid(square_geom(), 128);
  const auto d64 = sample_coefficients(strip_set(), g64);
  const auto d128 = sample_coefficients(strip_set(), g128);
  const auto [a1, a2] = solve_aux_G(g64, d64);
  const auto [b1, b2] = solve_aux_G(g128, d128);
  CHECK(linf(a1.values) > 0.0);
  CHECK(linf(a1.values) ==
        doctest::Approx(linf(b1.values)).epsilon(0.01));
  // rhs mean vanishes by construction
  Vec rhs(g64.fluid_count());
  const Vector2 bstar = integrate_B(d64, g64) / g64.fluid_area;
  for (int p = 0; p < g64.fluid_count(); ++p)
    rhs[p] = bstar[0] - d64.bx_cell[g64.cells[p]];
  CHECK(std::abs(rhs.sum() * g64.h * g64.h) < 1e-13);
}

TEST_CASE("capacity potentials") {
  const CellGrid g = build_cell_grid(square_geom(), 64);
  SUBCASE("zero capacity") {
    const auto disc = sample_coefficients(strip_set(1.0, 0.0), g);
    const auto [h1, h2] = solve_aux_H(g, disc);
    CHECK(linf(h1.values) == 0.0);
    CHECK(linf(h2.values) == 0.0);
  }
  SUBCASE("no drift") {
    CoefficientSet s;
    s.c_kind = CapacityKind::strip;
    s.c0 = 1.0;
    const auto disc = sample_coefficients(s, g);
    const auto [h1, h2] = solve_aux_H(g, disc);
    CHECK(linf(h1.values) == 0.0);
    CHECK(linf(h2.values) == 0.0);
  }
  SUBCASE("compliant strip capacity") {
    const auto disc =
        project_zero_mean_BC(sample_coefficients(strip_set(), g), g);
    const auto [h1, h2] = solve_aux_H(g, disc);
    CHECK(linf(h1.values) > 0.0);
    CHECK(linf(h2.values) == 0.0);  // second drift component vanishes

    const CellGrid g128 = build_cell_grid(square_geom(), 128);
    const auto d128 =
        project_zero_mean_BC(sample_coefficients(strip_set(), g128), g128);
    const auto [f1, f2] = solve_aux_H(g128, d128);
    CHECK(linf(h1.values) == doctest::Approx(linf(f1.values)).epsilon(0.01));
  }
}

TEST_CASE("corrector vanishes for homogeneous data") {
  const CellGrid torus = build_cell_grid(CellGeometry{}, 32);
  SUBCASE("pure diffusion") {
    CoefficientSet s;
    s.d1 = s.d2 = 0.8;
    const auto disc = sample_coefficients(s, torus);
    const CellCorrector c = solve_corrector(torus, disc, 0.4);
    CHECK(linf(c.w1.values) == 0.0);
    CHECK(linf(c.w2.values) == 0.0);
  }
  SUBCASE("constant drift") {
    CoefficientSet s;
    s.b_kind = DriftKind::constant;
    s.b_const = Vector2(0.5, 0.2);
    const auto disc = sample_coefficients(s, torus);
    const CellCorrector c = solve_corrector(torus, disc, 0.0);
    CHECK(linf(c.w1.values) < 1e-10);
    CHECK(linf(c.w2.values) < 1e-10);
  }
}

TEST_CASE("obstacle-driven corrector self-converges") {
  CoefficientSet s;  // D = I, B = 0, square obstacle
  const CellGrid g64 = build_cell_grid(square_geom(), 64);
  const CellGrid g128 = build_cell_grid(square_geom(), 128);
  const auto d64 = sample_coefficients(s, g64);
  const auto d128 = sample_coefficients(s, g128);
  const CellCorrector c64 = solve_corrector(g64, d64, 0.7);
  const CellCorrector c128 = solve_corrector(g128, d128, 0.7);
  CHECK(linf(c64.w1.values) > 0.0);
  CHECK(linf(c64.w1.values) ==
        doctest::Approx(linf(c128.w1.values)).epsilon(0.01));
  CHECK(std::abs(c64.w1.values.mean()) < 1e-12 * linf(c64.w1.values));
}

TEST_CASE("corrector solvability identity") {
  const CellGrid g = build_cell_grid(square_geom(), 64);
  const auto disc = project_zero_mean_BC(sample_coefficients(strip_set(), g), g);
  const CellCorrector c = solve_corrector(g, disc, 0.6);
  for (int i = 0; i < 2; ++i) {
    double ident = 0, gradsq = 0;
    for (int p = 0; p < g.fluid_count(); ++p) {
      const int f = g.cells[p];
      const Vector2 b(disc.bx_cell[f], disc.by_cell[f]);
      const double q = 1.0 - 2.0 * disc.c_cell[f] * c.u0;
      const Vector2 grad(c.grad[p](0, i), c.grad[p](1, i));
      ident += q * b.dot(grad);
      gradsq += grad.squaredNorm();
    }
    ident *= g.h * g.h;
    const double scale = disc.bx_cell.cwiseAbs().maxCoeff() *
                         std::sqrt(gradsq * g.h * g.h);
    CHECK(std::abs(ident) < 1e-8 * std::max(scale, 1e-30));
  }
}

TEST_CASE("gradient matrix") {
  const CellGrid torus = build_cell_grid(CellGeometry{}, 64);
  SUBCASE("zero field") {
    PeriodicField w;
    w.values = Vec::Zero(torus.fluid_count());
    const auto grad = corrector_gradient_matrix(torus, w, w);
    for (const auto& m : grad) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("manufactured derivative") {
    PeriodicField w1, w2;
    w1.values.resize(torus.fluid_count());
    w2.values = Vec::Zero(torus.fluid_count());
    for (int p = 0; p < torus.fluid_count(); ++p)
      w1.values[p] = std::sin(2 * M_PI * torus.cell_center(torus.cells[p])[0]);
    const auto grad = corrector_gradient_matrix(torus, w1, w2);
    double err = 0, int1 = 0, int2 = 0;
    for (int p = 0; p < torus.fluid_count(); ++p) {
      const Vector2 y = torus.cell_center(torus.cells[p]);
      err = std::max(err, std::abs(grad[p](0, 0) -
                                   2 * M_PI * std::cos(2 * M_PI * y[0])));
      int1 += grad[p](0, 0);
      int2 += grad[p](1, 0);
    }
    CHECK(err < 0.02);  // h^2 * (2 pi)^3 / 6 at n = 64
    CHECK(std::abs(int1) * torus.h * torus.h < 1e-10);
    CHECK(std::abs(int2) * torus.h * torus.h < 1e-10);
  }
}

TEST_CASE("cell Peclet precondition") {
  const CellGrid torus = build_cell_grid(CellGeometry{}, 8);
  CoefficientSet s = strip_set(300.0);
  const auto disc = sample_coefficients(s, torus);
  CHECK_THROWS_AS(solve_corrector(torus, disc, 1.0), SolverError);
}
