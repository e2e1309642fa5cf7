#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "driftscale/effective.hpp"

using namespace driftscale;

namespace {

CellGeometry square_geom() {
  return CellGeometry{ObstacleKind::axis_square, 0.25, {0.5, 0.5}};
}

CoefficientSet strip_set() {
  CoefficientSet s;
  s.b_kind = DriftKind::strip_shear;
  s.b_max = 1.0;
  s.strip = 0.25;
  s.c_kind = CapacityKind::strip;
  s.c0 = 1.0;
  s.g = BumpSpec{0.45, 0.35, {0, 0}};
  return s;
}

}  // namespace

TEST_CASE("effective drift") {
  SUBCASE("no drift") {
    const CellGrid g = build_cell_grid(CellGeometry{}, 32);
    const auto disc = sample_coefficients(CoefficientSet{}, g);
    CHECK(compute_Bstar(disc, g).norm() == 0.0);
  }
  SUBCASE("constant drift on the torus") {
    const CellGrid g = build_cell_grid(CellGeometry{}, 32);
    CoefficientSet s;
    s.b_kind = DriftKind::constant;
    s.b_const = Vector2(0.3, -0.8);
    const auto disc = sample_coefficients(s, g);
    const Vector2 b = compute_Bstar(disc, g);
    CHECK(b[0] == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(b[1] == doctest::Approx(-0.8).epsilon(1e-13));
  }
  SUBCASE("strip shear with square obstacle") {
    const CellGrid g = build_cell_grid(square_geom(), 64);
    const auto disc = sample_coefficients(strip_set(), g);
    const Vector2 b = compute_Bstar(disc, g);
    CHECK(b[0] == doctest::Approx(0.25 / 0.9375).epsilon(1e-12));
    CHECK(b[1] == 0.0);
  }
}

TEST_CASE("trivial dispersion tensor") {
  const CellGrid g = build_cell_grid(CellGeometry{}, 32);
  CoefficientSet s;
  s.d1 = s.d2 = 0.7;
  s.b_kind = DriftKind::constant;
  s.b_const = Vector2(0.4, 0.1);
  const auto disc = sample_coefficients(s, g);
  const CellCorrector c = solve_corrector(g, disc, 0.0);
  CHECK(c.w1.values.cwiseAbs().maxCoeff() < 1e-10);
  const Matrix2 dstar = assemble_Dstar(disc, g, c);
  CHECK((dstar - 0.7 * Matrix2::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(sym_positive_definite(dstar));
}

TEST_CASE("gauge invariance of the dispersion tensor") {
  const CellGrid g = build_cell_grid(square_geom(), 64);
  const auto disc = project_zero_mean_BC(sample_coefficients(strip_set(), g), g);
  const CellCorrector c = solve_corrector(g, disc, 0.5);
  const Matrix2 base = assemble_Dstar(disc, g, c);

  CellCorrector shifted = c;
  shifted.w1.values.array() += 0.7;
  shifted.w2.values.array() -= 1.3;
  shifted.grad = corrector_gradient_matrix(g, shifted.w1, shifted.w2);
  const Matrix2 moved = assemble_Dstar(disc, g, shifted);
  const double rel = (moved - base).cwiseAbs().maxCoeff() /
                     base.cwiseAbs().maxCoeff();
  CHECK(rel < 1e-12);
}

TEST_CASE("square obstacle tensor has the cell symmetry") {
  CoefficientSet s;  // D = I, B = 0
  const CellGrid g64 = build_cell_grid(square_geom(), 64);
  const auto d64 = sample_coefficients(s, g64);
  const Matrix2 t64 = assemble_Dstar(d64, g64, solve_corrector(g64, d64, 0.3));
  CHECK(std::abs(t64(0, 0) - t64(1, 1)) < 1e-8);
  CHECK(std::abs(t64(0, 1)) < 1e-8);
  CHECK(std::abs(t64(1, 0)) < 1e-8);
  CHECK(t64(0, 0) < 1.0);  // the obstacle obstructs transport

  const CellGrid g128 = build_cell_grid(square_geom(), 128);
  const auto d128 = sample_coefficients(s, g128);
  const Matrix2 t128 =
      assemble_Dstar(d128, g128, solve_corrector(g128, d128, 0.3));
  CHECK(t64(0, 0) == doctest::Approx(t128(0, 0)).epsilon(0.01));
}

TEST_CASE("tabulation") {
  SUBCASE("state independence without drift") {
    CoefficientSet s;
    auto grid = std::make_shared<CellGrid>(build_cell_grid(square_geom(), 32));
    const auto disc = sample_coefficients(s, *grid);
    const EffectiveTable t = tabulate_Dstar(disc, grid, 1.0, 4);
    for (const auto& sample : t.samples) {
      CHECK((sample.Dstar - t.samples[0].Dstar).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(sample.sym_positive);
    }
  }
  SUBCASE("state independence without capacity") {
    CoefficientSet s = strip_set();
    s.c_kind = CapacityKind::none;
    auto grid = std::make_shared<CellGrid>(build_cell_grid(square_geom(), 32));
    const auto disc = sample_coefficients(s, *grid);
    const EffectiveTable t = tabulate_Dstar(disc, grid, 1.0, 3);
    CHECK((t.samples[2].Dstar - t.samples[0].Dstar).cwiseAbs().maxCoeff() <
          1e-12);
  }
  SUBCASE("interpolation against a held-out direct solve") {
    auto grid = std::make_shared<CellGrid>(build_cell_grid(square_geom(), 64));
    const auto disc =
        project_zero_mean_BC(sample_coefficients(strip_set(), *grid), *grid);
    const EffectiveTable t = tabulate_Dstar(disc, grid, 1.0, 5);
    for (const auto& sample : t.samples) CHECK(sample.sym_positive);
    // exact at the nodes
    bool clamped = false;
    const Matrix2 node = eval_Dstar(t, t.samples[2].u0, &clamped);
    CHECK_FALSE(clamped);
    CHECK((node - t.samples[2].Dstar).cwiseAbs().maxCoeff() < 1e-14);
    // midpoint against a direct solve
    const double mid = 0.5 * (t.samples[1].u0 + t.samples[2].u0);
    const Matrix2 direct =
        assemble_Dstar(disc, *grid, solve_corrector(*grid, disc, mid));
    const Matrix2 interp = eval_Dstar(t, mid);
    const double rel = (interp - direct).cwiseAbs().maxCoeff() /
                       direct.cwiseAbs().maxCoeff();
    CHECK(rel < 1e-3);
    // the entries really vary with the state
    CHECK((t.samples[4].Dstar - t.samples[0].Dstar).cwiseAbs().maxCoeff() >
          1e-6);
  }
  SUBCASE("clamping and errors") {
    auto grid = std::make_shared<CellGrid>(build_cell_grid(square_geom(), 32));
    const auto disc = sample_coefficients(CoefficientSet{}, *grid);
    const EffectiveTable t = tabulate_Dstar(disc, grid, 1.0, 3);
    bool clamped = false;
    eval_Dstar(t, 2.0, &clamped);
    CHECK(clamped);
    eval_Dstar(t, -0.5, &clamped);
    CHECK(clamped);
    CHECK_THROWS_AS(eval_Dstar(EffectiveTable{}, 0.5), ConfigError);
    CHECK_THROWS_AS(tabulate_Dstar(disc, grid, 1.0, 2), ConfigError);
  }
}

TEST_CASE("default state range") {
  const CellGrid g = build_cell_grid(square_geom(), 32);
  CoefficientSet s = strip_set();
  CHECK(default_u_max(s, g) == doctest::Approx(1.25 * 0.45));
  s.f.amplitude = 2.0;  // steady balance f |Z| / |Gamma| = 1.875
  CHECK(default_u_max(s, g) == doctest::Approx(1.25 * 1.875));
  s.g.amplitude = 0.0;
  s.f.amplitude = 0.0;
  CHECK(default_u_max(s, g) == 1.0);
}
