#include "driftscale/coefficients.hpp"

#include <algorithm>
#include <cmath>

namespace driftscale {

namespace {

// antiderivative of sin^2(pi t / s) from 0 to t, for t in [0, s]
double hump_integral(double t, double s) {
  return 0.5 * t - s / (4.0 * M_PI) * std::sin(2.0 * M_PI * t / s);
}

double hump(double t, double s) {
  const double v = std::sin(M_PI * t / s);
  return v * v;
}

}  // namespace

Matrix2 CoefficientSet::D(const Vector2& y) const {
  Matrix2 m = Matrix2::Zero();
  if (d_kind == DiffusionKind::constant_diag) {
    m(0, 0) = d1;
    m(1, 1) = d2;
  } else {
    const double d = d_base * (1.0 + d_mod * std::cos(2.0 * M_PI * y[0]) *
                                           std::cos(2.0 * M_PI * y[1]));
    m(0, 0) = d;
    m(1, 1) = d;
  }
  return m;
}

double CoefficientSet::stream(const Vector2& y) const {
  switch (b_kind) {
    case DriftKind::none:
      return 0.0;
    case DriftKind::constant:
      return b_const[0] * y[1] - b_const[1] * y[0];
    case DriftKind::strip_shear: {
      const double s = strip;
      const double t = y[1];
      if (t <= s) return b_max * hump_integral(t, s);
      if (t < 1.0 - s) return b_max * (0.5 * s);  // constant mid band
      return b_max * (0.5 * s + hump_integral(t - (1.0 - s), s));
    }
  }
  return 0.0;
}

Vector2 CoefficientSet::stream_increments() const {
  switch (b_kind) {
    case DriftKind::none:
      return Vector2::Zero();
    case DriftKind::constant:
      return Vector2(-b_const[1], b_const[0]);
    case DriftKind::strip_shear:
      return Vector2(0.0, b_max * strip);  // two humps of s/2 each
  }
  return Vector2::Zero();
}

double CoefficientSet::stream_ext(const Vector2& y) const {
  const double kx = std::floor(y[0]);
  const double ky = std::floor(y[1]);
  const Vector2 inc = stream_increments();
  return stream(Vector2(y[0] - kx, y[1] - ky)) + kx * inc[0] + ky * inc[1];
}

Vector2 CoefficientSet::B(const Vector2& y) const {
  switch (b_kind) {
    case DriftKind::none:
      return Vector2::Zero();
    case DriftKind::constant:
      return b_const;
    case DriftKind::strip_shear: {
      const double s = strip;
      const double t = y[1];
      double b = 0;
      if (t <= s)
        b = b_max * hump(t, s);
      else if (t >= 1.0 - s)
        b = b_max * hump(t - (1.0 - s), s);
      return Vector2(b, 0.0);
    }
  }
  return Vector2::Zero();
}

double CoefficientSet::C(const Vector2& y) const {
  switch (c_kind) {
    case CapacityKind::none:
      return 0.0;
    case CapacityKind::constant:
      return c_const;
    case CapacityKind::strip: {
      const double s = strip;
      const double t = y[1];
      if (t <= s) return c0 * hump(t, s);
      if (t >= 1.0 - s) return -c0 * hump(t - (1.0 - s), s);
      return 0.0;
    }
  }
  return 0.0;
}

double CoefficientSet::gN(double r) const {
  return gn_kind == RobinKind::linear ? r : gn_k;
}

DiscreteCoefficients sample_coefficients(const CoefficientSet& set,
                                         const CellGrid& grid) {
  const int n = grid.n;
  const double h = grid.h;
  DiscreteCoefficients disc;
  disc.gn_kind = set.gn_kind;
  disc.gn_k = set.gn_k;
  disc.theta = set.theta;
  disc.theta_tilde = set.theta_tilde;

  // stream function at grid nodes, including the far edges for the wrap check
  Eigen::MatrixXd psi(n + 1, n + 1);
  for (int jy = 0; jy <= n; ++jy)
    for (int jx = 0; jx <= n; ++jx)
      psi(jx, jy) = set.stream(Vector2(jx * h, jy * h));

  disc.bx_face.resize(n * n);
  disc.by_face.resize(n * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int f = grid.flat(ix, iy);
      disc.bx_face[f] = (psi(ix, iy + 1) - psi(ix, iy)) / h;
      disc.by_face[f] = -(psi(ix + 1, iy) - psi(ix, iy)) / h;
    }

  // the wrap faces at x=1 (resp. y=1) must reproduce the stored faces at x=0
  const double bscale = std::max(1.0, disc.bx_face.cwiseAbs().maxCoeff() +
                                          disc.by_face.cwiseAbs().maxCoeff());
  for (int iy = 0; iy < n; ++iy) {
    const double wrap = (psi(n, iy + 1) - psi(n, iy)) / h;
    if (std::abs(wrap - disc.bx_face[grid.flat(0, iy)]) > 1e-12 * bscale)
      throw ConfigError("drift stream function is not periodic in x");
  }
  for (int ix = 0; ix < n; ++ix) {
    const double wrap = -(psi(ix + 1, n) - psi(ix, n)) / h;
    if (std::abs(wrap - disc.by_face[grid.flat(ix, 0)]) > 1e-12 * bscale)
      throw ConfigError("drift stream function is not periodic in y");
  }

  disc.bx_cell.resize(n * n);
  disc.by_cell.resize(n * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int f = grid.flat(ix, iy);
      disc.bx_cell[f] = 0.5 * (disc.bx_face[f] +
                               disc.bx_face[grid.neighbor(f, 0, +1)]);
      disc.by_cell[f] = 0.5 * (disc.by_face[f] +
                               disc.by_face[grid.neighbor(f, 1, +1)]);
    }

  disc.d1_face_x.resize(n * n);
  disc.d2_face_y.resize(n * n);
  disc.d1_cell.resize(n * n);
  disc.d2_cell.resize(n * n);
  disc.c_cell.resize(n * n);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int f = grid.flat(ix, iy);
      const Vector2 wmid(ix * h, (iy + 0.5) * h);
      const Vector2 smid((ix + 0.5) * h, iy * h);
      const Vector2 c((ix + 0.5) * h, (iy + 0.5) * h);
      disc.d1_face_x[f] = set.D(wmid)(0, 0);
      disc.d2_face_y[f] = set.D(smid)(1, 1);
      const Matrix2 dc = set.D(c);
      disc.d1_cell[f] = dc(0, 0);
      disc.d2_cell[f] = dc(1, 1);
      disc.c_cell[f] = set.C(c);
    }

  // the drift must vanish on the obstacle boundary
  for (const auto& face : grid.boundary_faces) {
    const int f = grid.cells[face.cell];
    const double bn =
        face.axis == 0
            ? (face.sign > 0 ? disc.bx_face[grid.neighbor(f, 0, +1)]
                             : disc.bx_face[f])
            : (face.sign > 0 ? disc.by_face[grid.neighbor(f, 1, +1)]
                             : disc.by_face[f]);
    if (std::abs(bn) > 1e-14 * bscale)
      throw ConfigError("drift does not vanish on the obstacle boundary; "
                        "the obstacle overlaps the nonzero drift strips");
  }
  return disc;
}

double cell_div_B(const DiscreteCoefficients& disc, const CellGrid& grid,
                  int f) {
  const double east = disc.bx_face[grid.neighbor(f, 0, +1)];
  const double north = disc.by_face[grid.neighbor(f, 1, +1)];
  return (east - disc.bx_face[f] + north - disc.by_face[f]) / grid.h;
}

Vector2 integrate_B(const DiscreteCoefficients& disc, const CellGrid& grid) {
  Vector2 sum = Vector2::Zero();
  for (int f : grid.cells) sum += Vector2(disc.bx_cell[f], disc.by_cell[f]);
  return sum * (grid.h * grid.h);
}

Vector2 integrate_BC(const DiscreteCoefficients& disc, const CellGrid& grid) {
  Vector2 sum = Vector2::Zero();
  for (int f : grid.cells)
    sum += disc.c_cell[f] * Vector2(disc.bx_cell[f], disc.by_cell[f]);
  return sum * (grid.h * grid.h);
}

DiscreteCoefficients project_zero_mean_BC(const DiscreteCoefficients& disc,
                                          const CellGrid& grid) {
  DiscreteCoefficients out = disc;
  const Vector2 ib = integrate_B(disc, grid);
  const Vector2 ibc = integrate_BC(disc, grid);
  const double bscale = std::max(1.0, disc.bx_cell.cwiseAbs().maxCoeff() +
                                          disc.by_cell.cwiseAbs().maxCoeff());
  if (ibc.norm() <= 1e-15 * bscale) return out;
  if (std::abs(ib[0]) <= 1e-15 * bscale)
    throw ConfigError("cannot project C: integral of B*C is not parallel to "
                      "the drift (zero net drift along e1)");
  const double alpha = ibc[0] / ib[0];
  for (int f : grid.cells) out.c_cell[f] -= alpha;
  out.c_offset = disc.c_offset + alpha;
  const Vector2 check = integrate_BC(out, grid);
  if (check.norm() > 1e-12 * bscale * std::max(1.0, std::abs(alpha)))
    throw ConfigError("cannot project C: integral of B*C is not parallel to "
                      "the drift");
  return out;
}

AssumptionReport verify_assumptions(const CoefficientSet& set,
                                    const DiscreteCoefficients& disc,
                                    const CellGrid& grid, double tol) {
  AssumptionReport rep;
  const int n = grid.n;
  const double h = grid.h;

  // (A1) uniform ellipticity of D within the declared bounds
  double mn = std::numeric_limits<double>::infinity(), mx = 0;
  for (int f = 0; f < n * n; ++f) {
    mn = std::min({mn, disc.d1_cell[f], disc.d2_cell[f], disc.d1_face_x[f],
                   disc.d2_face_y[f]});
    mx = std::max({mx, disc.d1_cell[f], disc.d2_cell[f], disc.d1_face_x[f],
                   disc.d2_face_y[f]});
  }
  rep.min_eig = mn;
  rep.max_eig = mx;
  rep.a1.name = "A1";
  rep.a1.pass = mn > tol && disc.theta <= mn + tol &&
                mx <= disc.theta_tilde + tol && disc.theta > 0 &&
                disc.theta <= disc.theta_tilde;
  rep.a1.residual = std::max({0.0, -mn, disc.theta - mn, mx - disc.theta_tilde});
  rep.a1.detail = "eigenvalues in [" + std::to_string(mn) + ", " +
                  std::to_string(mx) + "]";

  // (A2) incompressibility, drift-capacity divergence, no-slip on the obstacle
  double max_div = 0, max_bn = 0, max_div_bc = 0;
  for (int f : grid.cells) {
    max_div = std::max(max_div, std::abs(cell_div_B(disc, grid, f)));
    // flux form of div(B C) with face-averaged C
    const int e = grid.neighbor(f, 0, +1), w = grid.neighbor(f, 0, -1);
    const int nn = grid.neighbor(f, 1, +1), s = grid.neighbor(f, 1, -1);
    const double cf = disc.c_cell[f];
    const double flux_e = disc.bx_face[e] * 0.5 * (cf + disc.c_cell[e]);
    const double flux_w = disc.bx_face[f] * 0.5 * (cf + disc.c_cell[w]);
    const double flux_n = disc.by_face[nn] * 0.5 * (cf + disc.c_cell[nn]);
    const double flux_s = disc.by_face[f] * 0.5 * (cf + disc.c_cell[s]);
    max_div_bc = std::max(max_div_bc,
                          std::abs((flux_e - flux_w + flux_n - flux_s) / h));
  }
  for (const auto& face : grid.boundary_faces) {
    const int f = grid.cells[face.cell];
    const double bn =
        face.axis == 0
            ? (face.sign > 0 ? disc.bx_face[grid.neighbor(f, 0, +1)]
                             : disc.bx_face[f])
            : (face.sign > 0 ? disc.by_face[grid.neighbor(f, 1, +1)]
                             : disc.by_face[f]);
    max_bn = std::max(max_bn, std::abs(bn));
  }
  rep.max_div_B = max_div;
  rep.max_Bn = max_bn;
  rep.max_div_BC = max_div_bc;
  rep.a2.name = "A2";
  rep.a2.pass = max_div <= tol && max_bn <= tol && max_div_bc <= tol;
  rep.a2.residual = std::max({max_div, max_bn, max_div_bc});
  rep.a2.detail = "max|div B|=" + std::to_string(max_div) +
                  " max|B.n|=" + std::to_string(max_bn) +
                  " max|div(BC)|=" + std::to_string(max_div_bc);

  // (A3) nonnegative compactly supported volume source
  rep.a3.name = "A3";
  rep.a3.pass = set.f.amplitude >= 0 && set.f.radius > 0;
  rep.a3.residual = std::max(0.0, -set.f.amplitude);
  rep.a3.detail = "f bump amplitude " + std::to_string(set.f.amplitude);

  // (A4) sign and monotonicity of g_N, sampled on (0, 1]
  double min_sign = std::numeric_limits<double>::infinity();
  bool monotone = true;
  double prev = set.gN(1e-3);
  for (int i = 1; i <= 64; ++i) {
    const double r = i / 64.0;
    const double v = set.gN(r);
    min_sign = std::min(min_sign, v * r);
    if (v < prev - tol) monotone = false;
    prev = v;
  }
  rep.min_gn_sign = min_sign;
  rep.a4.name = "A4";
  rep.a4.pass = min_sign > tol && monotone;
  rep.a4.residual = std::max(0.0, -min_sign + (monotone ? 0.0 : 1.0));
  rep.a4.detail = "min g_N(r)*r = " + std::to_string(min_sign);

  // (A5) nonnegative compactly supported initial state
  rep.a5.name = "A5";
  rep.a5.pass = set.g.amplitude >= 0 && set.g.radius > 0;
  rep.min_g = std::min(0.0, set.g.amplitude);
  rep.a5.residual = std::max(0.0, -set.g.amplitude);
  rep.a5.detail = "g bump amplitude " + std::to_string(set.g.amplitude);

  // zero-mean drift-capacity constraint
  const Vector2 ibc = integrate_BC(disc, grid);
  rep.int_BC_norm = ibc.cwiseAbs().maxCoeff();
  rep.bc.name = "int_BC";
  rep.bc.pass = rep.int_BC_norm <= tol;
  rep.bc.residual = rep.int_BC_norm;
  rep.bc.detail = "|int B C| = " + std::to_string(rep.int_BC_norm);

  return rep;
}

}  // namespace driftscale
