#include "driftscale/effective.hpp"

#include <algorithm>
#include <cmath>

namespace driftscale {

namespace {

// Fritsch-Carlson slopes for a monotone cubic Hermite interpolant
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  std::vector<double> m(n, 0.0);
  if (n == 1) return m;
  std::vector<double> hh(n - 1), delta(n - 1);
  for (int k = 0; k < n - 1; ++k) {
    hh[k] = x[k + 1] - x[k];
    delta[k] = (y[k + 1] - y[k]) / hh[k];
  }
  if (n == 2) {
    m[0] = m[1] = delta[0];
    return m;
  }
  for (int k = 1; k < n - 1; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      m[k] = 0.0;
    } else {
      const double w1 = 2.0 * hh[k] + hh[k - 1];
      const double w2 = hh[k] + 2.0 * hh[k - 1];
      m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
  auto endpoint = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0)
      s = 0.0;
    else if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0))
      s = 3.0 * d0;
    return s;
  };
  m[0] = endpoint(hh[0], hh[1], delta[0], delta[1]);
  m[n - 1] = endpoint(hh[n - 2], hh[n - 3], delta[n - 2], delta[n - 3]);
  return m;
}

double pchip_eval(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& m, double s) {
  const int n = static_cast<int>(x.size());
  if (n == 1) return y[0];
  int k = static_cast<int>(std::upper_bound(x.begin(), x.end(), s) -
                           x.begin()) - 1;
  k = std::clamp(k, 0, n - 2);
  const double h = x[k + 1] - x[k];
  const double t = (s - x[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return y[k] * (2 * t3 - 3 * t2 + 1) + h * m[k] * (t3 - 2 * t2 + t) +
         y[k + 1] * (-2 * t3 + 3 * t2) + h * m[k + 1] * (t3 - t2);
}

}  // namespace

Vector2 compute_Bstar(const DiscreteCoefficients& disc, const CellGrid& grid) {
  return integrate_B(disc, grid) / grid.fluid_area;
}

Matrix2 assemble_Dstar(const DiscreteCoefficients& disc, const CellGrid& grid,
                       const CellCorrector& corrector) {
  const int m = grid.fluid_count();
  if (corrector.w1.values.size() != m || corrector.w2.values.size() != m ||
      static_cast<int>(corrector.grad.size()) != m)
    throw ConfigError("effective tensor assembly: corrector does not match "
                      "the grid");
  const double w = grid.h * grid.h;  // midpoint quadrature weight
  const Vector2 bstar = compute_Bstar(disc, grid);
  const double u0 = corrector.u0;

  Matrix2 diff = Matrix2::Zero();
  Vector2 wsum = Vector2::Zero();
  Matrix2 drift = Matrix2::Zero();
  for (int p = 0; p < m; ++p) {
    const int f = grid.cells[p];
    Matrix2 d = Matrix2::Zero();
    d(0, 0) = disc.d1_cell[f];
    d(1, 1) = disc.d2_cell[f];
    diff += w * d * (Matrix2::Identity() + corrector.grad[p]);
    const Vector2 wp(corrector.w1.values[p], corrector.w2.values[p]);
    wsum += w * wp;
    const Vector2 b(disc.bx_cell[f], disc.by_cell[f]);
    drift += w * (1.0 - 2.0 * disc.c_cell[f] * u0) * b * wp.transpose();
  }
  const double inv = 1.0 / grid.fluid_area;
  return inv * diff + inv * bstar * wsum.transpose() - inv * drift;
}

EffectiveTable tabulate_Dstar(const DiscreteCoefficients& disc,
                              std::shared_ptr<const CellGrid> grid,
                              double u_max, int n_samples,
                              const SolveOptions& opts) {
  if (!grid) throw ConfigError("tabulate_Dstar: null grid");
  if (n_samples < 3) throw ConfigError("tabulate_Dstar: need >= 3 samples");
  if (u_max <= 0) throw ConfigError("tabulate_Dstar: u_max must be positive");

  EffectiveTable table;
  table.grid = grid;
  table.u_max = u_max;
  table.fluid_area = grid->fluid_area;
  table.obstacle_perimeter = grid->obstacle_perimeter;
  table.Bstar = compute_Bstar(disc, *grid);

  for (int k = 0; k < n_samples; ++k) {
    const double u0 = u_max * k / (n_samples - 1);
    CellCorrector c;
    try {
      c = solve_corrector(*grid, disc, u0, opts);
    } catch (const SolverError& e) {
      throw SolverError("corrector solve failed at u0 = " +
                        std::to_string(u0) + ": " + e.what());
    }
    EffectiveTensorSample s;
    s.u0 = u0;
    s.Dstar = assemble_Dstar(disc, *grid, c);
    s.corrector_ref = k;
    s.sym_positive = sym_positive_definite(s.Dstar);
    table.samples.push_back(s);
    table.correctors.push_back(std::move(c));
  }
  return table;
}

Matrix2 eval_Dstar(const EffectiveTable& table, double s, bool* clamped) {
  if (table.samples.empty()) throw ConfigError("eval_Dstar: empty table");
  const int n = static_cast<int>(table.samples.size());
  const double lo = table.samples.front().u0;
  const double hi = table.samples.back().u0;
  bool clip = false;
  if (s < lo) {
    s = lo;
    clip = true;
  } else if (s > hi) {
    s = hi;
    clip = true;
  }
  if (clamped) *clamped = clip;

  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) x[k] = table.samples[k].u0;
  Matrix2 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      std::vector<double> y(n);
      for (int k = 0; k < n; ++k) y[k] = table.samples[k].Dstar(i, j);
      out(i, j) = pchip_eval(x, y, pchip_slopes(x, y), s);
    }
  return out;
}

double default_u_max(const CoefficientSet& set, const CellGrid& grid) {
  double base = set.g.amplitude;
  if (set.gn_kind == RobinKind::linear && grid.obstacle_perimeter > 0) {
    base = std::max(base, set.f.amplitude * grid.fluid_area /
                              grid.obstacle_perimeter);
  } else {
    base = std::max(base, set.g.amplitude + set.f.amplitude);
  }
  const double u = 1.25 * base;
  return u > 0 ? u : 1.0;
}

bool sym_positive_definite(const Matrix2& m) {
  const Matrix2 s = 0.5 * (m + m.transpose());
  return s(0, 0) > 0 && s.determinant() > 0;
}

}  // namespace driftscale
