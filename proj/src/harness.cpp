#include "driftscale/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "driftscale/gridio.hpp"

namespace driftscale {

namespace {

double simpson(const std::function<double(double)>& f, double a, double b,
               int intervals) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i)
    sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

std::vector<double> trapezoid_weights(const std::vector<double>& t) {
  const size_t s = t.size();
  std::vector<double> w(s, 1.0);
  if (s < 2) return w;
  w[0] = 0.5 * (t[1] - t[0]);
  w[s - 1] = 0.5 * (t[s - 1] - t[s - 2]);
  for (size_t i = 1; i + 1 < s; ++i) w[i] = 0.5 * (t[i + 1] - t[i - 1]);
  return w;
}

double interp_macro_zero(const MacroState& st, const Vec& field,
                         const Vector2& x) {
  const double gx = (x[0] + st.halfwidth) / st.h - 0.5;
  const double gy = (x[1] + st.halfwidth) / st.h - 0.5;
  const int i0 = static_cast<int>(std::floor(gx));
  const int j0 = static_cast<int>(std::floor(gy));
  const double wx = gx - i0, wy = gy - j0;
  double val = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int i = i0 + a, j = j0 + b;
      if (i < 0 || i >= st.m || j < 0 || j >= st.m) continue;  // zero outside
      val += (a ? wx : 1 - wx) * (b ? wy : 1 - wy) * field[st.flat(i, j)];
    }
  return val;
}

double wrap_unit(double t) { return t - std::floor(t); }

}  // namespace

bool interp_cell_periodic(const CellGrid& g, const Vec& values,
                          const Vector2& y, double* out) {
  const int n = g.n;
  const double sx = wrap_unit(y[0]) / g.h - 0.5;
  const double sy = wrap_unit(y[1]) / g.h - 0.5;
  const int i0 = static_cast<int>(std::floor(sx));
  const int j0 = static_cast<int>(std::floor(sy));
  const double wx = sx - i0, wy = sy - j0;
  auto wrap = [n](int i) { return ((i % n) + n) % n; };
  const int ii[2] = {wrap(i0), wrap(i0 + 1)};
  const int jj[2] = {wrap(j0), wrap(j0 + 1)};
  const double wxs[2] = {1 - wx, wx}, wys[2] = {1 - wy, wy};
  double val = 0, wsum = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int f = g.flat(ii[a], jj[b]);
      if (!g.fluid[f]) continue;
      val += wxs[a] * wys[b] * values[g.index[f]];
      wsum += wxs[a] * wys[b];
    }
  if (wsum <= 1e-12) return false;
  *out = val / wsum;
  return true;
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions o;
  o.solve_tol = cfg.solve_tol;
  o.compat_tol = cfg.compat_tol;
  return o;
}

ModelSetup build_model(const RunConfig& cfg, bool with_table) {
  ModelSetup m;
  m.grid = std::make_shared<CellGrid>(build_cell_grid(cfg.geometry, cfg.cell_n));
  m.disc = project_zero_mean_BC(
      sample_coefficients(cfg.coefficients, *m.grid), *m.grid);
  m.report = verify_assumptions(cfg.coefficients, m.disc, *m.grid,
                                cfg.assumption_tol);
  m.u_max = cfg.u_max > 0 ? cfg.u_max : default_u_max(cfg.coefficients, *m.grid);
  if (with_table)
    m.table = tabulate_Dstar(m.disc, m.grid, m.u_max, cfg.n_samples,
                             solve_options(cfg));
  return m;
}

double micro_halfwidth_for(const RunConfig& cfg, const Vector2& Bstar,
                           double eps) {
  if (cfg.micro_halfwidth > 0) return cfg.micro_halfwidth;
  const double shift =
      std::max(std::abs(Bstar[0]), std::abs(Bstar[1])) * cfg.t_end / eps;
  const double need = cfg.macro_halfwidth + shift + 2.0 * eps;
  return eps * std::ceil(need / eps - 1e-12);
}

Vec sample_macro_field(const MacroState& shape, const BumpSpec& bump) {
  Vec out(shape.m * shape.m);
  for (int f = 0; f < shape.m * shape.m; ++f)
    out[f] = bump(shape.cell_center(f));
  return out;
}

MacroState initial_macro_state(const RunConfig& cfg) {
  MacroState s = make_macro_state(cfg.macro_halfwidth, cfg.macro_m);
  s.u = sample_macro_field(s, cfg.coefficients.g);
  return s;
}

double moving_frame_l2_error(const MicroState& micro, const MacroState& macro,
                             const Vector2& Bstar) {
  if (std::abs(micro.t - macro.t) > 1e-9)
    throw ConfigError("moving-frame comparison needs states at the same time");
  const MovingFrameField v =
      shift_to_moving_frame(micro, Bstar, macro.m, macro.halfwidth);
  double sum = 0;
  for (int f = 0; f < macro.m * macro.m; ++f) {
    if (!v.mask[f]) continue;
    const double d = v.values[f] - macro.u[f];
    sum += d * d;
  }
  return std::sqrt(sum * macro.h * macro.h);
}

double corrector_h1_error(const MicroState& micro, const MacroState& macro,
                          const EffectiveTable& table) {
  if (std::abs(micro.t - macro.t) > 1e-9)
    throw ConfigError("corrector comparison needs states at the same time");
  if (!table.grid || table.correctors.empty())
    throw ConfigError("corrector comparison needs a table with stored fields");
  const MicroDomain& d = *micro.domain;
  const CellGrid& cg = *table.grid;
  const double eps = d.epsilon;
  const Vector2 shift = table.Bstar * (micro.t / eps);

  // macro gradient by central differences with zero ghosts
  const int m = macro.m;
  Vec gx(m * m), gy(m * m);
  for (int iy = 0; iy < m; ++iy)
    for (int ix = 0; ix < m; ++ix) {
      const double up = ix + 1 < m ? macro.u[macro.flat(ix + 1, iy)] : 0.0;
      const double dn = ix - 1 >= 0 ? macro.u[macro.flat(ix - 1, iy)] : 0.0;
      gx[macro.flat(ix, iy)] = (up - dn) / (2.0 * macro.h);
      const double vp = iy + 1 < m ? macro.u[macro.flat(ix, iy + 1)] : 0.0;
      const double vn = iy - 1 >= 0 ? macro.u[macro.flat(ix, iy - 1)] : 0.0;
      gy[macro.flat(ix, iy)] = (vp - vn) / (2.0 * macro.h);
    }

  const int ns = static_cast<int>(table.samples.size());
  const double du = ns > 1 ? table.samples[1].u0 - table.samples[0].u0 : 1.0;

  // residual on the micro fluid cells
  Vec r(d.fluid_count());
  for (int p = 0; p < d.fluid_count(); ++p) {
    const Vector2 x = d.cell_center(d.cells[p]);
    const Vector2 xm = x - shift;
    const double u0v = interp_macro_zero(macro, macro.u, xm);
    const double g1 = interp_macro_zero(macro, gx, xm);
    const double g2 = interp_macro_zero(macro, gy, xm);

    const double s = std::clamp(u0v, table.samples.front().u0,
                                table.samples.back().u0);
    int k = ns > 1 ? static_cast<int>(std::floor(s / du)) : 0;
    k = std::clamp(k, 0, ns - 2 >= 0 ? ns - 2 : 0);
    const double theta =
        ns > 1 ? std::clamp((s - table.samples[k].u0) / du, 0.0, 1.0) : 0.0;

    const Vector2 y(x[0] / eps, x[1] / eps);
    double w1 = 0, w2 = 0;
    for (int j = 0; j < 2; ++j) {
      const Vec& lo =
          j == 0 ? table.correctors[k].w1.values : table.correctors[k].w2.values;
      const Vec& hi = ns > 1 ? (j == 0 ? table.correctors[k + 1].w1.values
                                       : table.correctors[k + 1].w2.values)
                             : lo;
      double a = 0, b = 0;
      if (!interp_cell_periodic(cg, lo, y, &a)) a = 0;
      if (ns > 1) {
        if (!interp_cell_periodic(cg, hi, y, &b)) b = 0;
      } else {
        b = a;
      }
      const double w = (1 - theta) * a + theta * b;
      (j == 0 ? w1 : w2) = w;
    }
    r[p] = micro.u[p] - u0v - eps * (w1 * g1 + w2 * g2);
  }

  // discrete H1 seminorm of the residual, mask-aware one-sided differences
  double sum = 0;
  const int n = d.n;
  for (int p = 0; p < d.fluid_count(); ++p) {
    const int f = d.cells[p];
    const int ix = f % n, iy = f / n;
    for (int axis = 0; axis < 2; ++axis) {
      const int pxi = ix + (axis == 0 ? 1 : 0), pyi = iy + (axis == 1 ? 1 : 0);
      const int mxi = ix - (axis == 0 ? 1 : 0), myi = iy - (axis == 1 ? 1 : 0);
      const bool hasp = d.in_range(pxi, pyi) && d.fluid[d.flat(pxi, pyi)];
      const bool hasm = d.in_range(mxi, myi) && d.fluid[d.flat(mxi, myi)];
      double g = 0;
      if (hasp && hasm)
        g = (r[d.index[d.flat(pxi, pyi)]] - r[d.index[d.flat(mxi, myi)]]) /
            (2.0 * d.h);
      else if (hasp)
        g = (r[d.index[d.flat(pxi, pyi)]] - r[p]) / d.h;
      else if (hasm)
        g = (r[p] - r[d.index[d.flat(mxi, myi)]]) / d.h;
      sum += g * g;
    }
  }
  return std::sqrt(sum * d.h * d.h);
}

double two_scale_drift_pairing(const std::vector<MicroState>& snapshots,
                               const SeparableTest& phi, const Vector2& Bstar) {
  if (snapshots.empty()) return 0;
  std::vector<double> times;
  for (const auto& s : snapshots) times.push_back(s.t);
  const auto w = trapezoid_weights(times);
  double total = 0;
  for (size_t s = 0; s < snapshots.size(); ++s) {
    const MicroState& st = snapshots[s];
    const MicroDomain& d = *st.domain;
    const Vector2 shift = Bstar * (st.t / d.epsilon);
    double space = 0;
    for (int p = 0; p < d.fluid_count(); ++p) {
      const Vector2 x = d.cell_center(d.cells[p]);
      const Vector2 y(wrap_unit(x[0] / d.epsilon), wrap_unit(x[1] / d.epsilon));
      space += st.u[p] * phi.macro_part(x - shift) * phi.cell_part(y);
    }
    total += w[s] * phi.time_part(st.t) * space * d.h * d.h;
  }
  return total;
}

double two_scale_drift_pairing_limit(const std::vector<MacroState>& snapshots,
                                     const CellGrid& grid,
                                     const SeparableTest& phi) {
  if (snapshots.empty()) return 0;
  double zint = 0;
  for (int f : grid.cells) zint += phi.cell_part(grid.cell_center(f));
  zint *= grid.h * grid.h;

  std::vector<double> times;
  for (const auto& s : snapshots) times.push_back(s.t);
  const auto w = trapezoid_weights(times);
  double total = 0;
  for (size_t s = 0; s < snapshots.size(); ++s) {
    const MacroState& st = snapshots[s];
    double space = 0;
    for (int f = 0; f < st.m * st.m; ++f)
      space += st.u[f] * phi.macro_part(st.cell_center(f));
    total += w[s] * phi.time_part(st.t) * space * st.h * st.h * zint;
  }
  return total;
}

OscillationCheck oscillation_quadrature(const RunConfig& cfg,
                                        const Vector2& Bstar, double eps,
                                        double t) {
  const double rho = 0.7;
  auto envelope = [rho](double s) {
    const double q = 1.0 - s * s / (rho * rho);
    return q > 0 ? q * q * q : 0.0;
  };
  auto phi2 = [&](const Vector2& x) {
    return envelope(x[0]) * envelope(x[1]) * std::cos(2.0 * M_PI * x[0]);
  };
  auto phi3 = [](const Vector2& y) {
    return 1.0 + 0.5 * std::sin(2.0 * M_PI * y[0]);
  };

  const Vector2 shift = Bstar * (t / eps);
  const double reach = rho + std::max(std::abs(shift[0]), std::abs(shift[1]));
  const double L = eps * std::ceil((reach + 2.0 * eps) / eps - 1e-12);
  const MicroDomain d =
      build_micro_domain(cfg.geometry, eps, L, cfg.cells_per_eps);

  OscillationCheck out;
  double quad = 0;
  for (int p = 0; p < d.fluid_count(); ++p) {
    const Vector2 x = d.cell_center(d.cells[p]);
    const Vector2 y(wrap_unit(x[0] / eps), wrap_unit(x[1] / eps));
    const double v = phi2(x - shift) * phi3(y);
    quad += v * v;
  }
  out.quadrature = quad * d.h * d.h;

  // product integral: phi2 is separable, phi3 depends on y1 only
  auto env2 = [&](double s) { const double e = envelope(s); return e * e; };
  const double i_cos = simpson(
      [&](double s) { return env2(s) * std::pow(std::cos(2.0 * M_PI * s), 2); },
      -rho, rho, 1 << 14);
  const double i_env = simpson(env2, -rho, rho, 1 << 14);
  auto phi3sq = [&](double y1) {
    const double v = 1.0 + 0.5 * std::sin(2.0 * M_PI * y1);
    return v * v;
  };
  double zint = simpson(phi3sq, 0.0, 1.0, 1 << 14);
  switch (cfg.geometry.kind) {
    case ObstacleKind::none:
      break;
    case ObstacleKind::axis_square: {
      const double a = cfg.geometry.size / 2;
      zint -= cfg.geometry.size *
              simpson(phi3sq, cfg.geometry.center[0] - a,
                      cfg.geometry.center[0] + a, 1 << 14);
      break;
    }
    case ObstacleKind::disk: {
      // staircase quadrature of the obstacle part
      const int nq = 2048;
      const double hq = 1.0 / nq;
      double s = 0;
      for (int iy = 0; iy < nq; ++iy)
        for (int ix = 0; ix < nq; ++ix) {
          const Vector2 y((ix + 0.5) * hq, (iy + 0.5) * hq);
          if (in_obstacle(cfg.geometry, y)) s += phi3sq(y[0]);
        }
      zint -= s * hq * hq;
      break;
    }
  }
  out.limit = i_cos * i_env * zint;
  out.error = std::abs(out.quadrature - out.limit);
  return out;
}

bool strictly_decreasing_columns(const std::vector<std::vector<double>>& err) {
  if (err.size() < 2) return true;
  for (size_t e = 1; e < err.size(); ++e)
    for (size_t s = 0; s < err[e].size(); ++s)
      if (!(err[e][s] < err[e - 1][s])) return false;
  return true;
}

ConvergenceReport run_convergence_study(const RunConfig& cfg,
                                        bool write_files) {
  cfg.validate();
  ModelSetup model = build_model(cfg);
  if (!model.report.a1.pass || !model.report.a2.pass || !model.report.bc.pass)
    throw ConfigError("assumption check failed: " + model.report.a1.detail +
                      "; " + model.report.a2.detail + "; " +
                      model.report.bc.detail);

  ConvergenceReport rep;
  rep.eps_list = cfg.eps_list;
  rep.snapshot_times = cfg.snapshots;
  rep.Bstar = model.table.Bstar;

  for (double eps : cfg.eps_list) {
    const double L = micro_halfwidth_for(cfg, rep.Bstar, eps);
    const double side = 2.0 * L / eps * cfg.cells_per_eps;
    rep.notes.push_back("eps=" + format_double(eps) + ": micro halfwidth " +
                        format_double(L) + ", " +
                        std::to_string(static_cast<long>(side)) +
                        " cells per side");
  }

  const MacroState init = initial_macro_state(cfg);
  const Vec fbar = sample_macro_field(init, cfg.coefficients.f);
  const MacroRunResult macro =
      run_macro(init, model.table, fbar, cfg.coefficients.gn_kind,
                cfg.coefficients.gn_k, cfg.snapshots, cfg.macro_dt);

  double m_bound = cfg.coefficients.g.amplitude +
                   cfg.t_end * cfg.coefficients.f.amplitude;
  if (cfg.coefficients.gn_kind == RobinKind::constant &&
      cfg.coefficients.gn_k > 0)
    m_bound += 2.0 * cfg.t_end * cfg.coefficients.gn_k * cfg.cells_per_eps;

  for (double eps : cfg.eps_list) {
    const double L = micro_halfwidth_for(cfg, rep.Bstar, eps);
    auto domain = std::make_shared<const MicroDomain>(
        build_micro_domain(cfg.geometry, eps, L, cfg.cells_per_eps));
    MicroStepper stepper(domain, cfg.coefficients, model.disc.c_offset,
                         m_bound);
    MicroRunResult res;
    try {
      res = run_micro(stepper, cfg.snapshots, cfg.macro_dt);
    } catch (const SolverError& e) {
      throw SolverError("micro run failed at eps = " + format_double(eps) +
                        ": " + e.what());
    }
    std::vector<double> l2row, h1row;
    for (size_t s = 0; s < cfg.snapshots.size(); ++s) {
      l2row.push_back(moving_frame_l2_error(res.snapshots[s],
                                            macro.snapshots[s], rep.Bstar));
      h1row.push_back(corrector_h1_error(res.snapshots[s], macro.snapshots[s],
                                         model.table));
    }
    rep.l2_moving.push_back(std::move(l2row));
    rep.h1_corrector.push_back(std::move(h1row));
  }

  auto rates = [&](const std::vector<std::vector<double>>& err) {
    std::vector<std::vector<double>> out;
    for (size_t k = 0; k + 1 < err.size(); ++k) {
      std::vector<double> row;
      const double ratio = std::log(cfg.eps_list[k] / cfg.eps_list[k + 1]);
      for (size_t s = 0; s < err[k].size(); ++s) {
        const double a = err[k][s], b = err[k + 1][s];
        row.push_back(a > 0 && b > 0 ? std::log(a / b) / ratio : 0.0);
      }
      out.push_back(std::move(row));
    }
    return out;
  };
  rep.rates_l2 = rates(rep.l2_moving);
  rep.rates_h1 = rates(rep.h1_corrector);

  if (write_files) {
    std::filesystem::create_directories(cfg.out_dir);
    write_lines(cfg.out_dir + "/report.csv", report_csv_lines(rep));
    write_lines(cfg.out_dir + "/rates.csv", rates_csv_lines(rep));
  }
  return rep;
}

std::vector<std::string> report_csv_lines(const ConvergenceReport& rep) {
  std::vector<std::string> lines{"eps,t,l2_moving,h1_corrector"};
  for (size_t e = 0; e < rep.eps_list.size(); ++e)
    for (size_t s = 0; s < rep.snapshot_times.size(); ++s)
      lines.push_back(format_double(rep.eps_list[e]) + "," +
                      format_double(rep.snapshot_times[s]) + "," +
                      format_double(rep.l2_moving[e][s]) + "," +
                      format_double(rep.h1_corrector[e][s]));
  return lines;
}

std::vector<std::string> rates_csv_lines(const ConvergenceReport& rep) {
  std::vector<std::string> lines{"eps_pair,metric,rate"};
  for (size_t k = 0; k + 1 < rep.eps_list.size(); ++k) {
    const std::string pair = format_double(rep.eps_list[k]) + ":" +
                             format_double(rep.eps_list[k + 1]);
    for (size_t s = 0; s < rep.snapshot_times.size(); ++s) {
      lines.push_back(pair + ",l2_moving[t=" +
                      format_double(rep.snapshot_times[s]) + "]," +
                      format_double(rep.rates_l2[k][s]));
      lines.push_back(pair + ",h1_corrector[t=" +
                      format_double(rep.snapshot_times[s]) + "]," +
                      format_double(rep.rates_h1[k][s]));
    }
  }
  return lines;
}

}  // namespace driftscale
