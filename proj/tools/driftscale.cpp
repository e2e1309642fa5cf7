#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "driftscale/gridio.hpp"
#include "driftscale/harness.hpp"

using namespace driftscale;

namespace {

struct CliState {
  std::string config_path;
  std::string out_dir;
  std::vector<double> eps_override;
  bool seedless = true;

  RunConfig load() const {
    RunConfig cfg = config_path.empty() ? RunConfig() : load_config_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!eps_override.empty()) cfg.eps_list = eps_override;
    cfg.validate();
    return cfg;
  }
};

void add_common(CLI::App* sub, CliState& st) {
  sub->add_option("--config", st.config_path, "configuration file");
  sub->add_option("--out", st.out_dir, "output directory (overrides config)");
  sub->add_option("--eps", st.eps_override, "override the epsilon list");
  sub->add_flag("--seedless", st.seedless,
                "deterministic mode (default; the solver never draws random "
                "numbers)");
}

int cmd_verify(const CliState& st) {
  const RunConfig cfg = st.load();
  const ModelSetup model = build_model(cfg, /*with_table=*/false);
  for (const auto* e : model.report.entries()) {
    std::cout << e->name << (e->pass ? " pass " : " FAIL ") << "residual "
              << format_double(e->residual) << "  (" << e->detail << ")\n";
  }
  return model.report.all_pass() ? 0 : 1;
}

int cmd_cell(const CliState& st, double u0) {
  const RunConfig cfg = st.load();
  auto grid = std::make_shared<CellGrid>(build_cell_grid(cfg.geometry, cfg.cell_n));
  const auto disc = project_zero_mean_BC(
      sample_coefficients(cfg.coefficients, *grid), *grid);
  const CellCorrector c = solve_corrector(*grid, disc, u0, solve_options(cfg));
  std::filesystem::create_directories(cfg.out_dir);
  write_grid_text(cfg.out_dir + "/cell_corrector.txt", grid->n, grid->index,
                  {&c.w1.values, &c.w2.values});
  std::cout << "u0 " << format_double(u0) << "  residuals "
            << format_double(c.w1.residual_norm) << " "
            << format_double(c.w2.residual_norm) << "\n";
  std::cout << "wrote " << cfg.out_dir << "/cell_corrector.txt\n";
  return 0;
}

int cmd_effective(const CliState& st) {
  const RunConfig cfg = st.load();
  const ModelSetup model = build_model(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<std::string> lines;
  lines.push_back("Bstar," + format_double(model.table.Bstar[0]) + "," +
                  format_double(model.table.Bstar[1]));
  lines.push_back("u0,D11,D12,D21,D22");
  for (const auto& s : model.table.samples)
    lines.push_back(format_double(s.u0) + "," + format_double(s.Dstar(0, 0)) +
                    "," + format_double(s.Dstar(0, 1)) + "," +
                    format_double(s.Dstar(1, 0)) + "," +
                    format_double(s.Dstar(1, 1)));
  write_lines(cfg.out_dir + "/effective.csv", lines);
  for (const auto& l : lines) std::cout << l << "\n";
  if (!std::all_of(model.table.samples.begin(), model.table.samples.end(),
                   [](const auto& s) { return s.sym_positive; }))
    std::cout << "warning: symmetric part of D* not positive definite at some "
                 "samples\n";
  return 0;
}

int cmd_macro(const CliState& st) {
  const RunConfig cfg = st.load();
  const ModelSetup model = build_model(cfg);
  const MacroState init = initial_macro_state(cfg);
  const Vec fbar = sample_macro_field(init, cfg.coefficients.f);
  const MacroRunResult res =
      run_macro(init, model.table, fbar, cfg.coefficients.gn_kind,
                cfg.coefficients.gn_k, cfg.snapshots, cfg.macro_dt);
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<std::string> lines{"t,mass,min,max,l2"};
  for (const auto& row : res.summary)
    lines.push_back(format_double(row[0]) + "," + format_double(row[1]) + "," +
                    format_double(row[2]) + "," + format_double(row[3]) + "," +
                    format_double(row[4]));
  write_lines(cfg.out_dir + "/macro_summary.csv", lines);
  for (size_t k = 0; k < res.snapshots.size(); ++k)
    write_grid_text(cfg.out_dir + "/macro_" + std::to_string(k) + ".txt",
                    cfg.macro_m, {}, {&res.snapshots[k].u});
  if (res.boundary_warning)
    std::cout << "warning: macro state reaches the outer boundary\n";
  std::cout << "wrote " << cfg.out_dir << "/macro_summary.csv and "
            << res.snapshots.size() << " snapshots\n";
  return 0;
}

int cmd_micro(const CliState& st) {
  const RunConfig cfg = st.load();
  const ModelSetup model = build_model(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  double m_bound = cfg.coefficients.g.amplitude +
                   cfg.t_end * cfg.coefficients.f.amplitude;
  if (cfg.coefficients.gn_kind == RobinKind::constant &&
      cfg.coefficients.gn_k > 0)
    m_bound += 2.0 * cfg.t_end * cfg.coefficients.gn_k * cfg.cells_per_eps;
  for (double eps : cfg.eps_list) {
    const double L = micro_halfwidth_for(cfg, model.table.Bstar, eps);
    auto domain = std::make_shared<const MicroDomain>(
        build_micro_domain(cfg.geometry, eps, L, cfg.cells_per_eps));
    MicroStepper stepper(domain, cfg.coefficients, model.disc.c_offset, m_bound);
    const MicroRunResult res = run_micro(stepper, cfg.snapshots, cfg.macro_dt);
    const std::string tag = format_double(eps);
    std::vector<std::string> lines{"t,mass,min,max,energy"};
    for (const auto& row : res.summary)
      lines.push_back(format_double(row[0]) + "," + format_double(row[1]) +
                      "," + format_double(row[2]) + "," +
                      format_double(row[3]) + "," + format_double(row[4]));
    write_lines(cfg.out_dir + "/micro_summary_eps" + tag + ".csv", lines);
    for (size_t k = 0; k < res.snapshots.size(); ++k)
      write_grid_text(cfg.out_dir + "/micro_eps" + tag + "_" +
                          std::to_string(k) + ".txt",
                      domain->n, domain->index, {&res.snapshots[k].u});
    std::cout << "eps " << tag << ": min " << format_double(res.min_u)
              << " max " << format_double(res.max_u) << " linf_ok "
              << res.linf_ok << " energy_ok " << res.energy_ok << "\n";
  }
  return 0;
}

int cmd_converge(const CliState& st) {
  const RunConfig cfg = st.load();
  const ConvergenceReport rep = run_convergence_study(cfg);
  for (const auto& n : rep.notes) std::cout << n << "\n";
  for (const auto& l : report_csv_lines(rep)) std::cout << l << "\n";
  std::cout << "wrote " << cfg.out_dir << "/report.csv and " << cfg.out_dir
            << "/rates.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical homogenization of reaction-diffusion with large "
               "nonlinear drift on perforated domains"};
  app.require_subcommand(1);
  CliState st;
  double u0 = 0.0;

  auto* verify = app.add_subcommand("verify", "check the structural assumptions");
  add_common(verify, st);
  auto* cell = app.add_subcommand("cell", "solve the corrector cell problem");
  add_common(cell, st);
  cell->add_option("--u0", u0, "macro state value for the cell problem");
  auto* effective = app.add_subcommand("effective",
                                       "effective drift and dispersion table");
  add_common(effective, st);
  auto* macro = app.add_subcommand("macro", "run the upscaled equation");
  add_common(macro, st);
  auto* micro = app.add_subcommand("micro", "run the microscopic problem");
  add_common(micro, st);
  auto* converge = app.add_subcommand("converge", "epsilon sweep with "
                                      "moving-frame and corrector errors");
  add_common(converge, st);

  CLI11_PARSE(app, argc, argv);
  try {
    if (verify->parsed()) return cmd_verify(st);
    if (cell->parsed()) return cmd_cell(st, u0);
    if (effective->parsed()) return cmd_effective(st);
    if (macro->parsed()) return cmd_macro(st);
    if (micro->parsed()) return cmd_micro(st);
    if (converge->parsed()) return cmd_converge(st);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
