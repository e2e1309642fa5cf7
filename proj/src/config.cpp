#include "driftscale/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace driftscale {

RunConfig::RunConfig() {
  auto& c = coefficients;
  c.d_kind = DiffusionKind::constant_diag;
  c.d1 = c.d2 = 1.0;
  c.b_kind = DriftKind::strip_shear;
  c.b_max = 1.0;
  c.strip = 0.25;
  c.c_kind = CapacityKind::strip;
  c.c0 = 1.0;
  c.gn_kind = RobinKind::linear;
  c.f = BumpSpec{0.0, 0.3, {0, 0}};
  c.g = BumpSpec{0.45, 0.35, {0, 0}};
  c.theta = 1.0;
  c.theta_tilde = 1.0;
}

void RunConfig::validate() const {
  if (eps_list.empty()) throw ConfigError("eps_list must not be empty");
  for (size_t i = 1; i < eps_list.size(); ++i)
    if (eps_list[i] >= eps_list[i - 1])
      throw ConfigError("eps_list must be strictly decreasing");
  for (double e : eps_list)
    if (e <= 0) throw ConfigError("epsilon values must be positive");
  if (t_end < 0) throw ConfigError("t_end must be nonnegative");
  for (double t : snapshots)
    if (t < 0 || t > t_end + 1e-12)
      throw ConfigError("snapshot times must lie within [0, t_end]");
  if (!std::is_sorted(snapshots.begin(), snapshots.end()))
    throw ConfigError("snapshot times must be nondecreasing");
  if (n_samples < 3) throw ConfigError("n_samples must be at least 3");
  if (macro_halfwidth <= 0) throw ConfigError("macro_halfwidth must be positive");
  if (coefficients.g.radius >= macro_halfwidth ||
      coefficients.f.radius >= macro_halfwidth)
    throw ConfigError("bump supports must lie strictly inside the macro box");
  if (macro_dt <= 0) throw ConfigError("macro_dt must be positive");
}

namespace {

struct RawConfig {
  // section -> ordered (key, value) pairs
  std::vector<std::tuple<std::string, std::string, std::string>> entries;
};

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    raw.entries.emplace_back(section, trim(line.substr(0, eq)),
                             trim(line.substr(eq + 1)));
  }
  return raw;
}

double to_num(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse number '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_num(key, v);
  if (x != std::floor(x))
    throw ConfigError("config key '" + key + "': expected an integer");
  return static_cast<int>(x);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream ss(v);
  std::string tok;
  while (ss >> tok) out.push_back(to_num(key, tok));
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  bool theta_auto = true, theta_tilde_auto = true;
  const RawConfig raw = tokenize(text);

  for (const auto& [section, key, value] : raw.entries) {
    auto& c = cfg.coefficients;
    if (section == "geometry") {
      if (key == "obstacle") {
        if (value == "none") cfg.geometry.kind = ObstacleKind::none;
        else if (value == "square") cfg.geometry.kind = ObstacleKind::axis_square;
        else if (value == "disk") cfg.geometry.kind = ObstacleKind::disk;
        else throw ConfigError("unknown obstacle kind '" + value + "'");
      } else if (key == "size") cfg.geometry.size = to_num(key, value);
      else if (key == "center_x") cfg.geometry.center[0] = to_num(key, value);
      else if (key == "center_y") cfg.geometry.center[1] = to_num(key, value);
      else throw ConfigError("unknown geometry key '" + key + "'");
    } else if (section == "coefficients") {
      if (key == "diffusion") {
        if (value == "constant") c.d_kind = DiffusionKind::constant_diag;
        else if (value == "modulated") c.d_kind = DiffusionKind::modulated_iso;
        else throw ConfigError("unknown diffusion kind '" + value + "'");
      } else if (key == "d1") c.d1 = to_num(key, value);
      else if (key == "d2") c.d2 = to_num(key, value);
      else if (key == "d_base") c.d_base = to_num(key, value);
      else if (key == "d_mod") c.d_mod = to_num(key, value);
      else if (key == "drift") {
        if (value == "none") c.b_kind = DriftKind::none;
        else if (value == "constant") c.b_kind = DriftKind::constant;
        else if (value == "strip_shear") c.b_kind = DriftKind::strip_shear;
        else throw ConfigError("unknown drift kind '" + value + "'");
      } else if (key == "b_max") c.b_max = to_num(key, value);
      else if (key == "b_x") c.b_const[0] = to_num(key, value);
      else if (key == "b_y") c.b_const[1] = to_num(key, value);
      else if (key == "strip") c.strip = to_num(key, value);
      else if (key == "capacity") {
        if (value == "none") c.c_kind = CapacityKind::none;
        else if (value == "constant") c.c_kind = CapacityKind::constant;
        else if (value == "strip") c.c_kind = CapacityKind::strip;
        else throw ConfigError("unknown capacity kind '" + value + "'");
      } else if (key == "c0") c.c0 = to_num(key, value);
      else if (key == "c_const") c.c_const = to_num(key, value);
      else if (key == "g_n") {
        if (value == "linear") c.gn_kind = RobinKind::linear;
        else if (value == "constant") c.gn_kind = RobinKind::constant;
        else throw ConfigError("unknown g_n kind '" + value + "'");
      } else if (key == "gn_k") c.gn_k = to_num(key, value);
      else if (key == "f_amplitude") c.f.amplitude = to_num(key, value);
      else if (key == "f_radius") c.f.radius = to_num(key, value);
      else if (key == "g_amplitude") c.g.amplitude = to_num(key, value);
      else if (key == "g_radius") c.g.radius = to_num(key, value);
      else if (key == "theta") {
        if (value != "auto") { c.theta = to_num(key, value); theta_auto = false; }
      } else if (key == "theta_tilde") {
        if (value != "auto") { c.theta_tilde = to_num(key, value); theta_tilde_auto = false; }
      } else throw ConfigError("unknown coefficients key '" + key + "'");
    } else if (section == "discretization") {
      if (key == "cell_n") cfg.cell_n = to_int(key, value);
      else if (key == "macro_m") cfg.macro_m = to_int(key, value);
      else if (key == "cells_per_eps") cfg.cells_per_eps = to_int(key, value);
      else if (key == "solve_tol") cfg.solve_tol = to_num(key, value);
      else if (key == "compat_tol") cfg.compat_tol = to_num(key, value);
      else if (key == "assumption_tol") cfg.assumption_tol = to_num(key, value);
      else if (key == "macro_dt") cfg.macro_dt = to_num(key, value);
      else throw ConfigError("unknown discretization key '" + key + "'");
    } else if (section == "experiment") {
      if (key == "eps_list") cfg.eps_list = to_list(key, value);
      else if (key == "t_end") cfg.t_end = to_num(key, value);
      else if (key == "snapshots") cfg.snapshots = to_list(key, value);
      else if (key == "u_max")
        cfg.u_max = value == "auto" ? -1 : to_num(key, value);
      else if (key == "n_samples") cfg.n_samples = to_int(key, value);
      else if (key == "macro_halfwidth") cfg.macro_halfwidth = to_num(key, value);
      else if (key == "micro_halfwidth")
        cfg.micro_halfwidth = value == "auto" ? -1 : to_num(key, value);
      else if (key == "out_dir") cfg.out_dir = value;
      else throw ConfigError("unknown experiment key '" + key + "'");
    } else {
      throw ConfigError("unknown config section '" + section + "'");
    }
  }

  auto& c = cfg.coefficients;
  if (theta_auto) {
    c.theta = c.d_kind == DiffusionKind::constant_diag
                  ? std::min(c.d1, c.d2)
                  : c.d_base * (1.0 - std::abs(c.d_mod));
  }
  if (theta_tilde_auto) {
    c.theta_tilde = c.d_kind == DiffusionKind::constant_diag
                        ? std::max(c.d1, c.d2)
                        : c.d_base * (1.0 + std::abs(c.d_mod));
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace driftscale
