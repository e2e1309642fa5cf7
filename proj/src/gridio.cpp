#include "driftscale/gridio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace driftscale {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_grid_text(const std::string& path, int n,
                     const std::vector<int>& index,
                     const std::vector<const Vec*>& fields) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "N " << n << " fields " << fields.size() << "\n";
  for (const Vec* field : fields) {
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        const int flat = ix + n * iy;
        if (ix) out << ",";
        if (index.empty()) {
          out << format_double((*field)[flat]);
        } else {
          const int p = index[flat];
          if (p < 0)
            out << "nan";
          else
            out << format_double((*field)[p]);
        }
      }
      out << "\n";
    }
  }
}

GridText read_grid_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string tag;
  GridText g;
  int k = 0;
  in >> tag >> g.n;
  if (tag != "N" || g.n <= 0) throw ConfigError("bad grid text header in " + path);
  in >> tag >> k;
  if (tag != "fields" || k < 0) throw ConfigError("bad grid text header in " + path);
  std::string line;
  std::getline(in, line);
  for (int f = 0; f < k; ++f) {
    Vec field(g.n * g.n);
    for (int iy = 0; iy < g.n; ++iy) {
      if (!std::getline(in, line))
        throw ConfigError("truncated grid text in " + path);
      std::stringstream ss(line);
      std::string cell;
      for (int ix = 0; ix < g.n; ++ix) {
        if (!std::getline(ss, cell, ','))
          throw ConfigError("short row in " + path);
        field[ix + g.n * iy] =
            cell == "nan" ? std::nan("") : std::stod(cell);
      }
    }
    g.fields.push_back(std::move(field));
  }
  return g;
}

void write_lines(const std::string& path,
                 const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  for (const auto& l : lines) out << l << "\n";
}

}  // namespace driftscale
