#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "driftscale/types.hpp"

namespace driftscale {

// shortest round-trip decimal representation
std::string format_double(double v);

// Plain-text grid dump: header "N <n> fields <k>", then per field n rows of
// n comma-separated values (row-major), solid cells written as "nan".
// `index` maps flat cell ids to compressed field indices (-1 for solid);
// pass an empty index for full-grid fields.
void write_grid_text(const std::string& path, int n,
                     const std::vector<int>& index,
                     const std::vector<const Vec*>& fields);

struct GridText {
  int n = 0;
  std::vector<Vec> fields;  // full-grid, NaN on solid cells
};

GridText read_grid_text(const std::string& path);

void write_lines(const std::string& path,
                 const std::vector<std::string>& lines);

}  // namespace driftscale
