#pragma once

// Plain-text grid files: a first line "nx ny", then nx*ny whitespace
// separated values, row-major with rows along y.

#include <iosfwd>
#include <string>
#include <vector>

#include "msfem/coeff.hpp"

namespace msfem {

struct Grid {
  int nx = 0;
  int ny = 0;
  std::vector<double> values;

  friend bool operator==(const Grid&, const Grid&) = default;
};

Grid parse_grid(std::istream& in, const std::string& source_name = "<stream>");
Grid read_grid(const std::string& path);
/// Values are written with 17 significant digits so they re-parse exactly.
void write_grid(std::ostream& out, const Grid& grid);
void write_grid(const std::string& path, const Grid& grid);

/// Square isotropic unit cell from a grid file.
SampledCell sampled_cell_from_grid(const Grid& grid);

}  // namespace msfem
