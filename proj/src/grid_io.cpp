#include "msfem/grid_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "msfem/error.hpp"

namespace msfem {

Grid parse_grid(std::istream& in, const std::string& source_name) {
  Grid g;
  if (!(in >> g.nx >> g.ny) || g.nx <= 0 || g.ny <= 0)
    throw InvalidArgument(source_name + ": expected a header line 'nx ny' with positive sizes");
  const std::size_t count = static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny);
  g.values.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (!(in >> g.values[k]))
      throw InvalidArgument(source_name + ": expected " + std::to_string(count) + " values, found " +
                            std::to_string(k));
  }
  double extra = 0.0;
  if (in >> extra) throw InvalidArgument(source_name + ": trailing values after " + std::to_string(count));
  return g;
}

Grid read_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open grid file " + path);
  return parse_grid(in, path);
}

void write_grid(std::ostream& out, const Grid& grid) {
  out << grid.nx << ' ' << grid.ny << '\n';
  char buf[32];
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      std::snprintf(buf, sizeof buf, "%.16e", grid.values[static_cast<std::size_t>(j * grid.nx + i)]);
      out << buf << (i + 1 == grid.nx ? '\n' : ' ');
    }
  }
}

void write_grid(const std::string& path, const Grid& grid) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write grid file " + path);
  write_grid(out, grid);
  if (!out) throw InvalidArgument("write failed for grid file " + path);
}

SampledCell sampled_cell_from_grid(const Grid& grid) {
  if (grid.nx != grid.ny) throw InvalidArgument("unit-cell grid must be square");
  return SampledCell{grid.nx, grid.values};
}

}  // namespace msfem
