#include "msfem/elementwise.hpp"

#include <string>

#include "msfem/error.hpp"

namespace msfem {

ElementwiseFineFunction::ElementwiseFineFunction(const TwoScaleMesh& mesh, double fill)
    : n_coarse(mesh.n_coarse()), refine(mesh.refine()) {
  const auto per = static_cast<std::size_t>((mesh.refine() + 1) * (mesh.refine() + 1));
  pieces.assign(static_cast<std::size_t>(mesh.num_elements()), std::vector<double>(per, fill));
}

double ElementwiseFineFunction::value(const TwoScaleMesh& mesh, int element, const LatticeIndex& g) const {
  const Lattice lat = element_lattice(mesh, element);
  return pieces[static_cast<std::size_t>(element)][static_cast<std::size_t>(lat.local_node(g))];
}

bool ElementwiseFineFunction::matches(const TwoScaleMesh& mesh) const {
  if (n_coarse != mesh.n_coarse() || refine != mesh.refine()) return false;
  if (pieces.size() != static_cast<std::size_t>(mesh.num_elements())) return false;
  const auto per = static_cast<std::size_t>((refine + 1) * (refine + 1));
  for (const auto& p : pieces)
    if (p.size() != per) return false;
  return true;
}

std::vector<double> restrict_to_element(const TwoScaleMesh& mesh, int element, const FineFunction& u) {
  const Lattice lat = element_lattice(mesh, element);
  if (!u.lattice.contains_global({lat.i0, lat.j0}) || !u.lattice.contains_global({lat.i0 + lat.nx, lat.j0 + lat.ny}))
    throw InvalidArgument("function does not cover coarse element " + std::to_string(element));
  std::vector<double> out(static_cast<std::size_t>(lat.num_nodes()));
  for (int j = 0; j <= lat.ny; ++j)
    for (int i = 0; i <= lat.nx; ++i)
      out[static_cast<std::size_t>(lat.node(i, j))] = u.at_global({lat.i0 + i, lat.j0 + j});
  return out;
}

ElementwiseFineFunction restrict_to_elements(const TwoScaleMesh& mesh, const FineFunction& u) {
  ElementwiseFineFunction out;
  out.n_coarse = mesh.n_coarse();
  out.refine = mesh.refine();
  out.pieces.reserve(static_cast<std::size_t>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e) out.pieces.push_back(restrict_to_element(mesh, e, u));
  return out;
}

}  // namespace msfem
