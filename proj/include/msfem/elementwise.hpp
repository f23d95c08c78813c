#pragma once

#include <vector>

#include "msfem/fem_kernel.hpp"
#include "msfem/mesh2s.hpp"

namespace msfem {

/// Broken function: one (refine+1)^2 nodal vector per coarse element, so
/// values on coarse edges may differ between neighbours.
struct ElementwiseFineFunction {
  int n_coarse = 0;
  int refine = 0;
  std::vector<std::vector<double>> pieces;

  ElementwiseFineFunction() = default;
  explicit ElementwiseFineFunction(const TwoScaleMesh& mesh, double fill = 0.0);

  /// Value of piece `element` at the global fine lattice point g (inside K).
  double value(const TwoScaleMesh& mesh, int element, const LatticeIndex& g) const;
  bool matches(const TwoScaleMesh& mesh) const;
};

inline Lattice element_lattice(const TwoScaleMesh& mesh, int element) {
  return Lattice::box(mesh, mesh.element_cells(element));
}

/// Restriction of a global fine function to every coarse element.
ElementwiseFineFunction restrict_to_elements(const TwoScaleMesh& mesh, const FineFunction& u);
/// Restriction of a function living on a sub-lattice (a patch) to one element.
std::vector<double> restrict_to_element(const TwoScaleMesh& mesh, int element, const FineFunction& u);

}  // namespace msfem
