#pragma once

// Periodic cell problems, the effective tensor, and homogenized solutions.

#include <array>
#include <vector>

#include "msfem/coeff.hpp"
#include "msfem/fem_kernel.hpp"
#include "msfem/grid_io.hpp"
#include "msfem/mesh2s.hpp"

namespace msfem {

/// Correctors chi_1, chi_2 on the n_cell x n_cell periodic node lattice of Y
/// (node (i, j) at (i, j) / n_cell), zero mean, plus the effective tensor.
struct CellSolution {
  int n_cell = 0;
  std::vector<double> chi1;
  std::vector<double> chi2;
  Tensor2 kappa_bar;
  int iterations = 0;  ///< CG iterations summed over both problems
};

/// Solves -div(kappa (grad chi_k + e_k)) = 0 on the periodic unit cell with
/// one pinned dof, then removes the mean. n_cell >= 8.
CellSolution solve_cell_problems(const CellCoefficients& unit_cell, double rel_tol = 1e-12);
CellSolution solve_cell_problems(const UnitCellFn& unit_cell, int n_cell, double rel_tol = 1e-12);

/// kappa_bar e_k = int_Y kappa (e_k + grad chi_k), exact per cell.
/// Row-major 2x2, before symmetrization.
std::array<double, 4> effective_matrix(const CellSolution& cell, const CellCoefficients& unit_cell);
Tensor2 effective_tensor(const CellSolution& cell, const CellCoefficients& unit_cell);

/// Piecewise-constant effective tensor: one per coarse element, or a single
/// one for the periodic case.
struct EffectiveField {
  int n_coarse = 0;
  bool constant = true;
  std::vector<Tensor2> per_element;
  int n_cell = 0;

  const Tensor2& at_element(int element) const {
    return per_element[constant ? 0 : static_cast<std::size_t>(element)];
  }
  /// Measured eigenvalue bounds over all elements.
  EllipticityBounds bounds() const;
  /// Per-fine-cell realization on the mesh.
  CellCoefficients realize(const TwoScaleMesh& mesh) const;
};

EffectiveField constant_effective_field(const Tensor2& kappa_bar, int n_coarse);

/// Cell problems with the slow variable frozen at each coarse element centroid.
EffectiveField effective_field_locally_periodic(const CoefficientField& field, const TwoScaleMesh& mesh,
                                                int n_cell, double rel_tol = 1e-12);

/// Dispatch on the field kind: constant fields need no cell problem, periodic
/// kinds solve one, locally periodic fields one per element.
EffectiveField effective_field(const CoefficientField& field, const TwoScaleMesh& mesh, int n_cell,
                               double rel_tol = 1e-12);

/// u_0 on the fine grid with zero Dirichlet data.
FineSolve solve_homogenized(const TwoScaleMesh& mesh, const EffectiveField& kbar, const SourceFn& f,
                            double rel_tol = 1e-10);

/// Grid-file views of a cell solution.
Grid corrector_grid(const CellSolution& cell, int k);
Grid tensor_grid(const Tensor2& t);

}  // namespace msfem
