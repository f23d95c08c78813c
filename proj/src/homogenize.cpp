#include "msfem/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "msfem/error.hpp"

namespace msfem {

namespace {

std::array<int, 4> periodic_cell_nodes(int n, int i, int j) {
  auto id = [n](int a, int b) { return (b % n) * n + (a % n); };
  return {id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)};
}

}  // namespace

std::array<double, 4> effective_matrix(const CellSolution& cell, const CellCoefficients& unit_cell) {
  const int n = cell.n_cell;
  if (unit_cell.nx != n || unit_cell.ny != n) throw InvalidArgument("effective_tensor: cell lattice mismatch");
  const double h = 1.0 / n;
  const auto& mom = q1_gradient_moments();

  // Columns k = 1, 2 of kappa_bar.
  double col[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const auto nodes = periodic_cell_nodes(n, i, j);
      const Tensor2& kap = unit_cell.at(i, j);
      for (int k = 0; k < 2; ++k) {
        const std::vector<double>& chi = k == 0 ? cell.chi1 : cell.chi2;
        // Cell integral of (e_k + grad chi_k).
        double gx = (k == 0 ? h * h : 0.0), gy = (k == 1 ? h * h : 0.0);
        for (int a = 0; a < 4; ++a) {
          gx += h * mom.x[a] * chi[static_cast<std::size_t>(nodes[a])];
          gy += h * mom.y[a] * chi[static_cast<std::size_t>(nodes[a])];
        }
        col[k][0] += kap.xx * gx + kap.xy * gy;
        col[k][1] += kap.xy * gx + kap.yy * gy;
      }
    }
  }
  return {col[0][0], col[1][0], col[0][1], col[1][1]};
}

Tensor2 effective_tensor(const CellSolution& cell, const CellCoefficients& unit_cell) {
  const auto m = effective_matrix(cell, unit_cell);
  // Symmetric up to round-off for symmetric kappa.
  return {m[0], 0.5 * (m[1] + m[2]), m[3]};
}

CellSolution solve_cell_problems(const CellCoefficients& unit_cell, double rel_tol) {
  const int n = unit_cell.nx;
  if (n < 8 || unit_cell.ny != n) throw InvalidArgument("cell problems need a square lattice with n_cell >= 8");
  const double h = 1.0 / n;
  const auto& mom = q1_gradient_moments();

  const SparseSystem base = assemble_periodic_stiffness(unit_cell);
  CellSolution out;
  out.n_cell = n;
  for (int k = 0; k < 2; ++k) {
    SparseSystem sys = base;
    // b_a = - int kappa e_k . grad phi_a
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Tensor2& kap = unit_cell.at(i, j);
        const double fx = k == 0 ? kap.xx : kap.xy;
        const double fy = k == 0 ? kap.xy : kap.yy;
        const auto nodes = periodic_cell_nodes(n, i, j);
        for (int a = 0; a < 4; ++a) sys.rhs[static_cast<std::size_t>(nodes[a])] -= h * (fx * mom.x[a] + fy * mom.y[a]);
      }
    }
    const int pinned[1] = {0};
    const double zero[1] = {0.0};
    apply_dirichlet(sys, pinned, zero);
    SolveResult res = solve_spd(sys, rel_tol);
    out.iterations += res.iterations;
    const double mean = std::accumulate(res.x.begin(), res.x.end(), 0.0) / static_cast<double>(res.x.size());
    for (double& v : res.x) v -= mean;
    (k == 0 ? out.chi1 : out.chi2) = std::move(res.x);
  }
  out.kappa_bar = effective_tensor(out, unit_cell);
  return out;
}

CellSolution solve_cell_problems(const UnitCellFn& unit_cell, int n_cell, double rel_tol) {
  return solve_cell_problems(eval_unit_cell(unit_cell, n_cell), rel_tol);
}

EllipticityBounds EffectiveField::bounds() const {
  EllipticityBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (const Tensor2& t : per_element) {
    b.alpha = std::min(b.alpha, t.min_eigenvalue());
    b.beta = std::max(b.beta, t.max_eigenvalue());
  }
  return b;
}

CellCoefficients EffectiveField::realize(const TwoScaleMesh& mesh) const {
  if (mesh.n_coarse() != n_coarse) throw InvalidArgument("effective field was built for another coarse mesh");
  const int nf = mesh.n_fine();
  CellCoefficients out{nf, nf, mesh.h(), {}};
  out.values.resize(static_cast<std::size_t>(nf) * nf);
  for (int j = 0; j < nf; ++j)
    for (int i = 0; i < nf; ++i) out.at(i, j) = at_element(mesh.element_of_cell(i, j));
  return out;
}

EffectiveField constant_effective_field(const Tensor2& kappa_bar, int n_coarse) {
  if (!kappa_bar.is_spd()) throw InvalidArgument("effective tensor is not SPD");
  return EffectiveField{n_coarse, true, {kappa_bar}, 0};
}

EffectiveField effective_field_locally_periodic(const CoefficientField& field, const TwoScaleMesh& mesh, int n_cell,
                                                double rel_tol) {
  if (field.kind() != CoefficientKind::locally_periodic)
    throw InvalidArgument("effective_field_locally_periodic needs a locally periodic field, got " +
                          to_string(field.kind()));
  EffectiveField out{mesh.n_coarse(), false, {}, n_cell};
  out.per_element.reserve(static_cast<std::size_t>(mesh.num_elements()));
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto [kx, ky] = mesh.element_index(e);
    const Point centroid{(kx + 0.5) * mesh.H(), (ky + 0.5) * mesh.H()};
    try {
      out.per_element.push_back(solve_cell_problems(field.frozen_at(centroid), n_cell, rel_tol).kappa_bar);
    } catch (const SolverError& err) {
      throw SolverError("cell problem for coarse element " + std::to_string(e) + ": " + err.what(), err.residual(),
                        err.iterations());
    }
  }
  return out;
}

EffectiveField effective_field(const CoefficientField& field, const TwoScaleMesh& mesh, int n_cell,
                               double rel_tol) {
  switch (field.kind()) {
    case CoefficientKind::constant: {
      EffectiveField f = constant_effective_field(field({0.5, 0.5}), mesh.n_coarse());
      f.n_cell = n_cell;
      return f;
    }
    case CoefficientKind::locally_periodic:
      return effective_field_locally_periodic(field, mesh, n_cell, rel_tol);
    default: {
      EffectiveField f =
          constant_effective_field(solve_cell_problems(field.frozen_at({0.5, 0.5}), n_cell, rel_tol).kappa_bar,
                                   mesh.n_coarse());
      f.n_cell = n_cell;
      return f;
    }
  }
}

FineSolve solve_homogenized(const TwoScaleMesh& mesh, const EffectiveField& kbar, const SourceFn& f,
                            double rel_tol) {
  const EllipticityBounds b = kbar.bounds();
  if (!(b.alpha > 0.0)) throw InvalidArgument("effective field is not elliptic");
  return solve_dirichlet_zero(Lattice::whole(mesh), kbar.realize(mesh), f, rel_tol);
}

Grid corrector_grid(const CellSolution& cell, int k) {
  if (k != 1 && k != 2) throw InvalidArgument("corrector index must be 1 or 2");
  return Grid{cell.n_cell, cell.n_cell, k == 1 ? cell.chi1 : cell.chi2};
}

Grid tensor_grid(const Tensor2& t) { return Grid{2, 2, {t.xx, t.xy, t.xy, t.yy}}; }

}  // namespace msfem
