#pragma once

// Q1 bilinear assembly on uniform square lattices, Dirichlet elimination, and
// the linear solvers shared by every other module.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "msfem/coeff.hpp"
#include "msfem/mesh2s.hpp"

namespace msfem {

/// A rectangular block of nx x ny fine cells of size h whose lower-left cell
/// is (i0, j0) in the global fine lattice.
struct Lattice {
  int i0 = 0;
  int j0 = 0;
  int nx = 0;
  int ny = 0;
  double h = 0.0;

  static Lattice whole(const TwoScaleMesh& mesh) { return {0, 0, mesh.n_fine(), mesh.n_fine(), mesh.h()}; }
  static Lattice box(const TwoScaleMesh& mesh, const CellBox& b) {
    return {b.i_lo, b.j_lo, b.cells_x(), b.cells_y(), mesh.h()};
  }

  int num_nodes() const { return (nx + 1) * (ny + 1); }
  int num_cells() const { return nx * ny; }
  int node(int i, int j) const { return j * (nx + 1) + i; }
  /// Local node index for a global fine lattice coordinate.
  int local_node(const LatticeIndex& g) const { return node(g.i - i0, g.j - j0); }
  Point coords(int i, int j) const { return {(i0 + i) * h, (j0 + j) * h}; }
  bool contains_global(const LatticeIndex& g) const {
    return g.i >= i0 && g.i <= i0 + nx && g.j >= j0 && g.j <= j0 + ny;
  }
};

/// Nodal values over a lattice.
struct FineFunction {
  Lattice lattice;
  std::vector<double> values;

  FineFunction() = default;
  explicit FineFunction(const Lattice& lat, double fill = 0.0)
      : lattice(lat), values(static_cast<std::size_t>(lat.num_nodes()), fill) {}
  FineFunction(const Lattice& lat, std::vector<double> v);

  double at(int i, int j) const { return values[static_cast<std::size_t>(lattice.node(i, j))]; }
  double at_global(const LatticeIndex& g) const {
    return values[static_cast<std::size_t>(lattice.local_node(g))];
  }
};

/// Row-compressed sparse matrix.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(int rows, std::vector<int> row_ptr, std::vector<int> cols, std::vector<double> vals);

  int rows() const { return rows_; }
  std::size_t nnz() const { return vals_.size(); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return cols_; }
  const std::vector<double>& vals() const { return vals_; }
  std::vector<double>& vals() { return vals_; }

  double at(int r, int c) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> diagonal() const;
  /// max |A - A^T| / max |A| over stored entries.
  double asymmetry() const;

 private:
  int rows_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> vals_;
};

struct SparseSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  bool symmetric = true;
  /// Constrained node ids, ascending, with their prescribed values.
  std::vector<int> constrained;
  std::vector<double> constrained_values;

  int dimension() const { return matrix.rows(); }
};

using ElementMatrix = std::array<std::array<double, 4>, 4>;

/// Exact Q1 stiffness of a square cell with constant tensor, local nodes
/// counter-clockwise from lower left. Independent of the cell size in 2D.
ElementMatrix q1_element_stiffness(const Tensor2& kappa);
/// Integral of grad(phi_a) over a cell of size h is h * moments[a].
struct GradientMoments {
  std::array<double, 4> x;
  std::array<double, 4> y;
};
const GradientMoments& q1_gradient_moments();

/// 9-point stiffness over a lattice; `coeffs` must cover the lattice's
/// global cell range.
SparseSystem assemble_stiffness(const Lattice& lattice, const CellCoefficients& coeffs);
/// Stiffness on the n x n periodic lattice of nodes carried by `coeffs`.
SparseSystem assemble_periodic_stiffness(const CellCoefficients& coeffs);

using SourceFn = std::function<double(Point)>;
/// Midpoint-lumped load: f(mid) * h^2 / 4 to each node of every cell.
std::vector<double> assemble_load(const Lattice& lattice, const SourceFn& f);

/// Eliminates the given nodes: their rows become identity rows, their columns
/// are moved to the right-hand side. Duplicate ids must carry equal values.
void apply_dirichlet(SparseSystem& system, std::span<const int> nodes, std::span<const double> values);

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  ///< ||b - Ax|| / ||b||
};

/// Default iteration cap 20 sqrt(n) + 2000.
int default_max_iterations(int n);

/// Jacobi-preconditioned conjugate gradients. Throws SolverError when the
/// relative residual does not reach rel_tol within max_iter iterations.
SolveResult solve_spd(const SparseSystem& system, double rel_tol = 1e-10, int max_iter = -1);

/// Sparse LDL^T factorization (AMD ordering), for many solves with one matrix.
class SparseCholesky {
 public:
  explicit SparseCholesky(const CsrMatrix& matrix);
  ~SparseCholesky();
  SparseCholesky(SparseCholesky&&) noexcept;
  SparseCholesky& operator=(SparseCholesky&&) noexcept;

  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static DenseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
  std::vector<double> multiply(std::span<const double> x) const;
  double norm1() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Largest dense system accepted by the dense solvers.
inline constexpr int kDenseCap = 5000;

/// LU with partial pivoting plus a Hager-style 1-norm condition estimate.
class DenseLU {
 public:
  explicit DenseLU(DenseMatrix a);

  std::vector<double> solve(std::span<const double> rhs) const;
  std::vector<double> solve_transpose(std::span<const double> rhs) const;
  double rcond() const { return rcond_; }
  int size() const { return lu_.rows(); }

 private:
  DenseMatrix lu_;
  std::vector<int> perm_;
  double rcond_ = 0.0;
};

struct DenseSolveResult {
  std::vector<double> x;
  double rcond = 0.0;
};

DenseSolveResult solve_dense(const DenseMatrix& a, std::span<const double> rhs);

/// Symmetric positive (semi)definite solve by Cholesky with diagonal
/// pivoting; rcond is the ratio of smallest to largest pivot.
DenseSolveResult solve_dense_spd(const DenseMatrix& a, std::span<const double> rhs);

/// sum over cells of the lattice of u_c^T K_c v_c, u and v nodal on the lattice.
double energy_inner(const Lattice& lattice, const CellCoefficients& coeffs, std::span<const double> u,
                    std::span<const double> v);
inline double energy_norm(const Lattice& lattice, const CellCoefficients& coeffs, std::span<const double> u) {
  return std::sqrt(std::max(0.0, energy_inner(lattice, coeffs, u, u)));
}

struct FineSolve {
  FineFunction u;
  int iterations = 0;
};

/// -div(kappa grad u) = f on the lattice with u = 0 on its boundary, by CG.
FineSolve solve_dirichlet_zero(const Lattice& lattice, const CellCoefficients& coeffs, const SourceFn& f,
                               double rel_tol = 1e-10);

}  // namespace msfem
