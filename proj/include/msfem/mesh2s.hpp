#pragma once

// Nested coarse/fine Cartesian meshes on the unit square, oversampled
// patches and coarse-edge incidence.

#include <array>
#include <vector>

namespace msfem {

/// Integer lattice coordinates (fine or coarse, depending on context).
struct LatticeIndex {
  int i = 0;
  int j = 0;

  friend bool operator==(const LatticeIndex&, const LatticeIndex&) = default;
};

/// Inclusive range of fine-cell indices per axis.
struct CellBox {
  int i_lo = 0;
  int i_hi = -1;
  int j_lo = 0;
  int j_hi = -1;

  int cells_x() const { return i_hi - i_lo + 1; }
  int cells_y() const { return j_hi - j_lo + 1; }
  bool contains_cell(int i, int j) const { return i >= i_lo && i <= i_hi && j >= j_lo && j <= j_hi; }
  bool contains(const CellBox& other) const {
    return other.i_lo >= i_lo && other.i_hi <= i_hi && other.j_lo >= j_lo && other.j_hi <= j_hi;
  }

  friend bool operator==(const CellBox&, const CellBox&) = default;
};

enum class EdgeOrientation { vertical, horizontal };

/// Interior coarse edge shared by two coarse elements. For a vertical edge
/// `first` lies to the left of `second`; for a horizontal one, below it.
struct CoarseEdge {
  int id = 0;
  EdgeOrientation orientation = EdgeOrientation::vertical;
  LatticeIndex start;  ///< lower/left endpoint, coarse lattice coordinates
  int first = 0;
  int second = 0;
};

class TwoScaleMesh {
 public:
  /// Upper bound on fine cells per axis accepted by the constructor.
  static constexpr int kDefaultMaxFineCells = 4096;

  TwoScaleMesh(int n_coarse, int refine, int max_fine_cells = kDefaultMaxFineCells);

  int n_coarse() const { return n_coarse_; }
  int refine() const { return refine_; }
  int n_fine() const { return n_coarse_ * refine_; }
  double H() const { return 1.0 / n_coarse_; }
  double h() const { return 1.0 / n_fine(); }

  int num_fine_nodes() const { return (n_fine() + 1) * (n_fine() + 1); }
  int num_fine_cells() const { return n_fine() * n_fine(); }
  int fine_node_id(int i, int j) const { return j * (n_fine() + 1) + i; }
  LatticeIndex fine_node(int id) const { return {id % (n_fine() + 1), id / (n_fine() + 1)}; }
  bool on_domain_boundary(int i, int j) const { return i == 0 || j == 0 || i == n_fine() || j == n_fine(); }

  int num_elements() const { return n_coarse_ * n_coarse_; }
  int element_id(int kx, int ky) const { return ky * n_coarse_ + kx; }
  LatticeIndex element_index(int element) const { return {element % n_coarse_, element / n_coarse_}; }
  CellBox element_cells(int element) const;
  /// Corners x_{K,1..4} in fine lattice coordinates, counter-clockwise from lower left.
  std::array<LatticeIndex, 4> element_corners(int element) const;
  /// Coarse lattice coordinates of the same corners.
  std::array<LatticeIndex, 4> element_coarse_corners(int element) const;
  /// Coarse element containing the fine cell (i, j).
  int element_of_cell(int i, int j) const { return element_id(i / refine_, j / refine_); }

  int num_coarse_nodes() const { return (n_coarse_ + 1) * (n_coarse_ + 1); }
  /// Index into the interior node set J_H, or -1 for coarse nodes on the boundary.
  int interior_node_index(int ci, int cj) const;
  /// Coarse lattice coordinates of the interior nodes, ordered by J_H index.
  const std::vector<LatticeIndex>& interior_nodes() const { return interior_nodes_; }
  int num_interior_nodes() const { return static_cast<int>(interior_nodes_.size()); }

  const std::vector<CoarseEdge>& interior_edges() const { return interior_edges_; }

 private:
  int n_coarse_;
  int refine_;
  std::vector<LatticeIndex> interior_nodes_;
  std::vector<CoarseEdge> interior_edges_;
};

/// Validating factory; rejects n_coarse < 2, refine < 2 and oversized grids.
TwoScaleMesh build_two_scale_mesh(int n_coarse, int refine,
                                  int max_fine_cells = TwoScaleMesh::kDefaultMaxFineCells);

/// Oversampled subdomain K^m: K grown by m fine layers on each side, clipped to D.
struct Patch {
  int owner = 0;
  int m = 0;
  CellBox cells;
  /// Patch rectangle corners x_{K^m,1..4}, fine lattice coordinates, counter-clockwise.
  std::array<LatticeIndex, 4> corners;
  /// Global fine node ids on the part of the patch boundary inside D (gamma).
  std::vector<int> interior_boundary;
  /// Global fine node ids on the part of the patch boundary lying on dD (Gamma).
  std::vector<int> exterior_boundary;
  double diameter = 0.0;

  bool touches_domain_boundary() const { return !exterior_boundary.empty(); }
};

Patch oversample_patch(const TwoScaleMesh& mesh, int element, int m);

/// Maximum over fine cells of the number of patches K^m containing the cell.
int overlap_count(const TwoScaleMesh& mesh, int m);

/// Global fine node ids on a closed interior coarse edge, ordered by coordinate.
std::vector<int> interface_fine_nodes(const TwoScaleMesh& mesh, int edge_id);

}  // namespace msfem
