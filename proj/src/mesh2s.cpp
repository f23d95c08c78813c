#include "msfem/mesh2s.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msfem/error.hpp"

namespace msfem {

TwoScaleMesh::TwoScaleMesh(int n_coarse, int refine, int max_fine_cells)
    : n_coarse_(n_coarse), refine_(refine) {
  if (n_coarse < 2) throw InvalidArgument("n_coarse must be >= 2, got " + std::to_string(n_coarse));
  if (refine < 2) throw InvalidArgument("refine must be >= 2, got " + std::to_string(refine));
  if (static_cast<long long>(n_coarse) * refine > max_fine_cells) {
    throw InvalidArgument("n_coarse*refine = " + std::to_string(static_cast<long long>(n_coarse) * refine) +
                          " exceeds the fine-grid cap " + std::to_string(max_fine_cells));
  }

  interior_nodes_.reserve(static_cast<std::size_t>((n_coarse - 1) * (n_coarse - 1)));
  for (int cj = 1; cj < n_coarse; ++cj)
    for (int ci = 1; ci < n_coarse; ++ci) interior_nodes_.push_back({ci, cj});

  const int n = n_coarse;
  interior_edges_.reserve(static_cast<std::size_t>(2 * n * (n - 1)));
  for (int cj = 0; cj < n; ++cj) {
    for (int ci = 1; ci < n; ++ci) {
      interior_edges_.push_back({static_cast<int>(interior_edges_.size()), EdgeOrientation::vertical, {ci, cj},
                                 element_id(ci - 1, cj), element_id(ci, cj)});
    }
  }
  for (int cj = 1; cj < n; ++cj) {
    for (int ci = 0; ci < n; ++ci) {
      interior_edges_.push_back({static_cast<int>(interior_edges_.size()), EdgeOrientation::horizontal, {ci, cj},
                                 element_id(ci, cj - 1), element_id(ci, cj)});
    }
  }
}

CellBox TwoScaleMesh::element_cells(int element) const {
  const auto [kx, ky] = element_index(element);
  return {kx * refine_, (kx + 1) * refine_ - 1, ky * refine_, (ky + 1) * refine_ - 1};
}

std::array<LatticeIndex, 4> TwoScaleMesh::element_corners(int element) const {
  const auto [kx, ky] = element_index(element);
  const int x0 = kx * refine_, x1 = (kx + 1) * refine_;
  const int y0 = ky * refine_, y1 = (ky + 1) * refine_;
  return {LatticeIndex{x0, y0}, LatticeIndex{x1, y0}, LatticeIndex{x1, y1}, LatticeIndex{x0, y1}};
}

std::array<LatticeIndex, 4> TwoScaleMesh::element_coarse_corners(int element) const {
  const auto [kx, ky] = element_index(element);
  return {LatticeIndex{kx, ky}, LatticeIndex{kx + 1, ky}, LatticeIndex{kx + 1, ky + 1}, LatticeIndex{kx, ky + 1}};
}

int TwoScaleMesh::interior_node_index(int ci, int cj) const {
  if (ci <= 0 || cj <= 0 || ci >= n_coarse_ || cj >= n_coarse_) return -1;
  return (cj - 1) * (n_coarse_ - 1) + (ci - 1);
}

TwoScaleMesh build_two_scale_mesh(int n_coarse, int refine, int max_fine_cells) {
  return TwoScaleMesh(n_coarse, refine, max_fine_cells);
}

namespace {

void check_m(const TwoScaleMesh& mesh, int m) {
  if (m < 1 || m > mesh.refine()) {
    throw InvalidArgument("oversampling layers m=" + std::to_string(m) + " outside [1, refine=" +
                          std::to_string(mesh.refine()) + "]");
  }
}

}  // namespace

Patch oversample_patch(const TwoScaleMesh& mesh, int element, int m) {
  if (element < 0 || element >= mesh.num_elements())
    throw InvalidArgument("invalid coarse element id " + std::to_string(element));
  check_m(mesh, m);

  const int nf = mesh.n_fine();
  const CellBox k = mesh.element_cells(element);
  Patch patch;
  patch.owner = element;
  patch.m = m;
  patch.cells = {std::max(0, k.i_lo - m), std::min(nf - 1, k.i_hi + m), std::max(0, k.j_lo - m),
                 std::min(nf - 1, k.j_hi + m)};
  const int x0 = patch.cells.i_lo, x1 = patch.cells.i_hi + 1;
  const int y0 = patch.cells.j_lo, y1 = patch.cells.j_hi + 1;
  patch.corners = {LatticeIndex{x0, y0}, LatticeIndex{x1, y0}, LatticeIndex{x1, y1}, LatticeIndex{x0, y1}};

  auto classify = [&](int i, int j) {
    const int id = mesh.fine_node_id(i, j);
    if (mesh.on_domain_boundary(i, j))
      patch.exterior_boundary.push_back(id);
    else
      patch.interior_boundary.push_back(id);
  };
  // Walk the boundary once, row by row so ids come out sorted.
  for (int j = y0; j <= y1; ++j) {
    if (j == y0 || j == y1) {
      for (int i = x0; i <= x1; ++i) classify(i, j);
    } else {
      classify(x0, j);
      classify(x1, j);
    }
  }

  const double h = mesh.h();
  patch.diameter = std::hypot((x1 - x0) * h, (y1 - y0) * h);
  return patch;
}

int overlap_count(const TwoScaleMesh& mesh, int m) {
  check_m(mesh, m);
  // Patch boxes are products of per-axis ranges, so the count factorizes.
  const int nf = mesh.n_fine();
  const int r = mesh.refine();
  std::vector<int> per_axis(static_cast<std::size_t>(nf), 0);
  for (int k = 0; k < mesh.n_coarse(); ++k) {
    const int lo = std::max(0, k * r - m);
    const int hi = std::min(nf - 1, (k + 1) * r - 1 + m);
    for (int i = lo; i <= hi; ++i) ++per_axis[static_cast<std::size_t>(i)];
  }
  const int best = *std::max_element(per_axis.begin(), per_axis.end());
  return best * best;
}

std::vector<int> interface_fine_nodes(const TwoScaleMesh& mesh, int edge_id) {
  const auto& edges = mesh.interior_edges();
  if (edge_id < 0 || edge_id >= static_cast<int>(edges.size()))
    throw InvalidArgument("invalid interior coarse edge id " + std::to_string(edge_id));
  const CoarseEdge& e = edges[static_cast<std::size_t>(edge_id)];
  const int r = mesh.refine();
  std::vector<int> nodes;
  nodes.reserve(static_cast<std::size_t>(r + 1));
  const int i0 = e.start.i * r, j0 = e.start.j * r;
  for (int t = 0; t <= r; ++t) {
    nodes.push_back(e.orientation == EdgeOrientation::vertical ? mesh.fine_node_id(i0, j0 + t)
                                                                 : mesh.fine_node_id(i0 + t, j0));
  }
  return nodes;
}

}  // namespace msfem
