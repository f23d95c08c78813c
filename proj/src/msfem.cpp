#include "msfem/msfem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msfem/error.hpp"
#include "msfem/metrics.hpp"
#include "msfem/parallel.hpp"

namespace msfem {

std::string to_string(BasisType type) { return type == BasisType::type1 ? "type1" : "type2"; }
std::string to_string(LocalSolver solver) { return solver == LocalSolver::cg ? "cg" : "direct"; }
std::string to_string(ExteriorData data) {
  switch (data) {
    case ExteriorData::zero: return "zero";
    case ExteriorData::bilinear: return "bilinear";
    default: return "auto";
  }
}

bool zero_data_degenerate(const TwoScaleMesh& mesh, const Patch& patch) {
  const int nf = mesh.n_fine();
  const auto k = mesh.element_corners(patch.owner);
  for (std::size_t j = 0; j < 4; ++j) {
    const LatticeIndex c = patch.corners[j];
    const bool domain_corner = (c.i == 0 || c.i == nf) && (c.j == 0 || c.j == nf);
    if (domain_corner && !mesh.on_domain_boundary(k[j].i, k[j].j)) return true;
  }
  return false;
}

double patch_bilinear(const Patch& patch, int corner, const LatticeIndex& node) {
  const LatticeIndex& lo = patch.corners[0];
  const LatticeIndex& hi = patch.corners[2];
  const double s = static_cast<double>(node.i - lo.i) / (hi.i - lo.i);
  const double t = static_cast<double>(node.j - lo.j) / (hi.j - lo.j);
  switch (corner) {
    case 0: return (1.0 - s) * (1.0 - t);
    case 1: return s * (1.0 - t);
    case 2: return s * t;
    case 3: return (1.0 - s) * t;
    default: throw InvalidArgument("patch corner must be 0..3, got " + std::to_string(corner));
  }
}

namespace {

std::string patch_label(const Patch& patch) {
  return "element " + std::to_string(patch.owner) + " (m=" + std::to_string(patch.m) + ")";
}

/// Global coarse interior-node index of corner q of element K, or -1.
int corner_node(const TwoScaleMesh& mesh, int element, int corner) {
  const LatticeIndex c = mesh.element_coarse_corners(element)[static_cast<std::size_t>(corner)];
  return mesh.interior_node_index(c.i, c.j);
}

void check_sets(const TwoScaleMesh& mesh, const std::vector<PatchBasisSet>& sets) {
  if (sets.size() != static_cast<std::size_t>(mesh.num_elements()))
    throw InvalidArgument("expected one basis set per coarse element, got " + std::to_string(sets.size()));
  for (std::size_t k = 0; k < sets.size(); ++k)
    if (sets[k].owner() != static_cast<int>(k))
      throw InvalidArgument("basis set " + std::to_string(k) + " belongs to element " +
                            std::to_string(sets[k].owner()));
}

void check_global(const TwoScaleMesh& mesh, const FineFunction& u, const char* what) {
  const Lattice whole = Lattice::whole(mesh);
  if (u.lattice.i0 != 0 || u.lattice.j0 != 0 || u.lattice.nx != whole.nx || u.lattice.ny != whole.ny ||
      u.values.size() != static_cast<std::size_t>(whole.num_nodes()))
    throw InvalidArgument(std::string(what) + " must live on the whole fine grid");
}

FineFunction combine(const IntermediateBases& phi, const std::array<double, 4>& c) {
  FineFunction out(phi[0].lattice);
  for (int j = 0; j < 4; ++j) {
    if (c[static_cast<std::size_t>(j)] == 0.0) continue;
    const auto& v = phi[static_cast<std::size_t>(j)].values;
    for (std::size_t k = 0; k < v.size(); ++k) out.values[k] += c[static_cast<std::size_t>(j)] * v[k];
  }
  return out;
}

PatchBasisSet make_basis(const TwoScaleMesh& mesh, const Patch& patch, BasisType type,
                         std::shared_ptr<const IntermediateBases> phi, std::shared_ptr<const IntermediateBases> phi_bar,
                         bool bilinear_exterior) {
  if (!phi) throw InvalidArgument("missing intermediate bases for " + patch_label(patch));
  const IntermediateBases& lagrange_source = type == BasisType::type1 ? *phi : *phi_bar;

  PatchBasisSet set;
  set.patch = patch;
  set.type = type;
  set.phi = std::move(phi);
  set.phi_bar = std::move(phi_bar);
  set.bilinear_exterior = bilinear_exterior;
  set.active = bilinear_exterior ? std::array<bool, 4>{true, true, true, true} : active_corners(mesh, patch.owner);

  const auto corners = mesh.element_corners(patch.owner);
  for (int q = 0; q < 4; ++q)
    for (int j = 0; j < 4; ++j)
      set.lagrange(q, j) = lagrange_source[static_cast<std::size_t>(j)].at_global(corners[static_cast<std::size_t>(q)]);

  std::vector<int> act;
  for (int q = 0; q < 4; ++q)
    if (set.active[static_cast<std::size_t>(q)]) act.push_back(q);
  const int na = static_cast<int>(act.size());
  DenseMatrix sub(na, na);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b) sub(a, b) = set.lagrange(act[a], act[b]);

  std::optional<DenseLU> lu;
  try {
    lu.emplace(sub);
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(to_string(type) + " Lagrange matrix singular on " + patch_label(patch) + ": " +
                                  e.what(),
                              e.pivot(), 0.0);
  }
  set.rcond = lu->rcond();
  if (set.rcond < kMinLagrangeRcond)
    throw SingularMatrixError(to_string(type) + " Lagrange matrix ill-conditioned on " + patch_label(patch) +
                                  ", rcond=" + std::to_string(set.rcond),
                              0, set.rcond);

  for (int a = 0; a < na; ++a) {
    std::vector<double> e(static_cast<std::size_t>(na), 0.0);
    e[static_cast<std::size_t>(a)] = 1.0;
    const std::vector<double> x = lu->solve(e);
    const int p = act[static_cast<std::size_t>(a)];
    for (int b = 0; b < na; ++b)
      set.c[static_cast<std::size_t>(p)][static_cast<std::size_t>(act[b])] = x[static_cast<std::size_t>(b)];
    set.on_element[static_cast<std::size_t>(p)] = restrict_to_element(mesh, patch.owner, set.basis(p));
  }
  return set;
}

/// Neumann stiffness of one coarse element.
CsrMatrix element_stiffness(const TwoScaleMesh& mesh, int element, const CellCoefficients& coeffs) {
  return assemble_stiffness(element_lattice(mesh, element), coeffs).matrix;
}

std::vector<double> multiply(const CsrMatrix& a, const std::vector<double>& x) {
  std::vector<double> y(x.size(), 0.0);
  a.multiply(x, y);
  return y;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

/// Coarse hat of interior node (ci, cj) at a fine lattice point.
double global_hat(const TwoScaleMesh& mesh, const LatticeIndex& coarse, const LatticeIndex& g) {
  const double r = mesh.refine();
  const double sx = 1.0 - std::abs(g.i - coarse.i * mesh.refine()) / r;
  const double sy = 1.0 - std::abs(g.j - coarse.j * mesh.refine()) / r;
  return std::max(0.0, sx) * std::max(0.0, sy);
}

/// (f, psi_i) for every interior coarse node with the lumped fine load.
std::vector<double> coarse_load(const TwoScaleMesh& mesh, const SourceFn& f) {
  const Lattice whole = Lattice::whole(mesh);
  const std::vector<double> load = assemble_load(whole, f);
  const int r = mesh.refine();
  std::vector<double> b(static_cast<std::size_t>(mesh.num_interior_nodes()), 0.0);
  for (int k = 0; k < mesh.num_interior_nodes(); ++k) {
    const LatticeIndex c = mesh.interior_nodes()[static_cast<std::size_t>(k)];
    double s = 0.0;
    for (int gj = (c.j - 1) * r + 1; gj < (c.j + 1) * r; ++gj)
      for (int gi = (c.i - 1) * r + 1; gi < (c.i + 1) * r; ++gi)
        s += load[static_cast<std::size_t>(whole.node(gi, gj))] * global_hat(mesh, c, {gi, gj});
    b[static_cast<std::size_t>(k)] = s;
  }
  return b;
}

/// Generic coarse solve: A(i, j) = sum_K a_K(trial_j, hat_i).
CoarseSolveResult coarse_solve(const TwoScaleMesh& mesh, const CellCoefficients& coeffs, const SourceFn& f,
                               const std::function<const std::vector<double>*(int, int)>& trial) {
  const int n = mesh.num_interior_nodes();
  if (n > kDenseCap) throw InvalidArgument("coarse system too large for the dense solver: " + std::to_string(n));
  DenseMatrix a(n, n);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const CsrMatrix ke = element_stiffness(mesh, e, coeffs);
    for (int p = 0; p < 4; ++p) {
      const int col = corner_node(mesh, e, p);
      const std::vector<double>* u = trial(e, p);
      if (col < 0 || u == nullptr) continue;
      const std::vector<double> ku = multiply(ke, *u);
      for (int q = 0; q < 4; ++q) {
        const int row = corner_node(mesh, e, q);
        if (row < 0) continue;
        a(row, col) += dot(coarse_hat_on_element(mesh, e, q), ku);
      }
    }
  }
  const std::vector<double> b = coarse_load(mesh, f);
  CoarseSolveResult out;
  try {
    DenseSolveResult s = solve_dense(a, b);
    out.solution.coefficients = std::move(s.x);
    out.rcond = s.rcond;
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string("coarse system: ") + e.what(), e.pivot(), e.rcond());
  }
  return out;
}

}  // namespace

IntermediateBases intermediate_bases(const TwoScaleMesh& mesh, const Patch& patch, const CellCoefficients& coeffs,
                                     const LocalSolveOptions& options, bool bilinear_exterior) {
  const Lattice lat = Lattice::box(mesh, patch.cells);
  const SparseSystem base = assemble_stiffness(lat, coeffs);

  std::vector<int> nodes;
  std::vector<LatticeIndex> gamma;
  nodes.reserve(patch.interior_boundary.size() + patch.exterior_boundary.size());
  // Nodes carrying psi come first; the remaining ones are held at zero.
  for (int id : patch.interior_boundary) gamma.push_back(mesh.fine_node(id));
  if (bilinear_exterior)
    for (int id : patch.exterior_boundary) gamma.push_back(mesh.fine_node(id));
  for (const auto& g : gamma) nodes.push_back(lat.local_node(g));
  if (!bilinear_exterior)
    for (int id : patch.exterior_boundary) nodes.push_back(lat.local_node(mesh.fine_node(id)));

  std::unique_ptr<SparseCholesky> factor;
  IntermediateBases out;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> values(nodes.size(), 0.0);
    for (std::size_t k = 0; k < gamma.size(); ++k) values[k] = patch_bilinear(patch, i, gamma[k]);
    SparseSystem sys = base;
    sys.rhs.assign(static_cast<std::size_t>(lat.num_nodes()), 0.0);
    apply_dirichlet(sys, nodes, values);

    std::vector<double> x;
    if (options.solver == LocalSolver::direct) {
      if (!factor) factor = std::make_unique<SparseCholesky>(sys.matrix);
      x = factor->solve(sys.rhs);
    } else {
      try {
        x = solve_spd(sys, options.cg_tol).x;
      } catch (const SolverError& e) {
        throw SolverError("intermediate basis " + std::to_string(i) + " on " + patch_label(patch) + ": " + e.what(),
                          e.residual(), e.iterations());
      }
    }
    out[static_cast<std::size_t>(i)] = FineFunction(lat, std::move(x));
  }
  return out;
}

std::array<bool, 4> active_corners(const TwoScaleMesh& mesh, int element) {
  std::array<bool, 4> out{};
  const auto corners = mesh.element_corners(element);
  for (std::size_t q = 0; q < 4; ++q) out[q] = !mesh.on_domain_boundary(corners[q].i, corners[q].j);
  return out;
}

FineFunction PatchBasisSet::basis(int p) const { return combine(*phi, c[static_cast<std::size_t>(p)]); }

FineFunction PatchBasisSet::macroscopic_basis(int p) const {
  if (!phi_bar) throw InvalidArgument("macroscopic component requested from a set without Phi_bar");
  return combine(*phi_bar, c[static_cast<std::size_t>(p)]);
}

PatchBasisSet type1_basis(const TwoScaleMesh& mesh, const Patch& patch,
                          std::shared_ptr<const IntermediateBases> phi, bool bilinear_exterior) {
  return make_basis(mesh, patch, BasisType::type1, std::move(phi), nullptr, bilinear_exterior);
}

PatchBasisSet type2_basis(const TwoScaleMesh& mesh, const Patch& patch, std::shared_ptr<const IntermediateBases> phi,
                          std::shared_ptr<const IntermediateBases> phi_bar, bool bilinear_exterior) {
  if (!phi_bar) throw InvalidArgument("Type-2 basis needs Phi_bar on " + patch_label(patch));
  return make_basis(mesh, patch, BasisType::type2, std::move(phi), std::move(phi_bar), bilinear_exterior);
}

double lagrange_deviation(const TwoScaleMesh& mesh, const PatchBasisSet& set) {
  const auto corners = mesh.element_corners(set.owner());
  double worst = 0.0;
  for (int p = 0; p < 4; ++p) {
    if (!set.active[static_cast<std::size_t>(p)]) continue;
    const FineFunction f = set.type == BasisType::type1 ? set.basis(p) : set.macroscopic_basis(p);
    for (int q = 0; q < 4; ++q) {
      if (!set.active[static_cast<std::size_t>(q)]) continue;
      const double target = p == q ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(f.at_global(corners[static_cast<std::size_t>(q)]) - target));
    }
  }
  return worst;
}

BasisLibrary build_basis_library(const TwoScaleMesh& mesh, const CellCoefficients& fine_coeffs,
                                 const CellCoefficients* macro_coeffs, const BasisBuildOptions& options) {
  if (!options.type1 && !options.type2) throw InvalidArgument("no basis type requested");
  if (options.type2 && macro_coeffs == nullptr)
    throw InvalidArgument("Type-2 bases need the macroscopic coefficient");
  const int ne = mesh.num_elements();
  BasisLibrary lib;
  if (options.type1) lib.type1.resize(static_cast<std::size_t>(ne));
  if (options.type2) lib.type2.resize(static_cast<std::size_t>(ne));
  parallel_for(ne, options.threads, [&](int e) {
    const Patch patch = oversample_patch(mesh, e, options.m);
    const bool bilinear = options.exterior == ExteriorData::bilinear ||
                          (options.exterior == ExteriorData::automatic && zero_data_degenerate(mesh, patch));
    auto phi = std::make_shared<const IntermediateBases>(
        intermediate_bases(mesh, patch, fine_coeffs, options.solve, bilinear));
    if (options.type1) lib.type1[static_cast<std::size_t>(e)] = type1_basis(mesh, patch, phi, bilinear);
    if (options.type2) {
      auto phi_bar = std::make_shared<const IntermediateBases>(
          intermediate_bases(mesh, patch, *macro_coeffs, options.solve, bilinear));
      lib.type2[static_cast<std::size_t>(e)] = type2_basis(mesh, patch, phi, std::move(phi_bar), bilinear);
    }
  });
  return lib;
}

ElementwiseFineFunction realize(const TwoScaleMesh& mesh, const std::vector<PatchBasisSet>& sets,
                                const std::vector<double>& coefficients) {
  check_sets(mesh, sets);
  if (coefficients.size() != static_cast<std::size_t>(mesh.num_interior_nodes()))
    throw InvalidArgument("expected " + std::to_string(mesh.num_interior_nodes()) + " coarse coefficients, got " +
                          std::to_string(coefficients.size()));
  ElementwiseFineFunction out(mesh);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto& piece = out.pieces[static_cast<std::size_t>(e)];
    const PatchBasisSet& set = sets[static_cast<std::size_t>(e)];
    for (int p = 0; p < 4; ++p) {
      const int node = corner_node(mesh, e, p);
      if (node < 0 || !set.active[static_cast<std::size_t>(p)]) continue;
      const double c = coefficients[static_cast<std::size_t>(node)];
      const auto& v = set.on_element[static_cast<std::size_t>(p)];
      for (std::size_t k = 0; k < piece.size(); ++k) piece[k] += c * v[k];
    }
  }
  return out;
}

FineFunction local_approximator(const PatchBasisSet& set, const FineFunction& u0) {
  std::array<double, 4> c{};
  for (std::size_t j = 0; j < 4; ++j) c[j] = u0.at_global(set.patch.corners[j]);
  return combine(*set.phi, c);
}

InterpolantResult global_interpolant(const TwoScaleMesh& mesh, const std::vector<PatchBasisSet>& sets,
                                     const FineFunction& u0) {
  check_sets(mesh, sets);
  check_global(mesh, u0, "u0");
  InterpolantResult out;
  out.u_hat = ElementwiseFineFunction(mesh);
  const int nn = mesh.num_interior_nodes();
  std::vector<double> sum(static_cast<std::size_t>(nn), 0.0);
  out.node_multiplicity.assign(static_cast<std::size_t>(nn), 0);

  for (int e = 0; e < mesh.num_elements(); ++e) {
    const PatchBasisSet& set = sets[static_cast<std::size_t>(e)];
    const FineFunction uhat = local_approximator(set, u0);
    out.u_hat.pieces[static_cast<std::size_t>(e)] = restrict_to_element(mesh, e, uhat);
    const auto corners = mesh.element_corners(e);
    for (int q = 0; q < 4; ++q) {
      const int node = corner_node(mesh, e, q);
      if (node < 0) continue;
      const LatticeIndex x = corners[static_cast<std::size_t>(q)];
      double v = 0.0;
      if (set.type == BasisType::type1) {
        v = uhat.at_global(x);
      } else {
        for (std::size_t j = 0; j < 4; ++j) v += u0.at_global(set.patch.corners[j]) * (*set.phi_bar)[j].at_global(x);
      }
      sum[static_cast<std::size_t>(node)] += v;
      ++out.node_multiplicity[static_cast<std::size_t>(node)];
    }
  }
  for (int k = 0; k < nn; ++k) sum[static_cast<std::size_t>(k)] /= out.node_multiplicity[static_cast<std::size_t>(k)];

  out.w.type = sets.front().type;
  out.w.m = sets.front().patch.m;
  out.w.realization = realize(mesh, sets, sum);
  out.w.coefficients = std::move(sum);
  return out;
}

std::vector<double> coarse_hat_on_element(const TwoScaleMesh& mesh, int element, int corner) {
  if (corner < 0 || corner > 3) throw InvalidArgument("element corner must be 0..3, got " + std::to_string(corner));
  const Lattice lat = element_lattice(mesh, element);
  const double r = mesh.refine();
  std::vector<double> out(static_cast<std::size_t>(lat.num_nodes()));
  for (int j = 0; j <= lat.ny; ++j) {
    for (int i = 0; i <= lat.nx; ++i) {
      const double s = i / r, t = j / r;
      double v = 0.0;
      switch (corner) {
        case 0: v = (1.0 - s) * (1.0 - t); break;
        case 1: v = s * (1.0 - t); break;
        case 2: v = s * t; break;
        default: v = (1.0 - s) * t; break;
      }
      out[static_cast<std::size_t>(lat.node(i, j))] = v;
    }
  }
  return out;
}

CoarseSolveResult assemble_petrov_galerkin(const TwoScaleMesh& mesh, const std::vector<PatchBasisSet>& sets,
                                           const CellCoefficients& coeffs, const SourceFn& f) {
  check_sets(mesh, sets);
  CoarseSolveResult out = coarse_solve(mesh, coeffs, f, [&](int e, int p) -> const std::vector<double>* {
    const PatchBasisSet& set = sets[static_cast<std::size_t>(e)];
    if (!set.active[static_cast<std::size_t>(p)]) return nullptr;
    return &set.on_element[static_cast<std::size_t>(p)];
  });
  out.solution.type = sets.front().type;
  out.solution.m = sets.front().patch.m;
  out.solution.realization = realize(mesh, sets, out.solution.coefficients);
  return out;
}

CoarseSolveResult solve_standard_q1(const TwoScaleMesh& mesh, const CellCoefficients& coeffs, const SourceFn& f) {
  std::array<std::vector<double>, 4> hats;
  for (int q = 0; q < 4; ++q) hats[static_cast<std::size_t>(q)] = coarse_hat_on_element(mesh, 0, q);
  CoarseSolveResult out =
      coarse_solve(mesh, coeffs, f, [&](int, int p) { return &hats[static_cast<std::size_t>(p)]; });
  out.solution.realization = ElementwiseFineFunction(mesh);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto& piece = out.solution.realization.pieces[static_cast<std::size_t>(e)];
    for (int p = 0; p < 4; ++p) {
      const int node = corner_node(mesh, e, p);
      if (node < 0) continue;
      const double c = out.solution.coefficients[static_cast<std::size_t>(node)];
      const auto& v = hats[static_cast<std::size_t>(p)];
      for (std::size_t k = 0; k < piece.size(); ++k) piece[k] += c * v[k];
    }
  }
  return out;
}

BestApproximation best_approximation(const TwoScaleMesh& mesh, const std::vector<PatchBasisSet>& sets,
                                     const CellCoefficients& coeffs, const FineFunction& u_ref) {
  check_sets(mesh, sets);
  check_global(mesh, u_ref, "reference solution");
  const int n = mesh.num_interior_nodes();
  if (n > kDenseCap) throw InvalidArgument("best-approximation system too large: " + std::to_string(n));
  DenseMatrix g(n, n);
  std::vector<double> r(static_cast<std::size_t>(n), 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const PatchBasisSet& set = sets[static_cast<std::size_t>(e)];
    const CsrMatrix ke = element_stiffness(mesh, e, coeffs);
    const std::vector<double> ku = multiply(ke, restrict_to_element(mesh, e, u_ref));
    std::array<std::vector<double>, 4> kphi;
    std::array<int, 4> node{};
    for (int p = 0; p < 4; ++p) {
      node[static_cast<std::size_t>(p)] = set.active[static_cast<std::size_t>(p)] ? corner_node(mesh, e, p) : -1;
      if (node[static_cast<std::size_t>(p)] < 0) continue;
      kphi[static_cast<std::size_t>(p)] = multiply(ke, set.on_element[static_cast<std::size_t>(p)]);
      r[static_cast<std::size_t>(node[static_cast<std::size_t>(p)])] +=
          dot(ku, set.on_element[static_cast<std::size_t>(p)]);
    }
    for (int p = 0; p < 4; ++p) {
      if (node[static_cast<std::size_t>(p)] < 0) continue;
      for (int q = 0; q < 4; ++q) {
        if (node[static_cast<std::size_t>(q)] < 0) continue;
        g(node[static_cast<std::size_t>(q)], node[static_cast<std::size_t>(p)]) +=
            dot(set.on_element[static_cast<std::size_t>(q)], kphi[static_cast<std::size_t>(p)]);
      }
    }
  }
  // Average with the transpose to remove rounding asymmetry.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g(i, j) = g(j, i) = 0.5 * (g(i, j) + g(j, i));

  BestApproximation out;
  DenseSolveResult s = solve_dense_spd(g, r);
  out.coefficients = std::move(s.x);
  out.rcond = s.rcond;
  out.realization = realize(mesh, sets, out.coefficients);
  out.error = broken_energy_error(mesh, coeffs, u_ref, out.realization);
  return out;
}

double max_basis_energy(const TwoScaleMesh& mesh, const std::vector<PatchBasisSet>& sets,
                        const CellCoefficients& coeffs) {
  check_sets(mesh, sets);
  double worst = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const PatchBasisSet& set = sets[static_cast<std::size_t>(e)];
    for (int p = 0; p < 4; ++p) {
      if (!set.active[static_cast<std::size_t>(p)]) continue;
      worst = std::max(worst, energy_norm(element_lattice(mesh, e), coeffs, set.on_element[static_cast<std::size_t>(p)]));
    }
  }
  return worst;
}

double partition_of_unity_deviation(const std::vector<PatchBasisSet>& sets) {
  double worst = 0.0;
  for (const PatchBasisSet& set : sets) {
    if (set.patch.touches_domain_boundary() && !set.bilinear_exterior) continue;
    const IntermediateBases& phi = *set.phi;
    for (std::size_t k = 0; k < phi[0].values.size(); ++k) {
      const double s = phi[0].values[k] + phi[1].values[k] + phi[2].values[k] + phi[3].values[k];
      worst = std::max(worst, std::abs(s - 1.0));
    }
  }
  return worst;
}

}  // namespace msfem
