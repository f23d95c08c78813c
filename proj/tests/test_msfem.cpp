#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "msfem/error.hpp"
#include "msfem/homogenize.hpp"
#include "msfem/metrics.hpp"
#include "msfem/msfem.hpp"

using namespace msfem;

namespace {

/// psi_j of the patch rectangle from first principles.
double psi(const TwoScaleMesh& mesh, const Patch& p, int j, int gi, int gj) {
  const double x0 = p.cells.i_lo, x1 = p.cells.i_hi + 1.0;
  const double y0 = p.cells.j_lo, y1 = p.cells.j_hi + 1.0;
  const double s = (gi - x0) / (x1 - x0), t = (gj - y0) / (y1 - y0);
  (void)mesh;
  switch (j) {
    case 0: return (1 - s) * (1 - t);
    case 1: return s * (1 - t);
    case 2: return s * t;
    default: return (1 - s) * t;
  }
}

FineFunction global_function(const TwoScaleMesh& mesh, double (*fn)(double, double)) {
  FineFunction u(Lattice::whole(mesh));
  for (int j = 0; j <= mesh.n_fine(); ++j)
    for (int i = 0; i <= mesh.n_fine(); ++i)
      u.values[static_cast<std::size_t>(mesh.fine_node_id(i, j))] = fn(i * mesh.h(), j * mesh.h());
  return u;
}

/// Coarse bilinear hat of interior coarse node (ci, cj), sampled on the fine grid.
FineFunction coarse_hat(const TwoScaleMesh& mesh, int ci, int cj) {
  FineFunction u(Lattice::whole(mesh));
  for (int j = 0; j <= mesh.n_fine(); ++j)
    for (int i = 0; i <= mesh.n_fine(); ++i) {
      const double a = 1.0 - std::abs(static_cast<double>(i) / mesh.refine() - ci);
      const double b = 1.0 - std::abs(static_cast<double>(j) / mesh.refine() - cj);
      u.values[static_cast<std::size_t>(mesh.fine_node_id(i, j))] = std::max(0.0, a) * std::max(0.0, b);
    }
  return u;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double max_diff(const ElementwiseFineFunction& a, const ElementwiseFineFunction& b) {
  double m = 0.0;
  for (std::size_t e = 0; e < a.pieces.size(); ++e) m = std::max(m, max_diff(a.pieces[e], b.pieces[e]));
  return m;
}

CellCoefficients identity_coeffs(const TwoScaleMesh& mesh) {
  return eval_cellwise(make_constant(Tensor2::identity()), mesh);
}

}  // namespace

TEST_CASE("intermediate bases for a constant coefficient are the patch bilinears") {
  const TwoScaleMesh mesh(4, 8);
  const CellCoefficients coeffs = eval_cellwise(make_constant(Tensor2::isotropic(2.0)), mesh);
  const Patch p = oversample_patch(mesh, mesh.element_id(1, 2), 2);
  for (LocalSolver solver : {LocalSolver::direct, LocalSolver::cg}) {
    LocalSolveOptions o;
    o.solver = solver;
    o.cg_tol = 1e-13;
    const IntermediateBases phi = intermediate_bases(mesh, p, coeffs, o);
    const Lattice& lat = phi[0].lattice;
    for (int j = 0; j < 4; ++j)
      for (int y = 0; y <= lat.ny; ++y)
        for (int x = 0; x <= lat.nx; ++x) {
          CHECK(std::abs(phi[static_cast<std::size_t>(j)].at(x, y) - psi(mesh, p, j, lat.i0 + x, lat.j0 + y)) <= 1e-10);
          CHECK(patch_bilinear(p, j, {lat.i0 + x, lat.j0 + y}) ==
                doctest::Approx(psi(mesh, p, j, lat.i0 + x, lat.j0 + y)).epsilon(1e-14));
        }
    // Nearest K corner to patch corner 0 sits 2 fine cells in along each axis.
    CHECK(phi[0].at_global(mesh.element_corners(p.owner)[0]) == doctest::Approx(25.0 / 36.0).epsilon(1e-10));
  }
}

TEST_CASE("intermediate bases sum to one on interior patches") {
  const TwoScaleMesh mesh(4, 8);
  const CellCoefficients coeffs = eval_cellwise(make_oscillatory(1.0 / 16.0), mesh);
  const Patch p = oversample_patch(mesh, mesh.element_id(1, 1), 3);
  REQUIRE_FALSE(p.touches_domain_boundary());
  const IntermediateBases phi = intermediate_bases(mesh, p, coeffs);
  double worst = 0.0;
  for (std::size_t k = 0; k < phi[0].values.size(); ++k)
    worst = std::max(worst, std::abs(phi[0].values[k] + phi[1].values[k] + phi[2].values[k] + phi[3].values[k] - 1.0));
  CHECK(worst <= 1e-9);
}

TEST_CASE("exterior data on the domain boundary") {
  const TwoScaleMesh mesh(4, 4);
  const CellCoefficients coeffs = eval_cellwise(make_oscillatory(1.0 / 8.0), mesh);
  const Patch p = oversample_patch(mesh, mesh.element_id(0, 1), 2);
  REQUIRE(p.touches_domain_boundary());
  const IntermediateBases zero = intermediate_bases(mesh, p, coeffs, {}, false);
  const IntermediateBases bil = intermediate_bases(mesh, p, coeffs, {}, true);
  for (int j = 0; j < 4; ++j) {
    for (int id : p.exterior_boundary) {
      const LatticeIndex g = mesh.fine_node(id);
      CHECK(zero[static_cast<std::size_t>(j)].at_global(g) == 0.0);
      CHECK(bil[static_cast<std::size_t>(j)].at_global(g) == doctest::Approx(psi(mesh, p, j, g.i, g.j)).epsilon(1e-15));
    }
    for (int id : p.interior_boundary) {
      const LatticeIndex g = mesh.fine_node(id);
      CHECK(zero[static_cast<std::size_t>(j)].at_global(g) == doctest::Approx(psi(mesh, p, j, g.i, g.j)).epsilon(1e-15));
    }
  }
  const auto act = active_corners(mesh, p.owner);
  CHECK_FALSE(act[0]);
  CHECK(act[1]);
  CHECK(act[2]);
  CHECK_FALSE(act[3]);
}

TEST_CASE("zero exterior data degeneracy at domain corners") {
  const TwoScaleMesh mesh(8, 8);
  // Full oversampling from an element next to a corner of D: the patch
  // corner is the domain corner while the element corner is interior.
  CHECK(zero_data_degenerate(mesh, oversample_patch(mesh, mesh.element_id(1, 1), 8)));
  CHECK_FALSE(zero_data_degenerate(mesh, oversample_patch(mesh, mesh.element_id(0, 0), 8)));
  CHECK_FALSE(zero_data_degenerate(mesh, oversample_patch(mesh, mesh.element_id(1, 1), 2)));
  CHECK_FALSE(zero_data_degenerate(mesh, oversample_patch(mesh, mesh.element_id(3, 3), 8)));

  const CellCoefficients coeffs = identity_coeffs(mesh);
  const Patch p = oversample_patch(mesh, mesh.element_id(1, 1), 8);
  auto phi = std::make_shared<const IntermediateBases>(intermediate_bases(mesh, p, coeffs, {}, false));
  CHECK_THROWS_AS(type1_basis(mesh, p, phi, false), SingularMatrixError);
  auto phib = std::make_shared<const IntermediateBases>(intermediate_bases(mesh, p, coeffs, {}, true));
  CHECK_NOTHROW(type1_basis(mesh, p, phib, true));
}

TEST_CASE("Lagrange matrix for a constant coefficient") {
  const TwoScaleMesh mesh(4, 8);
  const CellCoefficients coeffs = identity_coeffs(mesh);
  const Patch p = oversample_patch(mesh, mesh.element_id(1, 1), 2);
  auto phi = std::make_shared<const IntermediateBases>(intermediate_bases(mesh, p, coeffs));
  const PatchBasisSet set = type1_basis(mesh, p, phi);
  const auto corners = mesh.element_corners(p.owner);
  for (int q = 0; q < 4; ++q)
    for (int j = 0; j < 4; ++j) {
      const LatticeIndex g = corners[static_cast<std::size_t>(q)];
      CHECK(set.lagrange(q, j) == doctest::Approx(psi(mesh, p, j, g.i, g.j)).epsilon(1e-10));
    }
  CHECK(set.lagrange(0, 0) == doctest::Approx(25.0 / 36.0));
  CHECK(set.lagrange(0, 1) == doctest::Approx(20.0 / 144.0).epsilon(1e-10));
  CHECK(set.lagrange(0, 2) == doctest::Approx(4.0 / 144.0));
  CHECK(set.rcond > kMinLagrangeRcond);
}

TEST_CASE("Type-1 bases for a constant coefficient are coarse hats") {
  const TwoScaleMesh mesh(4, 8);
  const CellCoefficients coeffs = identity_coeffs(mesh);
  for (ExteriorData ext : {ExteriorData::zero, ExteriorData::bilinear, ExteriorData::automatic}) {
    BasisBuildOptions o;
    o.m = 2;
    o.exterior = ext;
    const BasisLibrary lib = build_basis_library(mesh, coeffs, nullptr, o);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const PatchBasisSet& s = lib.type1[static_cast<std::size_t>(e)];
      for (int p = 0; p < 4; ++p) {
        if (!s.active[static_cast<std::size_t>(p)]) continue;
        CHECK(max_diff(s.on_element[static_cast<std::size_t>(p)], coarse_hat_on_element(mesh, e, p)) <= 1e-9);
      }
      CHECK(lagrange_deviation(mesh, s) <= 1e-9);
    }
  }
}

TEST_CASE("Type-1 bases for an oscillatory coefficient") {
  const TwoScaleMesh mesh(4, 16);
  const CellCoefficients coeffs = eval_cellwise(make_oscillatory(1.0 / 16.0), mesh);
  BasisBuildOptions o;
  o.m = 4;
  const BasisLibrary lib = build_basis_library(mesh, coeffs, nullptr, o);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const PatchBasisSet& s = lib.type1[static_cast<std::size_t>(e)];
    CHECK(lagrange_deviation(mesh, s) <= 1e-9);
    if (s.patch.touches_domain_boundary()) continue;
    // The four bases sum to one on K.
    std::vector<double> sum(s.on_element[0].size(), 0.0);
    for (int p = 0; p < 4; ++p)
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += s.on_element[static_cast<std::size_t>(p)][k];
    for (double v : sum) CHECK(std::abs(v - 1.0) <= 1e-8);
    // The patch-wide basis restricts to the stored element values.
    CHECK(max_diff(restrict_to_element(mesh, e, s.basis(1)), s.on_element[1]) == 0.0);
  }
  CHECK(partition_of_unity_deviation(lib.type1) <= 1e-9);
  CHECK(max_basis_energy(mesh, lib.type1, coeffs) > 0.0);
}

TEST_CASE("Type-2 coincides with Type-1 when the coefficient is already homogeneous") {
  const TwoScaleMesh mesh(4, 8);
  const CellCoefficients coeffs = eval_cellwise(make_constant(Tensor2{2.0, 0.3, 1.0}), mesh);
  BasisBuildOptions o;
  o.m = 3;
  o.type2 = true;
  const BasisLibrary lib = build_basis_library(mesh, coeffs, &coeffs, o);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int p = 0; p < 4; ++p)
      CHECK(max_diff(lib.type1[static_cast<std::size_t>(e)].on_element[static_cast<std::size_t>(p)],
                     lib.type2[static_cast<std::size_t>(e)].on_element[static_cast<std::size_t>(p)]) == 0.0);
}

TEST_CASE("Type-2 macroscopic Lagrange property against an independent solve") {
  const double eps = 1.0 / 16.0;
  const TwoScaleMesh mesh(4, 16);
  const CoefficientField field = make_oscillatory(eps);
  const CellCoefficients coeffs = eval_cellwise(field, mesh);
  const EffectiveField kbar = effective_field(field, mesh, 64);
  const CellCoefficients macro = kbar.realize(mesh);
  BasisBuildOptions o;
  o.m = 4;
  o.type2 = true;
  const BasisLibrary lib = build_basis_library(mesh, coeffs, &macro, o);
  double nodal_dev = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const PatchBasisSet& s = lib.type2[static_cast<std::size_t>(e)];
    CHECK(lagrange_deviation(mesh, s) <= 1e-9);
    const IntermediateBases phib = intermediate_bases(mesh, s.patch, macro, {}, s.bilinear_exterior);
    const auto corners = mesh.element_corners(e);
    for (int p = 0; p < 4; ++p) {
      if (!s.active[static_cast<std::size_t>(p)]) continue;
      for (int q = 0; q < 4; ++q) {
        if (!s.active[static_cast<std::size_t>(q)]) continue;
        double v = 0.0;
        for (int j = 0; j < 4; ++j)
          v += s.c[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)] *
               phib[static_cast<std::size_t>(j)].at_global(corners[static_cast<std::size_t>(q)]);
        CHECK(std::abs(v - (p == q ? 1.0 : 0.0)) <= 1e-9);
        const double direct = s.basis(p).at_global(corners[static_cast<std::size_t>(q)]);
        nodal_dev = std::max(nodal_dev, std::abs(direct - (p == q ? 1.0 : 0.0)));
      }
    }
  }
  // Type-2 bases themselves are not nodal for an oscillatory coefficient.
  CHECK(nodal_dev > 1e-3);
}

TEST_CASE("local approximator") {
  const TwoScaleMesh mesh(4, 8);
  const CellCoefficients coeffs = identity_coeffs(mesh);
  BasisBuildOptions o;
  o.m = 2;
  const BasisLibrary lib = build_basis_library(mesh, coeffs, nullptr, o);
  const FineFunction affine = global_function(mesh, [](double x, double y) { return 0.2 + 1.5 * x - 0.7 * y; });
  const FineFunction zero = global_function(mesh, [](double, double) { return 0.0; });
  const FineFunction one = global_function(mesh, [](double, double) { return 1.0; });
  for (const PatchBasisSet& s : lib.type1) {
    const FineFunction u_hat = local_approximator(s, affine);
    for (int y = 0; y <= u_hat.lattice.ny; ++y)
      for (int x = 0; x <= u_hat.lattice.nx; ++x) {
        const LatticeIndex g{u_hat.lattice.i0 + x, u_hat.lattice.j0 + y};
        CHECK(std::abs(u_hat.at(x, y) - affine.at_global(g)) <= 1e-10);
      }
    for (double v : local_approximator(s, zero).values) CHECK(v == 0.0);
    for (double v : local_approximator(s, one).values) CHECK(std::abs(v - 1.0) <= 1e-10);
  }
}

TEST_CASE("global interpolant") {
  SUBCASE("constant coefficient reproduces affine data on interior elements") {
    const TwoScaleMesh mesh(4, 8);
    const CellCoefficients coeffs = identity_coeffs(mesh);
    BasisBuildOptions o;
    o.m = 2;
    o.type2 = true;
    const BasisLibrary lib = build_basis_library(mesh, coeffs, &coeffs, o);
    const FineFunction u0 = global_function(mesh, [](double x, double y) { return 0.2 + 1.5 * x - 0.7 * y; });
    for (BasisType t : {BasisType::type1, BasisType::type2}) {
      const InterpolantResult r = global_interpolant(mesh, lib.of(t), u0);
      for (int d : r.node_multiplicity) CHECK(d == 4);
      const ElementwiseFineFunction ref = restrict_to_elements(mesh, u0);
      // The space vanishes on dD, so affine data is reproduced away from it.
      for (int e = 0; e < mesh.num_elements(); ++e) {
        const LatticeIndex k = mesh.element_index(e);
        if (k.i == 0 || k.j == 0 || k.i == 3 || k.j == 3) continue;
        CHECK(max_diff(r.w.realization.pieces[static_cast<std::size_t>(e)], ref.pieces[static_cast<std::size_t>(e)]) <= 1e-9);
      }
      CHECK(interface_jump_max(mesh, r.w.realization).max <= 1e-12);
      CHECK(max_diff(r.u_hat, ref) <= 1e-10);
    }
  }
  SUBCASE("patch corners on the boundary see only zero data") {
    const TwoScaleMesh mesh(2, 4);
    const CellCoefficients coeffs = identity_coeffs(mesh);
    BasisBuildOptions o;
    o.m = 4;
    const BasisLibrary lib = build_basis_library(mesh, coeffs, nullptr, o);
    const FineFunction hat = coarse_hat(mesh, 1, 1);
    const InterpolantResult r = global_interpolant(mesh, lib.type1, hat);
    REQUIRE(r.w.coefficients.size() == 1u);
    CHECK(r.node_multiplicity[0] == 4);
    // Every patch is all of D, whose corners carry zero hat values.
    CHECK(std::abs(r.w.coefficients[0]) <= 1e-14);
    CHECK(max_diff(r.w.realization, ElementwiseFineFunction(mesh, 0.0)) <= 1e-14);
  }
  SUBCASE("single interior node averages four patch values") {
    const TwoScaleMesh mesh(2, 8);
    const CellCoefficients coeffs = eval_cellwise(make_oscillatory(1.0 / 8.0), mesh);
    BasisBuildOptions o;
    o.m = 3;
    const BasisLibrary lib = build_basis_library(mesh, coeffs, nullptr, o);
    const FineFunction u0 = global_function(mesh, [](double x, double y) { return std::sin(3 * x) + y * y; });
    const InterpolantResult r = global_interpolant(mesh, lib.type1, u0);
    double avg = 0.0;
    for (int e = 0; e < 4; ++e) avg += r.u_hat.value(mesh, e, {8, 8}) / 4.0;
    CHECK(r.w.coefficients[0] == doctest::Approx(avg).epsilon(1e-14));
  }
}

TEST_CASE("Petrov-Galerkin degenerates to coarse Q1 for a constant coefficient") {
  const TwoScaleMesh mesh(4, 8);
  const CellCoefficients coeffs = identity_coeffs(mesh);
  const SourceFn f = [](Point p) { return 1.0 + p.x; };
  BasisBuildOptions o;
  o.m = 2;
  const BasisLibrary lib = build_basis_library(mesh, coeffs, nullptr, o);
  const CoarseSolveResult pg = assemble_petrov_galerkin(mesh, lib.type1, coeffs, f);
  const CoarseSolveResult q1 = solve_standard_q1(mesh, coeffs, f);
  CHECK(max_diff(pg.solution.coefficients, q1.solution.coefficients) <= 1e-12);
  CHECK(max_diff(pg.solution.realization, q1.solution.realization) <= 1e-12);
  CHECK(pg.rcond > 0.0);

  // Coarse Q1 for -Laplace on 4x4 with f = 1: 5-point-like 9-point system,
  // centre value checked against a hand-assembled dense solve.
  const CoarseSolveResult c1 = solve_standard_q1(mesh, coeffs, [](Point) { return 1.0; });
  DenseMatrix a(9, 9);
  std::vector<double> b(9, 1.0 / 16.0);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) {
      const int dx = std::abs(r % 3 - c % 3), dy = std::abs(r / 3 - c / 3);
      a(r, c) = dx == 0 && dy == 0 ? 8.0 / 3.0 : (dx <= 1 && dy <= 1 ? -1.0 / 3.0 : 0.0);
    }
  const auto x = solve_dense(a, b).x;
  CHECK(max_diff(c1.solution.coefficients, x) <= 1e-12);

  const CoarseSolveResult z = assemble_petrov_galerkin(mesh, lib.type1, coeffs, [](Point) { return 0.0; });
  for (double v : z.solution.coefficients) CHECK(v == 0.0);
}

TEST_CASE("best approximation") {
  const TwoScaleMesh mesh(4, 8);
  const CellCoefficients coeffs = identity_coeffs(mesh);
  BasisBuildOptions o;
  o.m = 2;
  const BasisLibrary lib = build_basis_library(mesh, coeffs, nullptr, o);

  SUBCASE("a coarse hat is recovered") {
    const FineFunction hat = coarse_hat(mesh, 2, 1);
    const BestApproximation ba = best_approximation(mesh, lib.type1, coeffs, hat);
    const int k = mesh.interior_node_index(2, 1);
    for (int i = 0; i < mesh.num_interior_nodes(); ++i)
      CHECK(std::abs(ba.coefficients[static_cast<std::size_t>(i)] - (i == k ? 1.0 : 0.0)) <= 1e-10);
    CHECK(ba.error <= 1e-8);
  }
  SUBCASE("functions in the span are reproduced") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FineFunction v(Lattice::whole(mesh));
    for (const LatticeIndex& n : mesh.interior_nodes()) {
      const double c = u(rng);
      const FineFunction h = coarse_hat(mesh, n.i, n.j);
      for (std::size_t k = 0; k < v.values.size(); ++k) v.values[k] += c * h.values[k];
    }
    CHECK(best_approximation(mesh, lib.type1, coeffs, v).error <= 1e-8);
  }
}

TEST_CASE("best approximation dominates the interpolant and Petrov-Galerkin") {
  const double eps = 1.0 / 16.0;
  const TwoScaleMesh mesh(4, 16);
  const CoefficientField field = make_oscillatory(eps);
  const CellCoefficients coeffs = eval_cellwise(field, mesh);
  const EffectiveField kbar = effective_field(field, mesh, 32);
  const CellCoefficients macro = kbar.realize(mesh);
  const SourceFn f = [](Point) { return 1.0; };
  const FineSolve ue = solve_dirichlet_zero(Lattice::whole(mesh), coeffs, f, 1e-12);
  const FineSolve u0 = solve_homogenized(mesh, kbar, f, 1e-12);
  for (int m : {2, 16}) {
    BasisBuildOptions o;
    o.m = m;
    o.type2 = true;
    const BasisLibrary lib = build_basis_library(mesh, coeffs, &macro, o);
    for (BasisType t : {BasisType::type1, BasisType::type2}) {
      const BestApproximation ba = best_approximation(mesh, lib.of(t), coeffs, ue.u);
      const double interp = broken_energy_error(mesh, coeffs, ue.u, global_interpolant(mesh, lib.of(t), u0.u).w.realization);
      const double pg = broken_energy_error(mesh, coeffs, ue.u, assemble_petrov_galerkin(mesh, lib.of(t), coeffs, f).solution.realization);
      CHECK(ba.error <= interp * (1 + 1e-12));
      CHECK(ba.error <= pg * (1 + 1e-12));
      CHECK(ba.error == doctest::Approx(broken_energy_error(mesh, coeffs, ue.u, ba.realization)).epsilon(1e-12));
    }
  }
}

TEST_CASE("realize is linear in the coefficients") {
  const TwoScaleMesh mesh(3, 8);
  const CellCoefficients coeffs = eval_cellwise(make_oscillatory(1.0 / 8.0), mesh);
  BasisBuildOptions o;
  o.m = 2;
  const BasisLibrary lib = build_basis_library(mesh, coeffs, nullptr, o);
  const std::vector<double> a{1.0, 2.0, -1.0, 0.5}, b{0.0, 1.0, 3.0, -2.0};
  std::vector<double> s(4);
  for (std::size_t k = 0; k < 4; ++k) s[k] = 2.0 * a[k] - b[k];
  const auto ra = realize(mesh, lib.type1, a), rb = realize(mesh, lib.type1, b), rs = realize(mesh, lib.type1, s);
  for (std::size_t e = 0; e < rs.pieces.size(); ++e)
    for (std::size_t k = 0; k < rs.pieces[e].size(); ++k)
      CHECK(rs.pieces[e][k] == doctest::Approx(2.0 * ra.pieces[e][k] - rb.pieces[e][k]).epsilon(1e-12).scale(1.0));
  CHECK_THROWS_AS(realize(mesh, lib.type1, std::vector<double>(3, 0.0)), InvalidArgument);
}
