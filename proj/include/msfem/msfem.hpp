#pragma once

// Multiscale bases with oversampling, the constructive interpolants, the
// Petrov-Galerkin scheme and broken-energy best approximation.

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "msfem/coeff.hpp"
#include "msfem/elementwise.hpp"
#include "msfem/fem_kernel.hpp"
#include "msfem/mesh2s.hpp"

namespace msfem {

enum class BasisType { type1, type2 };
std::string to_string(BasisType type);

enum class LocalSolver { cg, direct };
std::string to_string(LocalSolver solver);

struct LocalSolveOptions {
  LocalSolver solver = LocalSolver::direct;
  double cg_tol = 1e-10;
};

/// Dirichlet data of the intermediate bases on Gamma = dK^m cap dD.
///  zero:      Phi = 0 on Gamma (H^1_{Gamma,0}); Lagrange conditions only at
///             K corners off dD.
///  bilinear:  Phi = psi on all of dK^m; Lagrange conditions at all four
///             corners, so bases of interior nodes vanish on dD.
///  automatic: zero, except on patches where it degenerates (a corner of D
///             is a patch corner whose K corner lies inside D, so that Phi
///             vanishes identically there); those use bilinear.
enum class ExteriorData { zero, bilinear, automatic };
std::string to_string(ExteriorData data);

/// True when the zero exterior data leaves fewer nonzero Phi than Lagrange conditions.
bool zero_data_degenerate(const TwoScaleMesh& mesh, const Patch& patch);

/// Lagrange matrices with reciprocal condition below this are rejected.
inline constexpr double kMinLagrangeRcond = 1e-10;

/// The bilinear function on the patch rectangle equal to 1 at corner
/// x_{K^m,corner} and 0 at the other three, evaluated at a fine node.
double patch_bilinear(const Patch& patch, int corner, const LatticeIndex& node);

/// Phi_{K,i}: L Phi = 0 in K^m, Phi = psi_{K^m,i} on gamma, Phi = 0 on Gamma.
using IntermediateBases = std::array<FineFunction, 4>;

/// `bilinear_exterior` selects Phi = psi instead of 0 on Gamma.
IntermediateBases intermediate_bases(const TwoScaleMesh& mesh, const Patch& patch, const CellCoefficients& coeffs,
                                     const LocalSolveOptions& options = {}, bool bilinear_exterior = false);

/// Corners of K that are not on dD. With zero exterior data Lagrange
/// conditions are imposed there only, using the intermediate bases carrying
/// the same corner labels.
std::array<bool, 4> active_corners(const TwoScaleMesh& mesh, int element);

struct PatchBasisSet {
  Patch patch;
  BasisType type = BasisType::type1;
  std::shared_ptr<const IntermediateBases> phi;
  /// Macroscopic components Phi_bar (Type-2 only).
  std::shared_ptr<const IntermediateBases> phi_bar;
  /// Whether Phi carries psi (rather than 0) on Gamma.
  bool bilinear_exterior = false;
  std::array<bool, 4> active{};
  /// (q, j) -> Phi_j(x_{K,q}) for Type-1, Phi_bar_j(x_{K,q}) for Type-2.
  DenseMatrix lagrange{4, 4};
  /// phi_{K,p} = sum_j c[p][j] Phi_j; rows of inactive p are zero.
  std::array<std::array<double, 4>, 4> c{};
  double rcond = 0.0;
  /// phi_{K,p} restricted to K, (refine+1)^2 nodal values; empty if inactive.
  std::array<std::vector<double>, 4> on_element;

  int owner() const { return patch.owner; }
  /// phi_{K,p} over the whole patch.
  FineFunction basis(int p) const;
  /// Macroscopic component sum_j c[p][j] Phi_bar_j over the whole patch (Type-2).
  FineFunction macroscopic_basis(int p) const;
};

/// `bilinear_exterior` must match the data Phi (and Phi_bar) were built with.
PatchBasisSet type1_basis(const TwoScaleMesh& mesh, const Patch& patch,
                          std::shared_ptr<const IntermediateBases> phi, bool bilinear_exterior = false);
PatchBasisSet type2_basis(const TwoScaleMesh& mesh, const Patch& patch, std::shared_ptr<const IntermediateBases> phi,
                          std::shared_ptr<const IntermediateBases> phi_bar, bool bilinear_exterior = false);

/// Max over p, q active of |value_q(basis p) - delta_pq|; uses Phi for Type-1
/// and Phi_bar for Type-2.
double lagrange_deviation(const TwoScaleMesh& mesh, const PatchBasisSet& set);

struct BasisBuildOptions {
  int m = 1;
  bool type1 = true;
  bool type2 = false;
  LocalSolveOptions solve;
  ExteriorData exterior = ExteriorData::bilinear;
  /// Worker threads for the per-patch loop; 0 picks the hardware count.
  int threads = 0;
};

/// Basis sets for every coarse element, indexed by element id. Phi is solved
/// once per patch and shared by both types; Phi_bar only when Type-2 is asked.
struct BasisLibrary {
  std::vector<PatchBasisSet> type1;
  std::vector<PatchBasisSet> type2;

  const std::vector<PatchBasisSet>& of(BasisType t) const { return t == BasisType::type1 ? type1 : type2; }
};

BasisLibrary build_basis_library(const TwoScaleMesh& mesh, const CellCoefficients& fine_coeffs,
                                 const CellCoefficients* macro_coeffs, const BasisBuildOptions& options);

/// Coarse-node coefficients over J_H and their elementwise realization.
struct MultiscaleSolution {
  std::vector<double> coefficients;
  ElementwiseFineFunction realization;
  BasisType type = BasisType::type1;
  int m = 0;
};

/// sum_i coeff_i phi_i realized on every element.
ElementwiseFineFunction realize(const TwoScaleMesh& mesh, const std::vector<PatchBasisSet>& sets,
                                const std::vector<double>& coefficients);

/// u_hat_{K^m} = sum_j u0(x_{K^m,j}) Phi_{K,j} over the patch.
FineFunction local_approximator(const PatchBasisSet& set, const FineFunction& u0);

struct InterpolantResult {
  MultiscaleSolution w;
  /// The elementwise function u_hat|_K = u_hat_{K^m}|_K.
  ElementwiseFineFunction u_hat;
  /// Number of elements sharing each interior node.
  std::vector<int> node_multiplicity;
};

/// Averaged nodal interpolant w_H = sum_i c_i v_i with c_i the mean over
/// elements at x_i of u_hat|_K(x_i) (Type-1) or of its macroscopic
/// component (Type-2).
InterpolantResult global_interpolant(const TwoScaleMesh& mesh, const std::vector<PatchBasisSet>& sets,
                                     const FineFunction& u0);

/// Bilinear coarse hat of corner q of K, restricted to K.
std::vector<double> coarse_hat_on_element(const TwoScaleMesh& mesh, int element, int corner);

struct CoarseSolveResult {
  MultiscaleSolution solution;
  double rcond = 0.0;
};

/// a_H(u, psi_i) = (f, psi_i) for all standard coarse hats psi_i.
CoarseSolveResult assemble_petrov_galerkin(const TwoScaleMesh& mesh, const std::vector<PatchBasisSet>& sets,
                                           const CellCoefficients& coeffs, const SourceFn& f);

/// Standard Q1 Galerkin on the coarse mesh with fine-grid integration; the
/// realization is the coarse interpolant on every element.
CoarseSolveResult solve_standard_q1(const TwoScaleMesh& mesh, const CellCoefficients& coeffs, const SourceFn& f);

struct BestApproximation {
  std::vector<double> coefficients;
  ElementwiseFineFunction realization;
  double error = 0.0;  ///< broken energy norm of u_ref - minimizer
  double rcond = 0.0;
};

/// Minimizer of the broken energy error over the multiscale space.
BestApproximation best_approximation(const TwoScaleMesh& mesh, const std::vector<PatchBasisSet>& sets,
                                     const CellCoefficients& coeffs, const FineFunction& u_ref);

/// max over K and active p of ||phi_{K,p}||_{a,K}.
double max_basis_energy(const TwoScaleMesh& mesh, const std::vector<PatchBasisSet>& sets,
                        const CellCoefficients& coeffs);

/// max over patches with no exterior boundary, or with bilinear exterior
/// data, of |sum_j Phi_j - 1|; 0 if there is no such patch.
double partition_of_unity_deviation(const std::vector<PatchBasisSet>& sets);

}  // namespace msfem
