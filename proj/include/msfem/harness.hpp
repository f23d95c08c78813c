#pragma once

// Configuration-driven experiment runner: convergence sweeps, cell problems,
// basis dumps and interface-jump tables.

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "msfem/coeff.hpp"
#include "msfem/error.hpp"
#include "msfem/fem_kernel.hpp"
#include "msfem/homogenize.hpp"
#include "msfem/metrics.hpp"
#include "msfem/msfem.hpp"

namespace msfem {

/// A failure inside one pipeline stage ("config", "mesh", "coefficient",
/// "cell", "reference", "homogenized", "basis", "interpolant", ...).
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message)
      : Error("[" + stage + "] " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct RunConfig {
  std::vector<int> n_coarse_list;
  int refine = 0;   ///< fine cells per coarse cell; 0 when n_fine is given
  int n_fine = 0;   ///< fixed fine grid across the sweep; 0 when refine is given
  std::optional<int> m;  ///< empty means "full" (m = refine)
  double epsilon = 1.0 / 32.0;
  std::string coefficient = "oscillatory";
  /// Coefficient parameters: value, low, high, fraction, first, second, s, grid_file.
  std::map<std::string, std::string> coefficient_params;
  std::string source = "one";
  bool type1 = true;
  bool type2 = true;
  double cg_tol = 1e-10;
  int n_cell = 64;
  std::string output;
  LocalSolver local_solver = LocalSolver::direct;
  ExteriorData exterior = ExteriorData::bilinear;
  int threads = 0;

  int refine_for(int n_coarse) const;
  int m_for(int refine) const;
  std::string basis_type_name() const;
};

/// Parses the flat "key = value" format; '#' starts a comment, lists are
/// comma separated. Unknown keys and malformed values throw StageError("config").
RunConfig parse_config(std::istream& in, const std::string& source_name = "<config>");
RunConfig load_config(const std::string& path);
/// Throws StageError("config") on invalid combinations; returns warnings
/// (e.g. epsilon < 4h) for valid ones.
std::vector<std::string> validate_config(const RunConfig& config);

CoefficientField make_coefficient(const RunConfig& config);
SourceFn make_source(const std::string& id);

/// Fine reference and homogenized solutions, shared between runs that use
/// the same fine grid, coefficient and source.
struct ReferenceSolutions {
  FineSolve u_eps;
  FineSolve u0;
};

class ReferenceCache {
 public:
  /// Keyed by n_fine only; callers must not share a cache across coefficients or sources.
  const ReferenceSolutions* find(int n_fine) const;
  void store(int n_fine, ReferenceSolutions solutions);

 private:
  std::map<int, std::shared_ptr<const ReferenceSolutions>> entries_;
};

struct ConvergenceRow {
  int n_coarse = 0;
  double H = 0.0;
  double h = 0.0;
  int m = 0;
  double epsilon = 0.0;
  BasisType basis_type = BasisType::type1;
  double err_interp_energy = 0.0;
  double err_bestapprox_energy = 0.0;
  double err_pg_energy = 0.0;
  double err_l2_hom = 0.0;
  double max_jump = 0.0;
  int lambda = 0;
  int cg_iters_fine = 0;

  // Diagnostics not written to the CSV.
  double max_jump_u_hat = 0.0;
  double max_basis_energy = 0.0;
  double lagrange_deviation = 0.0;
  double partition_of_unity_deviation = 0.0;
  double standard_q1_energy = 0.0;  ///< broken energy error of standard coarse Q1
  double pg_rcond = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  std::vector<std::string> warnings;
  std::string csv;
  std::string summary;
};

inline constexpr const char* kCsvHeader =
    "n_coarse,H,h,m,epsilon,basis_type,err_interp_energy,err_bestapprox_energy,err_pg_energy,err_l2_hom,"
    "max_jump,lambda,cg_iters_fine";

/// %.16e formatting used by every numeric output.
std::string format_double(double v);
std::string csv_line(const ConvergenceRow& row);

/// One row per (n_coarse, basis type). Rows run in list order. Does not
/// write files; see write_convergence_outputs.
ConvergenceResult run_convergence(const RunConfig& config, ReferenceCache* cache = nullptr);
/// Writes <output> (CSV) and <output>.summary.txt.
void write_convergence_outputs(const RunConfig& config, const ConvergenceResult& result);

struct CellRunResult {
  CellSolution cell;
  Tensor2 kappa_bar;
  std::array<double, 4> raw_matrix{};
  std::vector<std::string> files;
};

/// Cell problems for the configured coefficient (slow variable frozen at the
/// domain centre for locally periodic fields); writes the tensor and
/// correctors as grid files when output is set.
CellRunResult run_cell(const RunConfig& config);

struct BasisDumpResult {
  Patch patch;
  IntermediateBases phi;
  std::vector<std::pair<BasisType, PatchBasisSet>> sets;
  std::vector<std::string> files;
};

/// Bases of element K at the first listed n_coarse; writes Phi_j and every
/// active phi_{K,p} (per requested type) over the patch.
BasisDumpResult run_basis_dump(const RunConfig& config, int element);

struct JumpRow {
  int n_coarse = 0;
  BasisType basis_type = BasisType::type1;
  CoarseEdge edge;
  double jump_u_hat = 0.0;
  double jump_w = 0.0;
};

struct JumpResult {
  std::vector<JumpRow> rows;
  std::string csv;
};

/// Per-edge interface jumps of u_hat and of the averaged interpolant.
JumpResult run_jumps(const RunConfig& config, ReferenceCache* cache = nullptr);

}  // namespace msfem
