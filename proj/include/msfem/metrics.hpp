#pragma once

// Broken norms, interface jumps, and rate / resonance-model fits.

#include <span>
#include <string>
#include <vector>

#include "msfem/coeff.hpp"
#include "msfem/elementwise.hpp"
#include "msfem/fem_kernel.hpp"
#include "msfem/mesh2s.hpp"

namespace msfem {

/// sqrt(sum_K int_K kappa |grad(u_K - w_K)|^2), exact per fine cell.
double broken_energy_error(const TwoScaleMesh& mesh, const CellCoefficients& coeffs, const FineFunction& u_ref,
                           const ElementwiseFineFunction& w);
double broken_energy_norm(const TwoScaleMesh& mesh, const CellCoefficients& coeffs,
                          const ElementwiseFineFunction& w);

/// L2 norm of u_ref - w with the 4-corner average of the squared difference per cell.
double l2_error(const TwoScaleMesh& mesh, const FineFunction& u_ref, const ElementwiseFineFunction& w);

struct JumpReport {
  std::vector<double> per_edge;  ///< indexed by interior edge id
  double max = 0.0;
};

/// Per interior coarse edge, max over its fine nodes of |w_K - w_K'|.
JumpReport interface_jump_max(const TwoScaleMesh& mesh, const ElementwiseFineFunction& w);

/// Least-squares slope of log(error) against log(H).
double fit_rate(std::span<const double> H, std::span<const double> errors);

struct ResonanceFit {
  double a = 0.0;  ///< coefficient of H
  double b = 0.0;  ///< coefficient of eps / H
  double r2 = 0.0;
};

/// Nonnegative least squares for error ~ a H + b eps / H.
ResonanceFit fit_resonance_model(std::span<const double> H, std::span<const double> errors, double epsilon);

/// Per-run summary of error quantities.
struct ErrorReport {
  double H = 0.0;
  double h = 0.0;
  int m = 0;
  double epsilon = 0.0;
  std::string basis_type;
  double broken_energy_error = 0.0;
  double l2_error = 0.0;
  std::vector<double> per_edge_jumps;
  double max_jump = 0.0;
  int lambda = 0;
  double fitted_slope = 0.0;
  ResonanceFit resonance;
};

}  // namespace msfem
