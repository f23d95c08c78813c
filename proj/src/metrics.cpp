#include "msfem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msfem/error.hpp"

namespace msfem {

namespace {

void check_shapes(const TwoScaleMesh& mesh, const ElementwiseFineFunction& w) {
  if (!w.matches(mesh)) throw InvalidArgument("elementwise function does not match the mesh");
}

void check_global(const TwoScaleMesh& mesh, const FineFunction& u) {
  const Lattice whole = Lattice::whole(mesh);
  if (u.lattice.i0 != 0 || u.lattice.j0 != 0 || u.lattice.nx != whole.nx || u.lattice.ny != whole.ny ||
      u.values.size() != static_cast<std::size_t>(whole.num_nodes()))
    throw InvalidArgument("reference function must live on the whole fine grid");
}

}  // namespace

double broken_energy_error(const TwoScaleMesh& mesh, const CellCoefficients& coeffs, const FineFunction& u_ref,
                           const ElementwiseFineFunction& w) {
  check_shapes(mesh, w);
  check_global(mesh, u_ref);
  double total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    std::vector<double> diff = restrict_to_element(mesh, e, u_ref);
    const auto& piece = w.pieces[static_cast<std::size_t>(e)];
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= piece[k];
    total += energy_inner(element_lattice(mesh, e), coeffs, diff, diff);
  }
  return std::sqrt(std::max(0.0, total));
}

double broken_energy_norm(const TwoScaleMesh& mesh, const CellCoefficients& coeffs,
                          const ElementwiseFineFunction& w) {
  check_shapes(mesh, w);
  double total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& piece = w.pieces[static_cast<std::size_t>(e)];
    total += energy_inner(element_lattice(mesh, e), coeffs, piece, piece);
  }
  return std::sqrt(std::max(0.0, total));
}

double l2_error(const TwoScaleMesh& mesh, const FineFunction& u_ref, const ElementwiseFineFunction& w) {
  check_shapes(mesh, w);
  check_global(mesh, u_ref);
  const double area = mesh.h() * mesh.h();
  double total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Lattice lat = element_lattice(mesh, e);
    const auto& piece = w.pieces[static_cast<std::size_t>(e)];
    auto d = [&](int i, int j) {
      return u_ref.at_global({lat.i0 + i, lat.j0 + j}) - piece[static_cast<std::size_t>(lat.node(i, j))];
    };
    for (int j = 0; j < lat.ny; ++j) {
      for (int i = 0; i < lat.nx; ++i) {
        const double a = d(i, j), b = d(i + 1, j), c = d(i + 1, j + 1), q = d(i, j + 1);
        total += 0.25 * area * (a * a + b * b + c * c + q * q);
      }
    }
  }
  return std::sqrt(total);
}

JumpReport interface_jump_max(const TwoScaleMesh& mesh, const ElementwiseFineFunction& w) {
  check_shapes(mesh, w);
  JumpReport out;
  out.per_edge.reserve(mesh.interior_edges().size());
  for (const CoarseEdge& e : mesh.interior_edges()) {
    double worst = 0.0;
    for (int id : interface_fine_nodes(mesh, e.id)) {
      const LatticeIndex g = mesh.fine_node(id);
      worst = std::max(worst, std::abs(w.value(mesh, e.first, g) - w.value(mesh, e.second, g)));
    }
    out.per_edge.push_back(worst);
    out.max = std::max(out.max, worst);
  }
  return out;
}

double fit_rate(std::span<const double> H, std::span<const double> errors) {
  if (H.size() != errors.size() || H.size() < 2) throw InvalidArgument("fit_rate needs at least two (H, error) pairs");
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < H.size(); ++k) {
    if (!(H[k] > 0.0) || !(errors[k] > 0.0)) throw InvalidArgument("fit_rate needs positive H and errors");
    lx.push_back(std::log(H[k]));
    ly.push_back(std::log(errors[k]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_rate needs at least two distinct H values");
  return sxy / sxx;
}

ResonanceFit fit_resonance_model(std::span<const double> H, std::span<const double> errors, double epsilon) {
  if (H.size() != errors.size() || H.size() < 3)
    throw InvalidArgument("fit_resonance_model needs at least three (H, error) pairs");
  if (!(epsilon > 0.0)) throw InvalidArgument("fit_resonance_model needs epsilon > 0");
  const std::size_t n = H.size();
  std::vector<double> x1(n), x2(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(H[k] > 0.0)) throw InvalidArgument("fit_resonance_model needs positive H");
    x1[k] = H[k];
    x2[k] = epsilon / H[k];
  }
  auto dot = [n](const std::vector<double>& a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
  };
  const double g11 = dot(x1, x1), g12 = dot(x1, x2), g22 = dot(x2, x2);
  const double r1 = dot(x1, errors), r2 = dot(x2, errors);
  const double det = g11 * g22 - g12 * g12;
  if (!(det > 1e-14 * g11 * g22)) throw InvalidArgument("fit_resonance_model: degenerate design matrix");

  ResonanceFit fit;
  fit.a = (g22 * r1 - g12 * r2) / det;
  fit.b = (g11 * r2 - g12 * r1) / det;
  // Clip a negative coordinate to zero and refit the other one.
  if (fit.a < 0.0) {
    fit.a = 0.0;
    fit.b = std::max(0.0, r2 / g22);
  } else if (fit.b < 0.0) {
    fit.b = 0.0;
    fit.a = std::max(0.0, r1 / g11);
  }

  const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(n);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double model = fit.a * x1[k] + fit.b * x2[k];
    ss_res += (errors[k] - model) * (errors[k] - model);
    ss_tot += (errors[k] - mean) * (errors[k] - mean);
  }
  const double scale = std::max(1.0, mean * mean) * static_cast<double>(n);
  if (ss_tot <= 1e-28 * scale)
    fit.r2 = ss_res <= 1e-28 * scale ? 1.0 : 0.0;
  else
    fit.r2 = 1.0 - ss_res / ss_tot;
  return fit;
}

}  // namespace msfem
