#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "msfem/error.hpp"
#include "msfem/metrics.hpp"

using namespace msfem;

namespace {

CellCoefficients scaled_identity(const TwoScaleMesh& mesh, double s) {
  return eval_cellwise(make_constant(Tensor2::isotropic(s)), mesh);
}

FineFunction hat_function(const TwoScaleMesh& mesh, int ci, int cj) {
  FineFunction u(Lattice::whole(mesh));
  for (int j = 0; j <= mesh.n_fine(); ++j)
    for (int i = 0; i <= mesh.n_fine(); ++i) {
      const double a = std::max(0.0, 1.0 - std::abs(static_cast<double>(i) / mesh.refine() - ci));
      const double b = std::max(0.0, 1.0 - std::abs(static_cast<double>(j) / mesh.refine() - cj));
      u.values[static_cast<std::size_t>(mesh.fine_node_id(i, j))] = a * b;
    }
  return u;
}

FineFunction random_function(const TwoScaleMesh& mesh, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FineFunction f(Lattice::whole(mesh));
  for (double& v : f.values) v = u(rng);
  return f;
}

}  // namespace

TEST_CASE("broken energy error") {
  const TwoScaleMesh mesh(4, 4);
  const CellCoefficients id = scaled_identity(mesh, 1.0);
  const FineFunction zero(Lattice::whole(mesh));
  const FineFunction hat = hat_function(mesh, 2, 1);
  const ElementwiseFineFunction w = restrict_to_elements(mesh, hat);
  CHECK(broken_energy_error(mesh, id, hat, w) == 0.0);
  CHECK(broken_energy_error(mesh, id, zero, w) == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-13));
  CHECK(broken_energy_norm(mesh, id, w) == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-13));
  CHECK(broken_energy_error(mesh, scaled_identity(mesh, 4.0), zero, w) ==
        doctest::Approx(2.0 * std::sqrt(8.0 / 3.0)).epsilon(1e-13));
  CHECK_THROWS_AS(broken_energy_error(mesh, id, zero, ElementwiseFineFunction(TwoScaleMesh(2, 4))), InvalidArgument);
}

TEST_CASE("broken energy agrees with the conforming norm for conforming input") {
  const TwoScaleMesh mesh(3, 5);
  const CellCoefficients coeffs = eval_cellwise(make_oscillatory(1.0 / 5.0), mesh);
  const FineFunction u = random_function(mesh, 4);
  const FineFunction zero(Lattice::whole(mesh));
  const double broken = broken_energy_error(mesh, coeffs, zero, restrict_to_elements(mesh, u));
  const double conforming = energy_norm(Lattice::whole(mesh), coeffs, u.values);
  CHECK(std::abs(broken - conforming) <= 1e-12 * conforming);
}

TEST_CASE("broken energy triangle inequality on random triples") {
  const TwoScaleMesh mesh(3, 4);
  const CellCoefficients coeffs = eval_cellwise(make_checkerboard(1.0, 5.0, 1.0 / 3.0), mesh);
  const FineFunction zero(Lattice::whole(mesh));
  for (unsigned s = 0; s < 10; ++s) {
    const FineFunction a = random_function(mesh, 3 * s), b = random_function(mesh, 3 * s + 1);
    ElementwiseFineFunction sum = restrict_to_elements(mesh, a);
    const ElementwiseFineFunction eb = restrict_to_elements(mesh, b);
    // Perturb per element so the pieces are genuinely broken.
    std::mt19937 rng(s);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (std::size_t e = 0; e < sum.pieces.size(); ++e)
      for (std::size_t k = 0; k < sum.pieces[e].size(); ++k) sum.pieces[e][k] += eb.pieces[e][k] + u(rng);
    ElementwiseFineFunction c = sum;
    for (std::size_t e = 0; e < c.pieces.size(); ++e)
      for (std::size_t k = 0; k < c.pieces[e].size(); ++k) c.pieces[e][k] -= eb.pieces[e][k];
    // ||a - (c + b)|| <= ||a - c|| + ||b||
    CHECK(broken_energy_error(mesh, coeffs, a, sum) <=
          broken_energy_error(mesh, coeffs, a, c) + broken_energy_norm(mesh, coeffs, eb) + 1e-12);
  }
}

TEST_CASE("L2 error") {
  const TwoScaleMesh mesh(4, 4);
  const FineFunction zero(Lattice::whole(mesh));
  const FineFunction u = random_function(mesh, 1);
  CHECK(l2_error(mesh, u, restrict_to_elements(mesh, u)) == 0.0);
  CHECK(l2_error(mesh, zero, ElementwiseFineFunction(mesh, 0.7)) == doctest::Approx(0.7).epsilon(1e-13));

  // Four-corner average of the squared difference, computed by hand.
  double sum = 0.0;
  const double h = mesh.h();
  for (int j = 0; j < mesh.n_fine(); ++j)
    for (int i = 0; i < mesh.n_fine(); ++i) {
      double s = 0.0;
      for (auto [di, dj] : {std::pair{0, 0}, {1, 0}, {1, 1}, {0, 1}}) {
        const double v = u.at(i + di, j + dj);
        s += v * v;
      }
      sum += 0.25 * s * h * h;
    }
  CHECK(l2_error(mesh, u, ElementwiseFineFunction(mesh, 0.0)) == doctest::Approx(std::sqrt(sum)).epsilon(1e-13));
}

TEST_CASE("interface jumps") {
  const TwoScaleMesh mesh(3, 4);
  const FineFunction u = random_function(mesh, 2);
  ElementwiseFineFunction w = restrict_to_elements(mesh, u);
  JumpReport r = interface_jump_max(mesh, w);
  CHECK(r.per_edge.size() == mesh.interior_edges().size());
  CHECK(r.max == 0.0);

  // Shift the piece of one element by 1: its interior edges jump by exactly 1.
  const int e = mesh.element_id(0, 0);
  for (double& v : w.pieces[static_cast<std::size_t>(e)]) v += 1.0;
  r = interface_jump_max(mesh, w);
  for (const CoarseEdge& edge : mesh.interior_edges()) {
    const bool touches = edge.first == e || edge.second == e;
    CHECK(r.per_edge[static_cast<std::size_t>(edge.id)] == doctest::Approx(touches ? 1.0 : 0.0).epsilon(1e-14));
  }
  CHECK(r.max == doctest::Approx(1.0));

  // Symmetric in the element pair: flipping which side carries the shift.
  ElementwiseFineFunction flipped = restrict_to_elements(mesh, u);
  for (std::size_t k = 0; k < flipped.pieces.size(); ++k)
    if (static_cast<int>(k) != e)
      for (double& v : flipped.pieces[k]) v += 1.0;
  const JumpReport rf = interface_jump_max(mesh, flipped);
  for (const CoarseEdge& edge : mesh.interior_edges())
    if (edge.first == e || edge.second == e)
      CHECK(rf.per_edge[static_cast<std::size_t>(edge.id)] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rate fit") {
  const std::vector<double> H{0.25, 0.125, 0.0625};
  CHECK(fit_rate(H, std::vector<double>{0.4, 0.2, 0.1}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(fit_rate(H, std::vector<double>{0.3, 0.3, 0.3})) <= 1e-14);
  CHECK(fit_rate(H, std::vector<double>{0.0625, 0.015625, 0.00390625}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(fit_rate(std::vector<double>{0.5}, std::vector<double>{1.0}), InvalidArgument);
  CHECK_THROWS_AS(fit_rate(H, std::vector<double>{0.1, 0.0, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(fit_rate(std::vector<double>{0.1, 0.1}, std::vector<double>{1.0, 2.0}), InvalidArgument);
}

TEST_CASE("resonance model fit") {
  const double eps = 1.0 / 64.0;
  const std::vector<double> H{0.25, 0.125, 0.0625, 0.03125};
  std::vector<double> e(H.size());
  for (std::size_t k = 0; k < H.size(); ++k) e[k] = 2.0 * H[k] + 3.0 * eps / H[k];
  ResonanceFit f = fit_resonance_model(H, e, eps);
  CHECK(f.a == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.b == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

  for (std::size_t k = 0; k < H.size(); ++k) e[k] = 5.0 * H[k];
  f = fit_resonance_model(H, e, eps);
  CHECK(f.a == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(std::abs(f.b) <= 1e-12);
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

  // Superlinear decay would want b < 0; clipping refits a alone.
  const std::vector<double> sup{0.4, 0.15, 0.05, 0.02};
  f = fit_resonance_model(H, sup, eps);
  CHECK(f.b == 0.0);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < H.size(); ++k) {
    num += H[k] * sup[k];
    den += H[k] * H[k];
  }
  CHECK(f.a == doctest::Approx(num / den).epsilon(1e-12));
  CHECK(f.r2 <= 1.0);

  CHECK_THROWS_AS(fit_resonance_model(std::vector<double>{0.5, 0.25}, std::vector<double>{1.0, 1.0}, eps),
                  InvalidArgument);
  CHECK_THROWS_AS(fit_resonance_model(std::vector<double>{0.1, 0.1, 0.1}, std::vector<double>{1.0, 1.0, 1.0}, eps),
                  InvalidArgument);
  CHECK_THROWS_AS(fit_resonance_model(H, e, 0.0), InvalidArgument);
}
