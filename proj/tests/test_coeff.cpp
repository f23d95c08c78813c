#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "msfem/coeff.hpp"
#include "msfem/error.hpp"
#include "msfem/grid_io.hpp"

using namespace msfem;

namespace {

constexpr double kPi = std::numbers::pi;

Tensor2 sin_cell(Point y) { return Tensor2::isotropic(2.0 + 1.8 * std::sin(2.0 * kPi * y.x)); }

}  // namespace

TEST_CASE("tensor eigenvalues") {
  const Tensor2 t{2.0, 1.0, 2.0};
  CHECK(t.min_eigenvalue() == doctest::Approx(1.0));
  CHECK(t.max_eigenvalue() == doctest::Approx(3.0));
  CHECK(t.is_spd());
  CHECK_FALSE((Tensor2{1.0, 2.0, 1.0}).is_spd());
  CHECK_FALSE((Tensor2{NAN, 0.0, 1.0}).is_spd());
}

TEST_CASE("periodic field evaluation") {
  const CoefficientField id = make_periodic([](Point) { return Tensor2::identity(); }, 0.1);
  for (double x : {0.0, 0.13, 0.77})
    for (double y : {0.0, 0.5, 0.99}) CHECK(id({x, y}) == Tensor2::identity());

  const CoefficientField f = make_periodic(sin_cell, 0.25);
  for (double y : {0.0, 0.3, 0.9}) CHECK(f({1.0 / 8.0, y}).xx == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f({1.0 / 16.0, 0.2}).xx == doctest::Approx(3.8));
}

TEST_CASE("periodic field is epsilon periodic") {
  const double eps = 1.0 / 8.0;
  const CoefficientField f = make_oscillatory(eps);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0 - eps);
  for (int k = 0; k < 200; ++k) {
    const Point x{u(rng), u(rng)};
    CHECK(f({x.x + eps, x.y}).xx == doctest::Approx(f(x).xx).epsilon(1e-10));
    CHECK(f({x.x, x.y + eps}).xx == doctest::Approx(f(x).xx).epsilon(1e-10));
  }
}

TEST_CASE("epsilon one coincides with the unit cell") {
  const CoefficientField f = make_periodic(sin_cell, 1.0);
  for (int k = 0; k < 17; ++k) {
    const Point y{k / 17.0, (k * 5 % 17) / 17.0};
    CHECK(f(y) == sin_cell(y));
  }
}

TEST_CASE("non SPD unit cell is rejected with a location") {
  try {
    make_periodic([](Point y) { return Tensor2::isotropic(y.x - 0.5); }, 0.5);
    FAIL("expected rejection");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("fast=(") != std::string::npos);
  }
  CHECK_THROWS_AS(make_periodic(sin_cell, 0.0), InvalidArgument);
  CHECK_THROWS_AS(make_periodic(sin_cell, -1.0), InvalidArgument);
  CHECK_THROWS_AS(make_constant(Tensor2{1.0, 0.0, -1.0}), InvalidArgument);
}

TEST_CASE("sampled unit cell round trip") {
  SampledCell cell;
  cell.n = 64;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.5, 5.0);
  for (int k = 0; k < 64 * 64; ++k) cell.values.push_back(u(rng));

  const CoefficientField f = make_periodic(cell, 1.0);
  const CellCoefficients c = eval_unit_cell(f.frozen_at({0.5, 0.5}), 64);
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i) CHECK(c.at(i, j).xx == cell.at(i, j));

  std::ostringstream os;
  write_grid(os, Grid{64, 64, cell.values});
  std::istringstream is(os.str());
  const Grid g = parse_grid(is);
  CHECK(g.values == cell.values);
  const SampledCell back = sampled_cell_from_grid(g);
  CHECK(back.values == cell.values);

  cell.values[17] = -1.0;
  CHECK_THROWS_AS(make_periodic(cell, 1.0), InvalidArgument);
}

TEST_CASE("grid parser rejects malformed input") {
  std::istringstream short_body("2 2\n1 2 3\n");
  CHECK_THROWS_AS(parse_grid(short_body), InvalidArgument);
  std::istringstream extra("1 1\n1 2\n");
  CHECK_THROWS_AS(parse_grid(extra), InvalidArgument);
  std::istringstream header("0 3\n");
  CHECK_THROWS_AS(parse_grid(header), InvalidArgument);
  CHECK_THROWS_AS(sampled_cell_from_grid(Grid{2, 3, std::vector<double>(6, 1.0)}), InvalidArgument);
  CHECK_THROWS_AS(read_grid("/nonexistent/grid.txt"), InvalidArgument);
}

TEST_CASE("locally periodic field") {
  const CoefficientField lp = make_locally_periodic([](Point x, Point) { return (1.0 + x.x) * Tensor2::identity(); },
                                                    0.1);
  CHECK(lp({0.5, 0.5}).xx == doctest::Approx(1.5));
  CHECK(lp({0.5, 0.5}).xy == 0.0);

  const CoefficientField a = make_locally_periodic([](Point, Point y) { return sin_cell(y); }, 1.0 / 16.0);
  const CoefficientField b = make_periodic(sin_cell, 1.0 / 16.0);
  const CellCoefficients ca = eval_cellwise(a, 64, 1.0 / 64.0);
  const CellCoefficients cb = eval_cellwise(b, 64, 1.0 / 64.0);
  CHECK(ca.values == cb.values);
}

TEST_CASE("Holder field modulus") {
  for (double s : {0.25, 0.5, 1.0}) {
    const CoefficientField f = make_holder_field(1.0 / 8.0, s);
    // |a^s - b^s| <= |a - b|^s for s in (0, 1]; the fast factor is at most 10.
    const double c = 10.0;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 300; ++k) {
      const Point y{u(rng), u(rng)};
      const Point x1{u(rng), u(rng)};
      const Point x2{u(rng), u(rng)};
      const double d = std::abs(f.two_scale(x1, y).xx - f.two_scale(x2, y).xx);
      CHECK(d <= c * std::pow(std::abs(x1.x - x2.x), s) + 1e-12);
    }
  }
  CHECK_THROWS_AS(make_holder_field(0.1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(make_holder_field(0.1, 1.5), InvalidArgument);
}

TEST_CASE("built-in fields respect their bounds") {
  std::vector<CoefficientField> fields;
  fields.push_back(make_constant(Tensor2::isotropic(2.0)));
  fields.push_back(make_oscillatory(1.0 / 16.0));
  fields.push_back(make_sin_laminate(1.0 / 8.0));
  fields.push_back(make_laminate(1.0, 4.0, 1.0 / 8.0));
  fields.push_back(make_checkerboard(1.0, 9.0, 1.0 / 4.0));
  fields.push_back(make_holder_field(1.0 / 8.0, 0.5));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& f : fields) {
    const EllipticityBounds b = f.bounds();
    for (int k = 0; k < 500; ++k) {
      const Tensor2 t = f({u(rng), u(rng)});
      CHECK(t.xy == 0.0);
      CHECK(t.min_eigenvalue() >= b.alpha - 1e-12);
      CHECK(t.max_eigenvalue() <= b.beta + 1e-12);
    }
  }
}

TEST_CASE("cellwise realization") {
  const CoefficientField c = make_constant(Tensor2::isotropic(3.0));
  const TwoScaleMesh mesh(4, 4);
  const CellCoefficients cc = eval_cellwise(c, mesh);
  CHECK(cc.nx == 16);
  CHECK(cc.values.size() == 256u);
  for (const auto& t : cc.values) CHECK(t == Tensor2::isotropic(3.0));

  // Laminate period of 8 fine cells: exact two-valued realization.
  const CellCoefficients lam = eval_cellwise(make_laminate(1.0, 4.0, 1.0 / 8.0), 64, 1.0 / 64.0);
  for (int j = 0; j < 64; ++j)
    for (int i = 0; i < 64; ++i) CHECK(lam.at(i, j).xx == (i % 8 < 4 ? 1.0 : 4.0));

  // epsilon = 4h: each axis has period 4 in cells.
  const CellCoefficients osc = eval_cellwise(make_oscillatory(4.0 / 64.0), 64, 1.0 / 64.0);
  for (int j = 0; j + 4 < 64; ++j)
    for (int i = 0; i + 4 < 64; ++i) {
      CHECK(osc.at(i + 4, j).xx == doctest::Approx(osc.at(i, j).xx).epsilon(1e-12));
      CHECK(osc.at(i, j + 4).xx == doctest::Approx(osc.at(i, j).xx).epsilon(1e-12));
    }
  CHECK_THROWS_AS(eval_cellwise(c, 0, 0.1), InvalidArgument);
}

TEST_CASE("checkerboard layout") {
  const CoefficientField f = make_checkerboard(1.0, 4.0, 1.0);
  CHECK(f({0.25, 0.25}).xx == 1.0);
  CHECK(f({0.75, 0.75}).xx == 1.0);
  CHECK(f({0.75, 0.25}).xx == 4.0);
  CHECK(f({0.25, 0.75}).xx == 4.0);
  CHECK(to_string(f.kind()) == "checkerboard");
}
