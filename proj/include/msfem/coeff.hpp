#pragma once

// Coefficient fields kappa^eps(x) = kappa(x, x/eps) and their per-fine-cell
// midpoint realization.

#include <functional>
#include <string>
#include <vector>

#include "msfem/mesh2s.hpp"

namespace msfem {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Symmetric 2x2 tensor.
struct Tensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  static Tensor2 identity() { return {1.0, 0.0, 1.0}; }
  static Tensor2 isotropic(double a) { return {a, 0.0, a}; }
  static Tensor2 diagonal(double a, double b) { return {a, 0.0, b}; }

  double min_eigenvalue() const;
  double max_eigenvalue() const;
  bool is_finite() const;
  bool is_spd() const { return is_finite() && min_eigenvalue() > 0.0; }

  friend Tensor2 operator*(double s, const Tensor2& t) { return {s * t.xx, s * t.xy, s * t.yy}; }
  friend Tensor2 operator+(const Tensor2& a, const Tensor2& b) { return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy}; }
  friend bool operator==(const Tensor2&, const Tensor2&) = default;
};

enum class CoefficientKind { constant, periodic, locally_periodic, checkerboard, laminate };

std::string to_string(CoefficientKind kind);

/// kappa(x, y): slow variable x in D, fast variable y in the unit cell Y.
using TwoScaleFn = std::function<Tensor2(Point slow, Point fast)>;
using UnitCellFn = std::function<Tensor2(Point fast)>;

/// Eigenvalue bounds (alpha, beta) of a field.
struct EllipticityBounds {
  double alpha = 0.0;
  double beta = 0.0;
};

class CoefficientField {
 public:
  CoefficientField(CoefficientKind kind, double epsilon, TwoScaleFn fn, EllipticityBounds bounds);

  CoefficientKind kind() const { return kind_; }
  double epsilon() const { return epsilon_; }
  const EllipticityBounds& bounds() const { return bounds_; }

  /// kappa^eps at a physical point.
  Tensor2 operator()(Point x) const;
  /// kappa(slow, fast) with the fast variable already in Y.
  Tensor2 two_scale(Point slow, Point fast) const { return fn_(slow, fast); }
  /// Unit-cell function with the slow variable frozen.
  UnitCellFn frozen_at(Point slow) const;

 private:
  CoefficientKind kind_;
  double epsilon_;
  TwoScaleFn fn_;
  EllipticityBounds bounds_;
};

/// Isotropic scalar samples over Y, row-major with rows along y.
struct SampledCell {
  int n = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(j * n + i)]; }
  /// Piecewise-constant lookup on the n x n subcells of Y.
  double lookup(Point y) const;
};

CoefficientField make_constant(const Tensor2& value);
/// kappa^eps(x) = kappa((x/eps) mod 1). Bounds are estimated by sampling
/// when not supplied; samples that are not SPD are rejected.
CoefficientField make_periodic(UnitCellFn unit_cell, double epsilon, const EllipticityBounds* bounds = nullptr);
CoefficientField make_periodic(const SampledCell& cell, double epsilon);
CoefficientField make_locally_periodic(TwoScaleFn kappa_xy, double epsilon,
                                       const EllipticityBounds* bounds = nullptr);
/// a(y1) = low for y1 < fraction, high otherwise, isotropic.
CoefficientField make_laminate(double low, double high, double epsilon, double fraction = 0.5);
/// a = first on the (0,0)/(1,1) quadrants of Y, second on the others.
CoefficientField make_checkerboard(double first, double second, double epsilon);

/// kappa(y) = 1/(2+1.8 sin(2 pi y1)) + 1/(2+1.8 cos(2 pi y2)), isotropic.
double oscillatory_scalar(Point y);
CoefficientField make_oscillatory(double epsilon);
/// a(y1) = 2 + sin(2 pi y1), isotropic, periodic kind.
CoefficientField make_sin_laminate(double epsilon);
/// Locally periodic field (1 + |x1 - 1/2|^s) * oscillatory(y); s-Holder in x.
CoefficientField make_holder_field(double epsilon, double s);

/// Per-fine-cell tensors for a uniform lattice of nx x ny cells of size h
/// starting at the origin, row-major (j major).
struct CellCoefficients {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  std::vector<Tensor2> values;

  const Tensor2& at(int i, int j) const { return values[static_cast<std::size_t>(j * nx + i)]; }
  Tensor2& at(int i, int j) { return values[static_cast<std::size_t>(j * nx + i)]; }
};

/// Midpoint samples of the field on an n x n lattice with cell size h.
CellCoefficients eval_cellwise(const CoefficientField& field, int n, double h);
CellCoefficients eval_cellwise(const CoefficientField& field, const TwoScaleMesh& mesh);
/// Midpoint samples of a unit-cell function on an n x n lattice of Y.
CellCoefficients eval_unit_cell(const UnitCellFn& unit_cell, int n);

}  // namespace msfem
