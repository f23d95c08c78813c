#include "msfem/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "msfem/error.hpp"

namespace msfem {

double Tensor2::min_eigenvalue() const {
  const double mean = 0.5 * (xx + yy);
  const double radius = std::hypot(0.5 * (xx - yy), xy);
  return mean - radius;
}

double Tensor2::max_eigenvalue() const {
  const double mean = 0.5 * (xx + yy);
  const double radius = std::hypot(0.5 * (xx - yy), xy);
  return mean + radius;
}

bool Tensor2::is_finite() const { return std::isfinite(xx) && std::isfinite(xy) && std::isfinite(yy); }

std::string to_string(CoefficientKind kind) {
  switch (kind) {
    case CoefficientKind::constant: return "constant";
    case CoefficientKind::periodic: return "periodic";
    case CoefficientKind::locally_periodic: return "locally_periodic";
    case CoefficientKind::checkerboard: return "checkerboard";
    case CoefficientKind::laminate: return "laminate";
  }
  return "unknown";
}

namespace {

double wrap_unit(double t) {
  double f = t - std::floor(t);
  // floor() can leave f == 1.0 for tiny negative t.
  return f >= 1.0 ? 0.0 : f;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidArgument("epsilon must be positive and finite");
}

[[noreturn]] void reject_sample(const Tensor2& t, Point slow, Point fast) {
  std::ostringstream os;
  os.precision(17);
  os << "coefficient sample is not SPD at slow=(" << slow.x << ", " << slow.y << ") fast=(" << fast.x << ", "
     << fast.y << "): [" << t.xx << ", " << t.xy << "; " << t.xy << ", " << t.yy << "]";
  throw InvalidArgument(os.str());
}

/// Samples the unit cell (and a coarse slow grid when `slow_samples` > 1),
/// rejects non-SPD values and returns the observed eigenvalue range.
EllipticityBounds sample_bounds(const TwoScaleFn& fn, int fast_samples, int slow_samples) {
  EllipticityBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (int sj = 0; sj < slow_samples; ++sj) {
    for (int si = 0; si < slow_samples; ++si) {
      const Point slow = slow_samples == 1 ? Point{0.5, 0.5}
                                           : Point{si / double(slow_samples - 1), sj / double(slow_samples - 1)};
      for (int j = 0; j < fast_samples; ++j) {
        for (int i = 0; i < fast_samples; ++i) {
          const Point fast{(i + 0.5) / fast_samples, (j + 0.5) / fast_samples};
          const Tensor2 t = fn(slow, fast);
          if (!t.is_spd()) reject_sample(t, slow, fast);
          b.alpha = std::min(b.alpha, t.min_eigenvalue());
          b.beta = std::max(b.beta, t.max_eigenvalue());
        }
      }
    }
  }
  return b;
}

}  // namespace

CoefficientField::CoefficientField(CoefficientKind kind, double epsilon, TwoScaleFn fn, EllipticityBounds bounds)
    : kind_(kind), epsilon_(epsilon), fn_(std::move(fn)), bounds_(bounds) {
  check_epsilon(epsilon);
  if (!fn_) throw InvalidArgument("coefficient function is empty");
  if (!(bounds.alpha > 0.0) || !(bounds.beta >= bounds.alpha) || !std::isfinite(bounds.beta))
    throw InvalidArgument("ellipticity bounds must satisfy 0 < alpha <= beta < inf");
}

Tensor2 CoefficientField::operator()(Point x) const {
  const Point fast{wrap_unit(x.x / epsilon_), wrap_unit(x.y / epsilon_)};
  return fn_(x, fast);
}

UnitCellFn CoefficientField::frozen_at(Point slow) const {
  return [fn = fn_, slow](Point fast) { return fn(slow, fast); };
}

double SampledCell::lookup(Point y) const {
  const int i = std::min(n - 1, static_cast<int>(wrap_unit(y.x) * n));
  const int j = std::min(n - 1, static_cast<int>(wrap_unit(y.y) * n));
  return at(i, j);
}

CoefficientField make_constant(const Tensor2& value) {
  if (!value.is_spd()) reject_sample(value, {}, {});
  return CoefficientField(CoefficientKind::constant, 1.0, [value](Point, Point) { return value; },
                          {value.min_eigenvalue(), value.max_eigenvalue()});
}

CoefficientField make_periodic(UnitCellFn unit_cell, double epsilon, const EllipticityBounds* bounds) {
  check_epsilon(epsilon);
  if (!unit_cell) throw InvalidArgument("unit-cell function is empty");
  TwoScaleFn fn = [cell = std::move(unit_cell)](Point, Point fast) { return cell(fast); };
  const EllipticityBounds sampled = sample_bounds(fn, 128, 1);
  return CoefficientField(CoefficientKind::periodic, epsilon, std::move(fn), bounds ? *bounds : sampled);
}

CoefficientField make_periodic(const SampledCell& cell, double epsilon) {
  if (cell.n <= 0 || cell.values.size() != static_cast<std::size_t>(cell.n) * cell.n)
    throw InvalidArgument("sampled unit cell has inconsistent size");
  EllipticityBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (int j = 0; j < cell.n; ++j) {
    for (int i = 0; i < cell.n; ++i) {
      const double v = cell.at(i, j);
      if (!(v > 0.0) || !std::isfinite(v))
        reject_sample(Tensor2::isotropic(v), {}, {(i + 0.5) / cell.n, (j + 0.5) / cell.n});
      b.alpha = std::min(b.alpha, v);
      b.beta = std::max(b.beta, v);
    }
  }
  return make_periodic([cell](Point y) { return Tensor2::isotropic(cell.lookup(y)); }, epsilon, &b);
}

CoefficientField make_locally_periodic(TwoScaleFn kappa_xy, double epsilon, const EllipticityBounds* bounds) {
  check_epsilon(epsilon);
  if (!kappa_xy) throw InvalidArgument("coefficient function is empty");
  const EllipticityBounds sampled = sample_bounds(kappa_xy, 64, 9);
  return CoefficientField(CoefficientKind::locally_periodic, epsilon, std::move(kappa_xy),
                          bounds ? *bounds : sampled);
}

CoefficientField make_laminate(double low, double high, double epsilon, double fraction) {
  if (!(low > 0.0) || !(high > 0.0)) throw InvalidArgument("laminate values must be positive");
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("laminate fraction must lie in (0, 1)");
  return CoefficientField(
      CoefficientKind::laminate, epsilon,
      [=](Point, Point y) { return Tensor2::isotropic(y.x < fraction ? low : high); },
      {std::min(low, high), std::max(low, high)});
}

CoefficientField make_checkerboard(double first, double second, double epsilon) {
  if (!(first > 0.0) || !(second > 0.0)) throw InvalidArgument("checkerboard values must be positive");
  return CoefficientField(
      CoefficientKind::checkerboard, epsilon,
      [=](Point, Point y) { return Tensor2::isotropic((y.x < 0.5) == (y.y < 0.5) ? first : second); },
      {std::min(first, second), std::max(first, second)});
}

double oscillatory_scalar(Point y) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return 1.0 / (2.0 + 1.8 * std::sin(two_pi * y.x)) + 1.0 / (2.0 + 1.8 * std::cos(two_pi * y.y));
}

CoefficientField make_oscillatory(double epsilon) {
  // Each term ranges over [1/3.8, 1/0.2].
  const EllipticityBounds b{2.0 / 3.8, 10.0};
  return make_periodic([](Point y) { return Tensor2::isotropic(oscillatory_scalar(y)); }, epsilon, &b);
}

CoefficientField make_sin_laminate(double epsilon) {
  const EllipticityBounds b{1.0, 3.0};
  return make_periodic(
      [](Point y) { return Tensor2::isotropic(2.0 + std::sin(2.0 * std::numbers::pi * y.x)); }, epsilon, &b);
}

CoefficientField make_holder_field(double epsilon, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw InvalidArgument("Holder exponent must lie in (0, 1]");
  const EllipticityBounds b{2.0 / 3.8, 10.0 * (1.0 + std::pow(0.5, s))};
  return make_locally_periodic(
      [s](Point x, Point y) {
        return Tensor2::isotropic((1.0 + std::pow(std::abs(x.x - 0.5), s)) * oscillatory_scalar(y));
      },
      epsilon, &b);
}

CellCoefficients eval_cellwise(const CoefficientField& field, int n, double h) {
  if (n <= 0 || !(h > 0.0)) throw InvalidArgument("eval_cellwise needs a positive lattice");
  CellCoefficients out{n, n, h, {}};
  out.values.resize(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Point mid{(i + 0.5) * h, (j + 0.5) * h};
      const Tensor2 t = field(mid);
      if (!t.is_spd()) {
        std::ostringstream os;
        os << "coefficient evaluation failed at fine cell (" << i << ", " << j << "), index " << j * n + i;
        throw InvalidArgument(os.str());
      }
      out.at(i, j) = t;
    }
  }
  return out;
}

CellCoefficients eval_cellwise(const CoefficientField& field, const TwoScaleMesh& mesh) {
  return eval_cellwise(field, mesh.n_fine(), mesh.h());
}

CellCoefficients eval_unit_cell(const UnitCellFn& unit_cell, int n) {
  if (n <= 0) throw InvalidArgument("eval_unit_cell needs n > 0");
  CellCoefficients out{n, n, 1.0 / n, {}};
  out.values.resize(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Point mid{(i + 0.5) / n, (j + 0.5) / n};
      const Tensor2 t = unit_cell(mid);
      if (!t.is_spd()) {
        std::ostringstream os;
        os << "unit-cell evaluation failed at cell (" << i << ", " << j << "), index " << j * n + i;
        throw InvalidArgument(os.str());
      }
      out.at(i, j) = t;
    }
  }
  return out;
}

}  // namespace msfem
