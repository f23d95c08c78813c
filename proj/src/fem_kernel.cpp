#include "msfem/fem_kernel.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "msfem/error.hpp"

namespace msfem {

FineFunction::FineFunction(const Lattice& lat, std::vector<double> v) : lattice(lat), values(std::move(v)) {
  if (values.size() != static_cast<std::size_t>(lat.num_nodes()))
    throw InvalidArgument("FineFunction: value count does not match the lattice node count");
}

// ---------------------------------------------------------------------------
// CsrMatrix

CsrMatrix::CsrMatrix(int rows, std::vector<int> row_ptr, std::vector<int> cols, std::vector<double> vals)
    : rows_(rows), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals)) {
  if (row_ptr_.size() != static_cast<std::size_t>(rows) + 1 || cols_.size() != vals_.size() ||
      static_cast<std::size_t>(row_ptr_.back()) != cols_.size())
    throw InvalidArgument("CsrMatrix: inconsistent compressed storage");
}

double CsrMatrix::at(int r, int c) const {
  const auto b = cols_.begin() + row_ptr_[static_cast<std::size_t>(r)];
  const auto e = cols_.begin() + row_ptr_[static_cast<std::size_t>(r) + 1];
  const auto it = std::lower_bound(b, e, c);
  return (it != e && *it == c) ? vals_[static_cast<std::size_t>(it - cols_.begin())] : 0.0;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  const int* rp = row_ptr_.data();
  const int* ci = cols_.data();
  const double* v = vals_.data();
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int k = rp[r]; k < rp[r + 1]; ++k) s += v[k] * x[static_cast<std::size_t>(ci[k])];
    y[static_cast<std::size_t>(r)] = s;
  }
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(rows_), 0.0);
  for (int r = 0; r < rows_; ++r) d[static_cast<std::size_t>(r)] = at(r, r);
  return d;
}

double CsrMatrix::asymmetry() const {
  double max_abs = 0.0, max_diff = 0.0;
  for (int r = 0; r < rows_; ++r) {
    for (int k = row_ptr_[static_cast<std::size_t>(r)]; k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
      const double v = vals_[static_cast<std::size_t>(k)];
      max_abs = std::max(max_abs, std::abs(v));
      max_diff = std::max(max_diff, std::abs(v - at(cols_[static_cast<std::size_t>(k)], r)));
    }
  }
  return max_abs > 0.0 ? max_diff / max_abs : 0.0;
}

// ---------------------------------------------------------------------------
// Element integrals

namespace {

constexpr double kThird = 1.0 / 3.0;
constexpr double kSixth = 1.0 / 6.0;

// Integrals of d/dx phi_a d/dx phi_b and d/dy phi_a d/dy phi_b over the unit square.
constexpr ElementMatrix kSxx = {{{kThird, -kThird, -kSixth, kSixth},
                                 {-kThird, kThird, kSixth, -kSixth},
                                 {-kSixth, kSixth, kThird, -kThird},
                                 {kSixth, -kSixth, -kThird, kThird}}};
constexpr ElementMatrix kSyy = {{{kThird, kSixth, -kSixth, -kThird},
                                 {kSixth, kThird, -kThird, -kSixth},
                                 {-kSixth, -kThird, kThird, kSixth},
                                 {-kThird, -kSixth, kSixth, kThird}}};

const GradientMoments kMoments{{-0.5, 0.5, 0.5, -0.5}, {-0.5, -0.5, 0.5, 0.5}};

}  // namespace

ElementMatrix q1_element_stiffness(const Tensor2& kappa) {
  ElementMatrix k{};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      // d/dx and d/dy of Q1 shape functions separate, so the mixed integral
      // is a product of one-dimensional means.
      const double mixed = kMoments.x[a] * kMoments.y[b] + kMoments.y[a] * kMoments.x[b];
      k[a][b] = kappa.xx * kSxx[a][b] + kappa.yy * kSyy[a][b] + kappa.xy * mixed;
    }
  }
  return k;
}

const GradientMoments& q1_gradient_moments() { return kMoments; }

namespace {

void check_coverage(const Lattice& lat, const CellCoefficients& coeffs) {
  if (lat.nx <= 0 || lat.ny <= 0) throw InvalidArgument("lattice must have at least one cell");
  if (lat.i0 < 0 || lat.j0 < 0 || lat.i0 + lat.nx > coeffs.nx || lat.j0 + lat.ny > coeffs.ny)
    throw InvalidArgument("cell coefficients (" + std::to_string(coeffs.nx) + "x" + std::to_string(coeffs.ny) +
                          ") do not cover the lattice block starting at (" + std::to_string(lat.i0) + ", " +
                          std::to_string(lat.j0) + ") of size " + std::to_string(lat.nx) + "x" +
                          std::to_string(lat.ny));
}

std::array<int, 4> cell_nodes(const Lattice& lat, int i, int j) {
  return {lat.node(i, j), lat.node(i + 1, j), lat.node(i + 1, j + 1), lat.node(i, j + 1)};
}

}  // namespace

SparseSystem assemble_stiffness(const Lattice& lat, const CellCoefficients& coeffs) {
  check_coverage(lat, coeffs);
  const int nxn = lat.nx + 1, nyn = lat.ny + 1;
  const int n = lat.num_nodes();

  // 9-point pattern; neighbours enumerated (dj, di) lexicographically, which
  // is ascending in node id.
  std::vector<int> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> cols;
  cols.reserve(static_cast<std::size_t>(n) * 9);
  for (int j = 0; j < nyn; ++j) {
    for (int i = 0; i < nxn; ++i) {
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii >= 0 && ii < nxn && jj >= 0 && jj < nyn) cols.push_back(lat.node(ii, jj));
        }
      }
      row_ptr[static_cast<std::size_t>(lat.node(i, j)) + 1] = static_cast<int>(cols.size());
    }
  }
  std::vector<double> vals(cols.size(), 0.0);

  auto slot = [&](int row, int col) {
    const auto b = cols.begin() + row_ptr[static_cast<std::size_t>(row)];
    const auto e = cols.begin() + row_ptr[static_cast<std::size_t>(row) + 1];
    return static_cast<std::size_t>(std::lower_bound(b, e, col) - cols.begin());
  };

  for (int j = 0; j < lat.ny; ++j) {
    for (int i = 0; i < lat.nx; ++i) {
      const ElementMatrix ke = q1_element_stiffness(coeffs.at(lat.i0 + i, lat.j0 + j));
      const auto nodes = cell_nodes(lat, i, j);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) vals[slot(nodes[a], nodes[b])] += ke[a][b];
    }
  }

  SparseSystem sys;
  sys.matrix = CsrMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals));
  sys.rhs.assign(static_cast<std::size_t>(n), 0.0);
  sys.symmetric = true;
  return sys;
}

SparseSystem assemble_periodic_stiffness(const CellCoefficients& coeffs) {
  const int n = coeffs.nx;
  if (n < 3 || coeffs.ny != n) throw InvalidArgument("periodic assembly needs a square lattice with n >= 3");
  const int dofs = n * n;
  auto id = [n](int i, int j) { return ((j % n + n) % n) * n + ((i % n + n) % n); };

  std::vector<std::tuple<int, int, double>> trip;
  trip.reserve(static_cast<std::size_t>(dofs) * 16);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const ElementMatrix ke = q1_element_stiffness(coeffs.at(i, j));
      const std::array<int, 4> nodes{id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) trip.emplace_back(nodes[a], nodes[b], ke[a][b]);
    }
  }
  std::sort(trip.begin(), trip.end(), [](const auto& l, const auto& r) {
    return std::tie(std::get<0>(l), std::get<1>(l)) < std::tie(std::get<0>(r), std::get<1>(r));
  });

  std::vector<int> row_ptr(static_cast<std::size_t>(dofs) + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  for (std::size_t k = 0; k < trip.size();) {
    const auto [r, c, _] = trip[k];
    double s = 0.0;
    while (k < trip.size() && std::get<0>(trip[k]) == r && std::get<1>(trip[k]) == c) s += std::get<2>(trip[k++]);
    cols.push_back(c);
    vals.push_back(s);
    row_ptr[static_cast<std::size_t>(r) + 1] = static_cast<int>(cols.size());
  }
  for (int r = 0; r < dofs; ++r)
    row_ptr[static_cast<std::size_t>(r) + 1] =
        std::max(row_ptr[static_cast<std::size_t>(r) + 1], row_ptr[static_cast<std::size_t>(r)]);

  SparseSystem sys;
  sys.matrix = CsrMatrix(dofs, std::move(row_ptr), std::move(cols), std::move(vals));
  sys.rhs.assign(static_cast<std::size_t>(dofs), 0.0);
  return sys;
}

std::vector<double> assemble_load(const Lattice& lat, const SourceFn& f) {
  std::vector<double> b(static_cast<std::size_t>(lat.num_nodes()), 0.0);
  const double quarter_area = 0.25 * lat.h * lat.h;
  for (int j = 0; j < lat.ny; ++j) {
    for (int i = 0; i < lat.nx; ++i) {
      const Point mid{(lat.i0 + i + 0.5) * lat.h, (lat.j0 + j + 0.5) * lat.h};
      const double w = f(mid) * quarter_area;
      for (int node : cell_nodes(lat, i, j)) b[static_cast<std::size_t>(node)] += w;
    }
  }
  return b;
}

void apply_dirichlet(SparseSystem& sys, std::span<const int> nodes, std::span<const double> values) {
  if (nodes.size() != values.size()) throw InvalidArgument("apply_dirichlet: nodes and values differ in length");
  const int n = sys.dimension();
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  std::vector<double> g(static_cast<std::size_t>(n), 0.0);
  for (int c : sys.constrained) fixed[static_cast<std::size_t>(c)] = 1;
  for (std::size_t k = 0; k < sys.constrained.size(); ++k)
    g[static_cast<std::size_t>(sys.constrained[k])] = sys.constrained_values[k];

  std::vector<char> fresh(static_cast<std::size_t>(n), 0);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const int c = nodes[k];
    if (c < 0 || c >= n) throw InvalidArgument("apply_dirichlet: node id " + std::to_string(c) + " out of range");
    const auto cu = static_cast<std::size_t>(c);
    if ((fixed[cu] || fresh[cu]) && g[cu] != values[k])
      throw InvalidArgument("apply_dirichlet: conflicting values for node " + std::to_string(c));
    if (!fixed[cu]) fresh[cu] = 1;
    g[cu] = values[k];
  }

  const auto& rp = sys.matrix.row_ptr();
  const auto& ci = sys.matrix.cols();
  auto& v = sys.matrix.vals();
  for (int r = 0; r < n; ++r) {
    const auto ru = static_cast<std::size_t>(r);
    if (fresh[ru]) {
      for (int k = rp[ru]; k < rp[ru + 1]; ++k) v[static_cast<std::size_t>(k)] = (ci[static_cast<std::size_t>(k)] == r);
      sys.rhs[ru] = g[ru];
      continue;
    }
    if (fixed[ru]) continue;
    for (int k = rp[ru]; k < rp[ru + 1]; ++k) {
      const auto cu = static_cast<std::size_t>(ci[static_cast<std::size_t>(k)]);
      if (fresh[cu]) {
        sys.rhs[ru] -= v[static_cast<std::size_t>(k)] * g[cu];
        v[static_cast<std::size_t>(k)] = 0.0;
      }
    }
  }

  for (int r = 0; r < n; ++r) {
    const auto ru = static_cast<std::size_t>(r);
    if (fresh[ru]) fixed[ru] = 1;
  }
  sys.constrained.clear();
  sys.constrained_values.clear();
  for (int r = 0; r < n; ++r) {
    if (fixed[static_cast<std::size_t>(r)]) {
      sys.constrained.push_back(r);
      sys.constrained_values.push_back(g[static_cast<std::size_t>(r)]);
    }
  }
}

// ---------------------------------------------------------------------------
// Conjugate gradients

int default_max_iterations(int n) { return static_cast<int>(20.0 * std::sqrt(static_cast<double>(n))) + 2000; }

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

SolveResult solve_spd(const SparseSystem& sys, double rel_tol, int max_iter) {
  const int n = sys.dimension();
  if (sys.rhs.size() != static_cast<std::size_t>(n)) throw InvalidArgument("solve_spd: rhs size mismatch");
  if (max_iter < 0) max_iter = default_max_iterations(n);

  SolveResult out;
  out.x.assign(static_cast<std::size_t>(n), 0.0);
  const double bnorm = std::sqrt(dot(sys.rhs, sys.rhs));
  if (bnorm == 0.0) return out;

  std::vector<double> inv_diag = sys.matrix.diagonal();
  for (std::size_t k = 0; k < inv_diag.size(); ++k) {
    if (!(inv_diag[k] > 0.0))
      throw SolverError("solve_spd: non-positive diagonal at row " + std::to_string(k), 1.0, 0);
    inv_diag[k] = 1.0 / inv_diag[k];
  }

  std::vector<double> r = sys.rhs, z(r.size()), p(r.size()), q(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) z[k] = inv_diag[k] * r[k];
  p = z;
  double rz = dot(r, z);
  double res = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    sys.matrix.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) throw SolverError("solve_spd: matrix is not positive definite", res, it);
    const double alpha = rz / pq;
    for (std::size_t k = 0; k < r.size(); ++k) {
      out.x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    res = std::sqrt(dot(r, r)) / bnorm;
    if (res <= rel_tol) {
      out.iterations = it;
      out.residual = res;
      return out;
    }
    for (std::size_t k = 0; k < r.size(); ++k) z[k] = inv_diag[k] * r[k];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < r.size(); ++k) p[k] = z[k] + beta * p[k];
  }
  throw SolverError("solve_spd: no convergence after " + std::to_string(max_iter) +
                        " iterations, relative residual " + std::to_string(res),
                    res, max_iter);
}

// ---------------------------------------------------------------------------
// Sparse Cholesky

struct SparseCholesky::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
};

SparseCholesky::SparseCholesky(const CsrMatrix& a) : impl_(std::make_unique<Impl>()) {
  using RowMajor = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
  const Eigen::Map<const RowMajor> view(a.rows(), a.rows(), static_cast<Eigen::Index>(a.nnz()),
                                        a.row_ptr().data(), a.cols().data(), a.vals().data());
  const Eigen::SparseMatrix<double> col_major = view;
  impl_->ldlt.compute(col_major);
  if (impl_->ldlt.info() != Eigen::Success)
    throw SingularMatrixError("sparse LDL^T factorization failed", 0, 0.0);
}

SparseCholesky::~SparseCholesky() = default;
SparseCholesky::SparseCholesky(SparseCholesky&&) noexcept = default;
SparseCholesky& SparseCholesky::operator=(SparseCholesky&&) noexcept = default;

std::vector<double> SparseCholesky::solve(std::span<const double> rhs) const {
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  const Eigen::VectorXd x = impl_->ldlt.solve(b);
  return {x.data(), x.data() + x.size()};
}

// ---------------------------------------------------------------------------
// Dense

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = 1.0;
  return m;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) y[static_cast<std::size_t>(r)] += (*this)(r, c) * x[static_cast<std::size_t>(c)];
  return y;
}

double DenseMatrix::norm1() const {
  double best = 0.0;
  for (int c = 0; c < cols_; ++c) {
    double s = 0.0;
    for (int r = 0; r < rows_; ++r) s += std::abs((*this)(r, c));
    best = std::max(best, s);
  }
  return best;
}

namespace {

void check_dense(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("dense solve needs a square matrix");
  if (a.rows() == 0) throw InvalidArgument("dense solve needs a non-empty matrix");
  if (a.rows() > kDenseCap)
    throw InvalidArgument("dense system of size " + std::to_string(a.rows()) + " exceeds the cap " +
                          std::to_string(kDenseCap));
}

}  // namespace

DenseLU::DenseLU(DenseMatrix a) : lu_(std::move(a)) {
  check_dense(lu_);
  const int n = lu_.rows();
  const double anorm = lu_.norm1();
  perm_.resize(static_cast<std::size_t>(n));
  std::iota(perm_.begin(), perm_.end(), 0);
  const double tiny = n * std::numeric_limits<double>::epsilon() * anorm;

  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int r = k + 1; r < n; ++r)
      if (std::abs(lu_(r, k)) > std::abs(lu_(piv, k))) piv = r;
    if (!(std::abs(lu_(piv, k)) > tiny))
      throw SingularMatrixError("dense LU: matrix is singular to working precision at pivot " + std::to_string(k),
                                static_cast<std::size_t>(k), 0.0);
    if (piv != k) {
      for (int c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(piv, c));
      std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(piv)]);
    }
    for (int r = k + 1; r < n; ++r) {
      const double l = lu_(r, k) / lu_(k, k);
      lu_(r, k) = l;
      if (l != 0.0)
        for (int c = k + 1; c < n; ++c) lu_(r, c) -= l * lu_(k, c);
    }
  }

  // Hager's estimate of ||A^{-1}||_1.
  std::vector<double> x(static_cast<std::size_t>(n), 1.0 / n);
  double est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const std::vector<double> y = solve(x);
    double ynorm = 0.0;
    std::vector<double> sgn(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      ynorm += std::abs(y[static_cast<std::size_t>(k)]);
      sgn[static_cast<std::size_t>(k)] = y[static_cast<std::size_t>(k)] >= 0.0 ? 1.0 : -1.0;
    }
    est = std::max(est, ynorm);
    const std::vector<double> z = solve_transpose(sgn);
    int jmax = 0;
    double zx = 0.0;
    for (int k = 0; k < n; ++k) {
      zx += z[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
      if (std::abs(z[static_cast<std::size_t>(k)]) > std::abs(z[static_cast<std::size_t>(jmax)])) jmax = k;
    }
    if (std::abs(z[static_cast<std::size_t>(jmax)]) <= zx) break;
    std::fill(x.begin(), x.end(), 0.0);
    x[static_cast<std::size_t>(jmax)] = 1.0;
  }
  rcond_ = (anorm > 0.0 && est > 0.0) ? 1.0 / (anorm * est) : 0.0;
}

std::vector<double> DenseLU::solve(std::span<const double> rhs) const {
  const int n = lu_.rows();
  if (rhs.size() != static_cast<std::size_t>(n)) throw InvalidArgument("DenseLU::solve: rhs size mismatch");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] = rhs[static_cast<std::size_t>(perm_[static_cast<std::size_t>(k)])];
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < r; ++c) x[static_cast<std::size_t>(r)] -= lu_(r, c) * x[static_cast<std::size_t>(c)];
  for (int r = n - 1; r >= 0; --r) {
    for (int c = r + 1; c < n; ++c) x[static_cast<std::size_t>(r)] -= lu_(r, c) * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(r)] /= lu_(r, r);
  }
  return x;
}

std::vector<double> DenseLU::solve_transpose(std::span<const double> rhs) const {
  // A^T = U^T L^T P.
  const int n = lu_.rows();
  std::vector<double> w(rhs.begin(), rhs.end());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < r; ++c) w[static_cast<std::size_t>(r)] -= lu_(c, r) * w[static_cast<std::size_t>(c)];
    w[static_cast<std::size_t>(r)] /= lu_(r, r);
  }
  for (int r = n - 1; r >= 0; --r)
    for (int c = r + 1; c < n; ++c) w[static_cast<std::size_t>(r)] -= lu_(c, r) * w[static_cast<std::size_t>(c)];
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(perm_[static_cast<std::size_t>(k)])] = w[static_cast<std::size_t>(k)];
  return x;
}

DenseSolveResult solve_dense(const DenseMatrix& a, std::span<const double> rhs) {
  const DenseLU lu(a);
  return {lu.solve(rhs), lu.rcond()};
}

DenseSolveResult solve_dense_spd(const DenseMatrix& a, std::span<const double> rhs) {
  check_dense(a);
  const int n = a.rows();
  if (rhs.size() != static_cast<std::size_t>(n)) throw InvalidArgument("solve_dense_spd: rhs size mismatch");

  DenseMatrix l = a;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double max_pivot = 0.0;
  for (int k = 0; k < n; ++k) max_pivot = std::max(max_pivot, a(k, k));
  const double tiny = n * std::numeric_limits<double>::epsilon() * max_pivot;
  double min_pivot = std::numeric_limits<double>::infinity();

  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int r = k + 1; r < n; ++r)
      if (l(r, r) > l(piv, piv)) piv = r;
    if (!(l(piv, piv) > tiny))
      throw SingularMatrixError("dense pivoted Cholesky: matrix is not positive definite at pivot " +
                                    std::to_string(k) + " (rcond " + std::to_string(min_pivot / max_pivot) + ")",
                                static_cast<std::size_t>(k), std::isfinite(min_pivot) ? min_pivot / max_pivot : 0.0);
    if (piv != k) {
      for (int c = 0; c < n; ++c) std::swap(l(k, c), l(piv, c));
      for (int r = 0; r < n; ++r) std::swap(l(r, k), l(r, piv));
      std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(piv)]);
    }
    const double d = l(k, k);
    min_pivot = std::min(min_pivot, d);
    const double s = std::sqrt(d);
    l(k, k) = s;
    for (int r = k + 1; r < n; ++r) l(r, k) /= s;
    // Full symmetric update of the trailing block so later swaps stay valid.
    for (int c = k + 1; c < n; ++c)
      for (int r = k + 1; r < n; ++r) l(r, c) -= l(r, k) * l(c, k);
    for (int c = k + 1; c < n; ++c) l(k, c) = 0.0;
  }

  // P A P^T = L L^T.
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) y[static_cast<std::size_t>(k)] = rhs[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < r; ++c) y[static_cast<std::size_t>(r)] -= l(r, c) * y[static_cast<std::size_t>(c)];
    y[static_cast<std::size_t>(r)] /= l(r, r);
  }
  for (int r = n - 1; r >= 0; --r) {
    for (int c = r + 1; c < n; ++c) y[static_cast<std::size_t>(r)] -= l(c, r) * y[static_cast<std::size_t>(c)];
    y[static_cast<std::size_t>(r)] /= l(r, r);
  }
  DenseSolveResult out;
  out.x.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.x[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = y[static_cast<std::size_t>(k)];
  out.rcond = min_pivot / max_pivot;
  return out;
}

// ---------------------------------------------------------------------------

double energy_inner(const Lattice& lat, const CellCoefficients& coeffs, std::span<const double> u,
                    std::span<const double> v) {
  check_coverage(lat, coeffs);
  if (u.size() != static_cast<std::size_t>(lat.num_nodes()) || v.size() != u.size())
    throw InvalidArgument("energy_inner: nodal vector size does not match the lattice");
  double total = 0.0;
  for (int j = 0; j < lat.ny; ++j) {
    for (int i = 0; i < lat.nx; ++i) {
      const ElementMatrix ke = q1_element_stiffness(coeffs.at(lat.i0 + i, lat.j0 + j));
      const auto nodes = cell_nodes(lat, i, j);
      for (int a = 0; a < 4; ++a) {
        double row = 0.0;
        for (int b = 0; b < 4; ++b) row += ke[a][b] * v[static_cast<std::size_t>(nodes[b])];
        total += u[static_cast<std::size_t>(nodes[a])] * row;
      }
    }
  }
  return total;
}

FineSolve solve_dirichlet_zero(const Lattice& lat, const CellCoefficients& coeffs, const SourceFn& f,
                               double rel_tol) {
  SparseSystem sys = assemble_stiffness(lat, coeffs);
  sys.rhs = assemble_load(lat, f);
  std::vector<int> boundary;
  for (int j = 0; j <= lat.ny; ++j)
    for (int i = 0; i <= lat.nx; ++i)
      if (i == 0 || j == 0 || i == lat.nx || j == lat.ny) boundary.push_back(lat.node(i, j));
  const std::vector<double> zeros(boundary.size(), 0.0);
  apply_dirichlet(sys, boundary, zeros);
  SolveResult res = solve_spd(sys, rel_tol);
  return {FineFunction(lat, std::move(res.x)), res.iterations};
}

}  // namespace msfem
