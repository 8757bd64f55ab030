#include "slrbf/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <string>

#include "slrbf/errors.hpp"

namespace slrbf {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

Eigen::Index as_index(std::size_t n) { return static_cast<Eigen::Index>(n); }

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw ArgumentError("DenseMatrix::multiply: dimension mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* row = data_.data() + i * cols_;
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Factorization cholesky(DenseMatrix a) {
  if (a.rows() != a.cols()) throw ArgumentError("cholesky: matrix is not square");
  const std::size_t n = a.rows();
  const double scale = a.max_abs();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * scale) {
        throw ArgumentError("cholesky: matrix is not symmetric at (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
      }
    }
  }

  Factorization f;
  f.kind_ = Factorization::Kind::Cholesky;
  f.n_ = n;
  f.factors_ = a.release();
  if (n == 0) return f;

  RowMap m(f.factors_.data(), as_index(n), as_index(n));
  Eigen::LLT<Eigen::Ref<RowMatrix>, Eigen::Lower> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(
        "cholesky: matrix is not positive definite; duplicate nodes or a shape parameter that is too small");
  }
  f.rcond_ = llt.rcond();
  return f;
}

Factorization lu(DenseMatrix a) {
  if (a.rows() != a.cols()) throw ArgumentError("lu: matrix is not square");
  const std::size_t n = a.rows();
  const double amax = a.max_abs();

  Factorization f;
  f.kind_ = Factorization::Kind::LU;
  f.n_ = n;
  f.factors_ = a.release();
  if (n == 0) return f;

  RowMap m(f.factors_.data(), as_index(n), as_index(n));
  Eigen::PartialPivLU<Eigen::Ref<RowMatrix>> plu(m);
  const double tol = 1e-14 * amax;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(f.factors_[i * n + i]) >= tol) || amax == 0.0) {
      throw SingularMatrix("lu: matrix is singular to working precision (pivot " + std::to_string(i) + ")");
    }
  }
  const auto& idx = plu.permutationP().indices();
  f.pivots_.assign(idx.data(), idx.data() + idx.size());
  f.rcond_ = plu.rcond();
  return f;
}

void Factorization::solve_in_place(std::span<double> b) const {
  if (b.size() != n_) throw ArgumentError("solve: dimension mismatch");
  if (n_ == 0) return;
  const Eigen::Index n = as_index(n_);
  ConstRowMap m(factors_.data(), n, n);
  VecMap x(b.data(), n);
  if (kind_ == Kind::Cholesky) {
    m.triangularView<Eigen::Lower>().solveInPlace(x);
    m.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return;
  }
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p(n);
  std::copy(pivots_.begin(), pivots_.end(), p.indices().data());
  x = p * x;
  m.triangularView<Eigen::UnitLower>().solveInPlace(x);
  m.triangularView<Eigen::Upper>().solveInPlace(x);
}

std::vector<double> Factorization::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

DenseMatrix Factorization::lower_factor() const {
  if (kind_ != Kind::Cholesky) throw ArgumentError("lower_factor: not a Cholesky factorization");
  DenseMatrix l(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) l(i, j) = factors_[i * n_ + j];
  }
  return l;
}

std::vector<double> solve(const Factorization& f, std::span<const double> b) { return f.solve(b); }

}  // namespace slrbf
