#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace slrbf {

/// Dense row-major matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Moves the storage out, leaving an empty matrix.
  std::vector<double> release() {
    rows_ = cols_ = 0;
    return std::move(data_);
  }

  std::vector<double> multiply(std::span<const double> x) const;
  double max_abs() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Reusable dense factorization, computed in place on the matrix storage.
/// Immutable once built, so concurrent solves against one factorization are
/// fine.
class Factorization {
 public:
  enum class Kind { Cholesky, LU };

  Factorization() = default;

  Kind kind() const { return kind_; }
  std::size_t size() const { return n_; }

  /// Overwrites b with the solution of A x = b.
  void solve_in_place(std::span<double> b) const;
  std::vector<double> solve(std::span<const double> b) const;

  /// Estimate of 1 / cond_1(A), computed when the factorization is built.
  double rcond() const { return rcond_; }

  /// Lower-triangular Cholesky factor (row-major n x n). Cholesky only.
  DenseMatrix lower_factor() const;

  friend Factorization cholesky(DenseMatrix a);
  friend Factorization lu(DenseMatrix a);

 private:
  Kind kind_ = Kind::Cholesky;
  std::size_t n_ = 0;
  double rcond_ = 1.0;
  std::vector<double> factors_;  // row-major: L (Cholesky) or unit-L and U (LU)
  std::vector<int> pivots_;      // row permutation P of P A = L U
};

/// Throws NotPositiveDefinite on a non-positive pivot and ArgumentError if A
/// is not symmetric to 1e-12 relative.
Factorization cholesky(DenseMatrix a);

/// Partial pivoting. Throws SingularMatrix when a pivot falls below
/// 1e-14 * max|A|.
Factorization lu(DenseMatrix a);

std::vector<double> solve(const Factorization& f, std::span<const double> b);

}  // namespace slrbf
