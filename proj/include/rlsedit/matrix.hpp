#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rlsedit/errors.hpp"

namespace rlsedit {

/// Dense real matrix, row-major. All reductions in this file accumulate
/// left-to-right in index order, so results are bit-reproducible for a
/// given input regardless of build flags that might otherwise reorder work.
class Matrix {
public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw ShapeMismatch("matrix data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(rows_) + "x" +
                          std::to_string(cols_));
    require_finite();
  }

  Matrix(std::initializer_list<std::initializer_list<double>> rows)
      : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ShapeMismatch("ragged initializer rows");
      data_.insert(data_.end(), r.begin(), r.end());
    }
    require_finite();
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool is_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double trace() const {
    if (rows_ != cols_) throw NotSquare("trace of non-square matrix");
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, i);
    return s;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o, "+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o, "-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }

  Matrix& operator*=(double c) {
    for (double& v : data_) v *= c;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double c) { return a *= c; }
  friend Matrix operator*(double c, Matrix a) { return a *= c; }

  /// C = A * B with ikj loop order; each C(i,j) still accumulates over k
  /// in ascending order, identical to the textbook triple loop.
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_)
      throw ShapeMismatch("matmul " + shape_str(a) + " x " + shape_str(b));
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      double* ci = c.data_.data() + i * c.cols_;
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        const double* bk = b.data_.data() + k * b.cols_;
        for (std::size_t j = 0; j < b.cols_; ++j) ci[j] += aik * bk[j];
      }
    }
    return c;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

private:
  static std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows_) + "x" + std::to_string(m.cols_);
  }

  void require_same_shape(const Matrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw ShapeMismatch(std::string("shape mismatch in ") + op + ": " +
                          shape_str(*this) + " vs " + shape_str(o));
  }

  void require_finite() const {
    if (!is_finite()) throw NumericError("non-finite matrix entry");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// AᵀB accumulated over the shared row index in ascending order.
inline Matrix transpose_times(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw ShapeMismatch("transpose_times: row counts differ");
  Matrix c(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto ar = a.row(r);
    const auto br = b.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ai = ar[i];
      double* ci = &c(i, 0);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += ai * br[j];
    }
  }
  return c;
}

/// ABᵀ.
inline Matrix times_transpose(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw ShapeMismatch("times_transpose: column counts differ");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ai = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto bj = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += ai[k] * bj[k];
      c(i, j) = s;
    }
  }
  return c;
}

/// AᵀA. Only the upper triangle is accumulated (rows ascending, same order
/// as transpose_times) and mirrored, which is exact since IEEE products
/// commute.
inline Matrix gram(const Matrix& a) {
  const std::size_t n = a.cols();
  Matrix g(n, n);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto ar = a.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      const double ai = ar[i];
      double* gi = &g(i, 0);
      for (std::size_t j = i; j < n; ++j) gi[j] += ai * ar[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

/// Rows of a followed by rows of b.
inline Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ShapeMismatch("vstack: column counts differ");
  Matrix c(a.rows() + b.rows(), a.cols());
  std::copy(a.data().begin(), a.data().end(), c.data().begin());
  std::copy(b.data().begin(), b.data().end(),
            c.data().begin() + static_cast<std::ptrdiff_t>(a.size()));
  return c;
}

/// A += c * I.
inline void add_scaled_identity(Matrix& a, double c) {
  if (a.rows() != a.cols()) throw NotSquare("add_scaled_identity");
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += c;
}

/// A <- (A + Aᵀ)/2. Exact no-op on symmetric input.
inline void symmetrize(Matrix& a) {
  if (a.rows() != a.cols()) throw NotSquare("symmetrize");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
}

/// Square upper-triangular factor. Strictly-lower entries are exactly zero;
/// factors produced by cholesky() have strictly positive diagonals.
class UpperTriangular {
public:
  UpperTriangular() = default;

  explicit UpperTriangular(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

  /// Validates the strict-zero lower triangle instead of silently clearing it.
  static UpperTriangular from_dense(const Matrix& m) {
    if (m.rows() != m.cols()) throw NotSquare("UpperTriangular::from_dense");
    UpperTriangular r(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (j < i && m(i, j) != 0.0)
          throw ShapeMismatch("nonzero entry below the diagonal");
        r.data_[i * r.dim_ + j] = m(i, j);
      }
    return r;
  }

  std::size_t dim() const { return dim_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  void set(std::size_t i, std::size_t j, double v) {
    if (j < i) throw ShapeMismatch("write below the diagonal");
    data_[i * dim_ + j] = v;
  }

  /// Mutable row; callers must only touch columns >= i.
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  Matrix to_matrix() const {
    Matrix m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  friend bool operator==(const UpperTriangular& a, const UpperTriangular& b) {
    return a.dim_ == b.dim_ && a.data_ == b.data_;
  }

private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

} // namespace rlsedit
