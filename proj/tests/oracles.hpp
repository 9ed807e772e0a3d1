// Test-side oracles, kept independent of the library implementations they
// check: a classical (largest-pivot) Jacobi eigensolver, a partial-pivoting
// Gaussian solver, and seeded matrix generators.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rlsedit/matrix.hpp"

namespace oracle {

using rlsedit::Matrix;

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows,
                            std::size_t cols, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

/// G ᵀG + I: comfortably SPD.
inline Matrix random_spd(std::mt19937_64& rng, std::size_t n) {
  const Matrix g = random_matrix(rng, n, n);
  Matrix a = rlsedit::gram(g);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0;
  return a;
}

/// Classical Jacobi: rotate away the largest off-diagonal element until all
/// are negligible. Different pivot strategy and code path from the library's
/// cyclic sweep. Returns eigenvalues ascending.
inline std::vector<double> sym_eigenvalues(Matrix a) {
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = 0.5 * (a(i, j) + a(j, i));

  for (int iter = 0; iter < 100000; ++iter) {
    std::size_t p = 0, q = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::abs(a(i, j)) > best) {
          best = std::abs(a(i, j));
          p = i;
          q = j;
        }
    if (n < 2 || best <= 1e-14 * (1.0 + a.max_abs())) break;

    const double theta = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (std::size_t k = 0; k < n; ++k) {
      const double akp = a(k, p);
      const double akq = a(k, q);
      a(k, p) = c * akp - s * akq;
      a(k, q) = s * akp + c * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double apk = a(p, k);
      const double aqk = a(q, k);
      a(p, k) = c * apk - s * aqk;
      a(q, k) = s * apk + c * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
  }
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = a(i, i);
  std::sort(vals.begin(), vals.end());
  return vals;
}

/// Dense solve with partial pivoting; throws on exact singularity.
inline Matrix gauss_solve(Matrix a, Matrix b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n) throw rlsedit::ShapeMismatch("gauss_solve");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (a(piv, col) == 0.0) throw rlsedit::SingularSystem("gauss_solve: singular");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(piv, j));
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      for (std::size_t j = 0; j < b.cols(); ++j) b(r, j) -= f * b(col, j);
    }
  }
  Matrix x(n, b.cols());
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = b(ii, j);
      for (std::size_t k = ii + 1; k < n; ++k) s -= a(ii, k) * x(k, j);
      x(ii, j) = s / a(ii, ii);
    }
  }
  return x;
}

inline double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).frobenius_norm() / (1.0 + want.frobenius_norm());
}

} // namespace oracle
