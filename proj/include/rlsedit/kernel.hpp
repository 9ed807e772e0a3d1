#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "rlsedit/matrix.hpp"

namespace rlsedit {

inline constexpr double kSymmetryTol = 1e-12;  // relative to max |entry|
inline constexpr double kPivotTol = 1e-12;     // relative to max diagonal entry
inline constexpr double kDiagFloor = 1e-300;   // triangular-solve singularity cutoff

/// Upper Cholesky factor R with RᵀR = A.
///
/// A must be square and symmetric to within kSymmetryTol relative to
/// max|A|; small asymmetry is folded away by averaging with the transpose.
/// A pivot at or below kPivotTol times the largest diagonal entry is treated
/// as loss of positive definiteness rather than ground through.
inline UpperTriangular cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw NotSquare("cholesky: matrix is not square");

  const double scale = a.max_abs();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > kSymmetryTol * scale)
        throw NotSymmetric("cholesky: asymmetry above tolerance");

  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
  if (n > 0 && max_diag <= 0.0)
    throw NotPositiveDefinite("cholesky: no positive diagonal entry");

  UpperTriangular r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double pivot = a(i, i);
    for (std::size_t k = 0; k < i; ++k) pivot -= r(k, i) * r(k, i);
    if (pivot <= kPivotTol * max_diag)
      throw NotPositiveDefinite("cholesky: pivot below tolerance at row " +
                                std::to_string(i));
    const double rii = std::sqrt(pivot);
    r.set(i, i, rii);
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.5 * (a(i, j) + a(j, i));
      for (std::size_t k = 0; k < i; ++k) s -= r(k, i) * r(k, j);
      r.set(i, j, s / rii);
    }
  }
  return r;
}

enum class Side {
  Upper,           // solve R X = B
  LowerTranspose,  // solve Rᵀ X = B
};

/// Triangular solve against all columns of B at once.
inline Matrix solve_triangular(const UpperTriangular& r, const Matrix& b, Side side) {
  const std::size_t n = r.dim();
  if (b.rows() != n) throw ShapeMismatch("solve_triangular: row count mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(r(i, i)) < kDiagFloor)
      throw SingularFactor("solve_triangular: zero diagonal at row " +
                           std::to_string(i));

  const std::size_t m = b.cols();
  Matrix x = b;
  if (side == Side::Upper) {
    for (std::size_t ii = n; ii-- > 0;) {
      auto xi = x.row(ii);
      for (std::size_t k = ii + 1; k < n; ++k) {
        const double rik = r(ii, k);
        if (rik == 0.0) continue;
        const auto xk = x.row(k);
        for (std::size_t j = 0; j < m; ++j) xi[j] -= rik * xk[j];
      }
      const double d = r(ii, ii);
      for (std::size_t j = 0; j < m; ++j) xi[j] /= d;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      auto xi = x.row(i);
      for (std::size_t k = 0; k < i; ++k) {
        const double rki = r(k, i);
        if (rki == 0.0) continue;
        const auto xk = x.row(k);
        for (std::size_t j = 0; j < m; ++j) xi[j] -= rki * xk[j];
      }
      const double d = r(i, i);
      for (std::size_t j = 0; j < m; ++j) xi[j] /= d;
    }
  }
  return x;
}

/// X with A X = B for symmetric positive definite A.
inline Matrix spd_solve(const Matrix& a, const Matrix& b) {
  const UpperTriangular r = cholesky(a);
  Matrix z = solve_triangular(r, b, Side::LowerTranspose);
  return solve_triangular(r, z, Side::Upper);
}

struct SymEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // eigenvector i in column i, matching values[i]
};

/// Cyclic Jacobi eigensolver for symmetric matrices. Sweeps the strict upper
/// triangle in row order until the off-diagonal mass is negligible. Fully
/// deterministic: fixed sweep order, no pivot search.
inline SymEigen jacobi_eigen(Matrix a, bool want_vectors = true) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw NotSquare("jacobi_eigen");
  symmetrize(a);

  Matrix v = want_vectors ? Matrix::identity(n) : Matrix();
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    double diag = 0.0;
    for (std::size_t p = 0; p < n; ++p) diag += a(p, p) * a(p, p);
    if (off <= 1e-30 * (diag + off) || off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Skip rotations that cannot change anything at double precision.
        if (std::abs(apq) < 1e-300) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0)
                             ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                             : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

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
        if (want_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  SymEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return out.values[x] < out.values[y];
  });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = out.values[order[i]];
  out.values = std::move(sorted);
  if (want_vectors) {
    out.vectors = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) out.vectors(k, i) = v(k, order[i]);
  }
  return out;
}

/// (sigma_max, sigma_min) of A, where sigma_min ranges over the
/// min(rows, cols) singular values. Computed from the smaller Gram matrix.
inline std::pair<double, double> singular_extremes(const Matrix& a) {
  if (a.empty()) throw ShapeMismatch("singular_extremes: empty matrix");
  const Matrix g = (a.rows() >= a.cols()) ? gram(a) : gram(a.transpose());
  const SymEigen eig = jacobi_eigen(g, /*want_vectors=*/false);
  const double lo = std::max(0.0, eig.values.front());
  const double hi = std::max(0.0, eig.values.back());
  return {std::sqrt(hi), std::sqrt(lo)};
}

/// Spectral norm via the Gram route; exact enough at desk scale.
inline double spectral_norm(const Matrix& a) {
  if (a.empty()) return 0.0;
  return singular_extremes(a).first;
}

} // namespace rlsedit
