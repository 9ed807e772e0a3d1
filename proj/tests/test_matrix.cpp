#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "rlsedit/io.hpp"
#include "rlsedit/kernel.hpp"
#include "rlsedit/matrix.hpp"

using namespace rlsedit;

namespace {

Matrix reconstruct(const UpperTriangular& r) {
  const Matrix d = r.to_matrix();
  return transpose_times(d, d);
}

} // namespace

TEST(Matrix, ConstructionValidatesShapeAndFiniteness) {
  EXPECT_THROW(Matrix(2, 2, {1.0, 2.0, 3.0}), ShapeMismatch);
  EXPECT_THROW(Matrix(1, 2, {1.0, std::numeric_limits<double>::infinity()}),
               NumericError);
  EXPECT_THROW(Matrix({{1.0, 2.0}, {3.0}}), ShapeMismatch);
  const Matrix m({{1.0, 2.0}, {3.0, 4.0}});
  EXPECT_EQ(m(1, 0), 3.0);
}

TEST(Matrix, ProductsMatchHandValues) {
  const Matrix a({{1.0, 2.0}, {3.0, 4.0}});
  const Matrix b({{5.0, 6.0}, {7.0, 8.0}});
  const Matrix ab = a * b;
  EXPECT_EQ(ab, Matrix({{19.0, 22.0}, {43.0, 50.0}}));
  EXPECT_EQ(transpose_times(a, b), a.transpose() * b);
  EXPECT_EQ(times_transpose(a, b), a * b.transpose());
  EXPECT_EQ(gram(a), a.transpose() * a);
}

TEST(Cholesky, IdentityMapsToIdentity) {
  const UpperTriangular r = cholesky(Matrix::identity(2));
  EXPECT_EQ(r.to_matrix(), Matrix::identity(2));
}

TEST(Cholesky, HandFactorOf2x2) {
  const UpperTriangular r = cholesky(Matrix({{4.0, 2.0}, {2.0, 3.0}}));
  EXPECT_DOUBLE_EQ(r(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(r(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(r(1, 1), std::sqrt(2.0));
  EXPECT_EQ(r(1, 0), 0.0);
}

TEST(Cholesky, ReconstructsRandomSpd) {
  auto rng = oracle::make_rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = oracle::random_spd(rng, 8);
    const Matrix back = reconstruct(cholesky(a));
    EXPECT_LE((back - a).frobenius_norm(), 1e-12 * a.frobenius_norm());
  }
}

TEST(Cholesky, RejectsBadInputs) {
  EXPECT_THROW(cholesky(Matrix(2, 3)), NotSquare);
  EXPECT_THROW(cholesky(Matrix({{1.0, 5.0}, {0.0, 1.0}})), NotSymmetric);
  // Indefinite: eigenvalues 3 and -1.
  EXPECT_THROW(cholesky(Matrix({{1.0, 2.0}, {2.0, 1.0}})), NotPositiveDefinite);
  // Semidefinite: pivot collapses to ~0 in the second row.
  EXPECT_THROW(cholesky(Matrix({{1.0, 1.0}, {1.0, 1.0}})), NotPositiveDefinite);
  EXPECT_THROW(cholesky(Matrix(2, 2)), NotPositiveDefinite);
}

TEST(SolveTriangular, IdentityPassesThrough) {
  const UpperTriangular r = cholesky(Matrix::identity(3));
  auto rng = oracle::make_rng(2);
  const Matrix b = oracle::random_matrix(rng, 3, 4);
  EXPECT_EQ(solve_triangular(r, b, Side::Upper), b);
  EXPECT_EQ(solve_triangular(r, b, Side::LowerTranspose), b);
}

TEST(SolveTriangular, HandBackSubstitution) {
  const UpperTriangular r =
      UpperTriangular::from_dense(Matrix({{2.0, 1.0}, {0.0, std::sqrt(2.0)}}));
  const Matrix x = solve_triangular(r, Matrix({{3.0}, {std::sqrt(2.0)}}), Side::Upper);
  EXPECT_NEAR(x(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(x(1, 0), 1.0, 1e-15);
}

TEST(SolveTriangular, RandomResidualWithinTolerance) {
  auto rng = oracle::make_rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const UpperTriangular r = cholesky(oracle::random_spd(rng, 16));
    const Matrix b = oracle::random_matrix(rng, 16, 3);
    const Matrix xu = solve_triangular(r, b, Side::Upper);
    EXPECT_LE((r.to_matrix() * xu - b).frobenius_norm(),
              1e-12 * b.frobenius_norm());
    const Matrix xl = solve_triangular(r, b, Side::LowerTranspose);
    EXPECT_LE((r.to_matrix().transpose() * xl - b).frobenius_norm(),
              1e-12 * b.frobenius_norm());
  }
}

TEST(SolveTriangular, SingularDiagonalRejected) {
  UpperTriangular r(2);
  r.set(0, 0, 1.0);
  r.set(1, 1, 0.0);
  EXPECT_THROW(solve_triangular(r, Matrix(2, 1), Side::Upper), SingularFactor);
}

TEST(SpdSolve, TrivialCases) {
  auto rng = oracle::make_rng(4);
  const Matrix b = oracle::random_matrix(rng, 3, 2);
  EXPECT_LE((spd_solve(Matrix::identity(3), b) - b).frobenius_norm(), 1e-15);
  const Matrix x = spd_solve(Matrix({{2.0}}), Matrix({{1.0}}));
  EXPECT_DOUBLE_EQ(x(0, 0), 0.5);
}

TEST(SpdSolve, RandomResidual) {
  auto rng = oracle::make_rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix a = oracle::random_spd(rng, 32);
    const Matrix b = oracle::random_matrix(rng, 32, 4);
    const Matrix x = spd_solve(a, b);
    EXPECT_LE((a * x - b).frobenius_norm(), 1e-10 * (1.0 + b.frobenius_norm()));
  }
}

TEST(JacobiEigen, EigenpairsSatisfyDefinition) {
  auto rng = oracle::make_rng(6);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix a = oracle::random_matrix(rng, 7, 7);
    symmetrize(a);
    const SymEigen eig = jacobi_eigen(a);
    for (std::size_t i = 0; i < 7; ++i) {
      Matrix v(7, 1);
      for (std::size_t k = 0; k < 7; ++k) v(k, 0) = eig.vectors(k, i);
      const Matrix resid = a * v - v * eig.values[i];
      EXPECT_LE(resid.frobenius_norm(), 1e-10 * (1.0 + std::abs(eig.values[i])));
    }
  }
}

TEST(SingularExtremes, TrivialCases) {
  const auto [hi_i, lo_i] = singular_extremes(Matrix::identity(3));
  EXPECT_NEAR(hi_i, 1.0, 1e-12);
  EXPECT_NEAR(lo_i, 1.0, 1e-12);
  const auto [hi_d, lo_d] = singular_extremes(Matrix({{3.0, 0.0}, {0.0, 1.0}}));
  EXPECT_NEAR(hi_d, 3.0, 1e-12);
  EXPECT_NEAR(lo_d, 1.0, 1e-12);
  EXPECT_THROW(singular_extremes(Matrix()), ShapeMismatch);
}

TEST(SingularExtremes, MatchesIndependentJacobiOracle) {
  auto rng = oracle::make_rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = oracle::random_matrix(rng, 8, 5);
    const auto [hi, lo] = singular_extremes(a);
    const auto evs = oracle::sym_eigenvalues(gram(a));
    EXPECT_NEAR(hi * hi, evs.back(), 1e-8 * std::abs(evs.back()));
    EXPECT_NEAR(lo * lo, evs.front(), 1e-8 * (1.0 + std::abs(evs.back())));
  }
}

TEST(SingularExtremes, ScalesLinearly) {
  auto rng = oracle::make_rng(8);
  for (double c : {0.5, 2.0, 117.0}) {
    const Matrix a = oracle::random_matrix(rng, 6, 4);
    const auto [hi, lo] = singular_extremes(a);
    const auto [chi, clo] = singular_extremes(a * c);
    EXPECT_NEAR(chi, c * hi, 1e-10 * c * hi);
    EXPECT_NEAR(clo, c * lo, 1e-10 * (1.0 + c * lo));
  }
}

TEST(MatrixFormat, RoundTripIsBitExact) {
  auto rng = oracle::make_rng(9);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix m = oracle::random_matrix(rng, 1 + rep % 5, 1 + rep % 7, 3.0);
    std::stringstream ss;
    io::write_matrix(ss, m);
    EXPECT_EQ(io::read_matrix(ss), m);
  }
}

TEST(MatrixFormat, RejectsCorruptHeaders) {
  const Matrix m({{1.0, 2.0}});
  std::stringstream good;
  io::write_matrix(good, m);
  const std::string bytes = good.str();

  std::stringstream bad_magic("XLSM" + bytes.substr(4));
  EXPECT_THROW(io::read_matrix(bad_magic), BadMagic);

  std::string wrong_version = bytes;
  wrong_version[4] = 9;
  std::stringstream bad_version(wrong_version);
  EXPECT_THROW(io::read_matrix(bad_version), VersionMismatch);

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(io::read_matrix(truncated), TruncatedFile);
}

TEST(UpperTriangular, FromDenseValidatesLowerZeros) {
  EXPECT_THROW(UpperTriangular::from_dense(Matrix({{1.0, 0.0}, {0.5, 1.0}})),
               ShapeMismatch);
  EXPECT_THROW(UpperTriangular::from_dense(Matrix(2, 3)), NotSquare);
}
