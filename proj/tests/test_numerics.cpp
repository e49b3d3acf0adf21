#include "lutbench/errors.hpp"
#include "lutbench/numerics.hpp"
#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lutbench;
using lutbench::testing::random_matrix;
using lutbench::testing::random_spd;

TEST(Cholesky, IdentityIsItsOwnFactor) {
    EXPECT_EQ(cholesky(Matrix::identity(3)), Matrix::identity(3));
}

TEST(Cholesky, TwoByTwoHandExpansion) {
    const Matrix l = cholesky({{4, 2}, {2, 3}});
    EXPECT_DOUBLE_EQ(l(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(l(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(l(1, 0), 1.0);
    EXPECT_NEAR(l(1, 1), std::sqrt(2.0), 1e-15);
}

TEST(Cholesky, IndefiniteMatrixThrows) {
    EXPECT_THROW(cholesky({{1, 2}, {2, 1}}), NotPositiveDefinite);
}

TEST(Cholesky, RejectsNonSquareAndAsymmetric) {
    EXPECT_THROW(cholesky(Matrix(2, 3)), DimensionMismatch);
    EXPECT_THROW(cholesky({{2, 1}, {0, 2}}), DimensionMismatch);
}

TEST(Cholesky, FactorReproducesRandomSpd) {
    for (std::size_t n = 1; n <= 20; ++n) {
        const Matrix a = random_spd(n, 100 + n);
        const Matrix l = cholesky(a);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_GT(l(i, i), 0.0);
            for (std::size_t j = i + 1; j < n; ++j) EXPECT_EQ(l(i, j), 0.0);
        }
        EXPECT_LE(max_abs_diff(multiply(l, l.transposed()), a), 1e-10 * max_abs(a));
    }
}

TEST(SolveCholesky, IdentityReturnsRhs) {
    const std::vector<double> b{1, 2, 3};
    EXPECT_EQ(solve_cholesky(Matrix::identity(3), b), b);
}

TEST(SolveCholesky, TwoByTwoAnalyticInverse) {
    // A^-1 = 1/8 [[3, -2], [-2, 4]]
    const auto x = solve_cholesky(cholesky({{4, 2}, {2, 3}}), std::vector<double>{1, 0});
    EXPECT_NEAR(x[0], 3.0 / 8.0, 1e-15);
    EXPECT_NEAR(x[1], -2.0 / 8.0, 1e-15);
}

TEST(SolveCholesky, LengthMismatchThrows) {
    EXPECT_THROW(solve_cholesky(Matrix::identity(3), std::vector<double>{1, 2}), DimensionMismatch);
}

TEST(SolveCholesky, RandomSpdRoundTrip) {
    for (std::size_t n = 1; n <= 20; ++n) {
        const Matrix a = random_spd(n, 200 + n);
        const Matrix bm = random_matrix(n, 1, 300 + n);
        const auto x = solve_cholesky(cholesky(a), bm.data());
        const auto ax = multiply(a, x);
        double bnorm = 0.0;
        double rnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            bnorm = std::max(bnorm, std::abs(bm.data()[i]));
            rnorm = std::max(rnorm, std::abs(ax[i] - bm.data()[i]));
        }
        EXPECT_LE(rnorm, 1e-8 * bnorm);
    }
}

TEST(CholeskyInverse, MatchesColumnSolves) {
    const Matrix a = random_spd(7, 5);
    const Matrix l = cholesky(a);
    const Matrix inv = cholesky_inverse(l);
    EXPECT_LE(max_abs_diff(multiply(a, inv), Matrix::identity(7)), 1e-12);
    EXPECT_NEAR(cholesky_log_det(l), std::log(determinant_inplace(Matrix(a).data(), 7)), 1e-10);
}

TEST(SymEigen, DiagonalSortsDescending) {
    const auto e = sym_eigen({{3, 0, 0}, {0, 1, 0}, {0, 0, 2}});
    ASSERT_EQ(e.values.size(), 3u);
    EXPECT_DOUBLE_EQ(e.values[0], 3.0);
    EXPECT_DOUBLE_EQ(e.values[1], 2.0);
    EXPECT_DOUBLE_EQ(e.values[2], 1.0);
}

TEST(SymEigen, TwoByTwoCharacteristicPolynomial) {
    const auto e = sym_eigen({{2, 1}, {1, 2}});
    EXPECT_NEAR(e.values[0], 3.0, 1e-14);
    EXPECT_NEAR(e.values[1], 1.0, 1e-14);
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(e.vectors(0, 0)), r, 1e-14);
    EXPECT_NEAR(e.vectors(0, 0), e.vectors(1, 0), 1e-14);
    EXPECT_NEAR(e.vectors(0, 1), -e.vectors(1, 1), 1e-14);
}

TEST(SymEigen, ZeroMatrix) {
    const auto e = sym_eigen(Matrix(4, 4));
    for (double v : e.values) EXPECT_EQ(v, 0.0);
}

TEST(SymEigen, RandomSymmetricReconstructionAndOrthonormality) {
    for (std::size_t n : {2u, 5u, 13u, 40u}) {
        Matrix a = random_matrix(n, n, 17 * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
        const auto e = sym_eigen(a);
        for (std::size_t i = 1; i < n; ++i) EXPECT_GE(e.values[i - 1], e.values[i]);
        const Matrix vtv = multiply(e.vectors.transposed(), e.vectors);
        EXPECT_LT(max_abs_diff(vtv, Matrix::identity(n)), 1e-10);
        Matrix vd = e.vectors;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) vd(i, j) *= e.values[j];
        EXPECT_LE(max_abs_diff(multiply(vd, e.vectors.transposed()), a), 1e-8 * max_abs(a));
    }
}

TEST(SolveLinear, IdentityReturnsRhs) {
    const std::vector<double> b{4, -1, 2.5};
    EXPECT_EQ(solve_linear(Matrix::identity(3), b), b);
}

TEST(SolveLinear, BackSubstitution) {
    const auto x = solve_linear({{1, 1}, {0, 1}}, std::vector<double>{3, 1});
    EXPECT_DOUBLE_EQ(x[0], 2.0);
    EXPECT_DOUBLE_EQ(x[1], 1.0);
}

TEST(SolveLinear, RankOneIsSingular) {
    EXPECT_THROW(solve_linear({{1, 1}, {1, 1}}, std::vector<double>{1, 1}), Singular);
}

TEST(SolveLinear, RandomWellConditionedSystems) {
    for (std::size_t n = 1; n <= 10; ++n) {
        Matrix a = random_matrix(n, n, 900 + n);
        for (std::size_t i = 0; i < n; ++i) a(i, i) += 3.0;  // diagonally dominant enough
        const Matrix b = random_matrix(n, 1, 950 + n);
        const auto x = solve_linear(a, b.data());
        const auto ax = multiply(a, x);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ax[i], b.data()[i], 1e-9 * (1.0 + std::abs(b.data()[i])));
    }
}

TEST(SolveLinear, NonSquareThrows) {
    EXPECT_THROW(solve_linear(Matrix(2, 3), std::vector<double>{1, 2}), DimensionMismatch);
}

TEST(MatrixBasics, ShapeAndSelection) {
    const Matrix m{{1, 2}, {3, 4}, {5, 6}};
    EXPECT_EQ(m.rows(), 3u);
    EXPECT_EQ(m.cols(), 2u);
    const std::size_t idx[] = {2, 0};
    EXPECT_EQ(m.select_rows(idx), (Matrix{{5, 6}, {1, 2}}));
    EXPECT_EQ(m.transposed(), (Matrix{{1, 3, 5}, {2, 4, 6}}));
    EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), DimensionMismatch);
}
