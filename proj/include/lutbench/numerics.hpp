#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lutbench {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    Matrix transposed() const;

    /// Row subset in the given order.
    Matrix select_rows(std::span<const std::size_t> indices) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
std::vector<double> multiply(const Matrix& a, std::span<const double> x);

/// Largest |a_ij - b_ij|.
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& a);

/// Lower Cholesky factor L with L * L^T = A.
///
/// Throws NotPositiveDefinite when a pivot is <= 0; the caller is expected to
/// add diagonal jitter and retry. Throws DimensionMismatch for non-square or
/// non-symmetric (1e-12 relative) input.
Matrix cholesky(const Matrix& a);

/// Solves (L L^T) x = b given the factor from `cholesky`.
std::vector<double> solve_cholesky(const Matrix& lower, std::span<const double> b);

/// In-place forward substitution L y = b.
void solve_lower_inplace(const Matrix& lower, std::span<double> b);
/// In-place back substitution L^T x = y.
void solve_lower_transposed_inplace(const Matrix& lower, std::span<double> b);

/// Inverse of L L^T from its Cholesky factor (full symmetric matrix).
Matrix cholesky_inverse(const Matrix& lower);

/// log det(L L^T) = 2 sum log L_ii.
double cholesky_log_det(const Matrix& lower);

struct SymEigen {
    std::vector<double> values;  ///< descending
    Matrix vectors;              ///< column j is the eigenvector of values[j]
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
/// Throws NoConvergence after `max_sweeps` sweeps.
SymEigen sym_eigen(const Matrix& a, int max_sweeps = 100);

/// Solves A x = b with partial pivoting. Throws Singular when a pivot falls
/// below 1e-13 * max|A|.
std::vector<double> solve_linear(const Matrix& a, std::span<const double> b);

/// Same as `solve_linear` on an n x n row-major scratch buffer; both `a` and `b`
/// are overwritten, the solution is left in `b`. Allocation-free, used by the
/// hot barycentric paths.
void solve_linear_inplace(std::span<double> a, std::span<double> b, std::size_t n);

/// Determinant of an n x n row-major scratch buffer (overwritten).
double determinant_inplace(std::span<double> a, std::size_t n);

}  // namespace lutbench
