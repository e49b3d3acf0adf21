#include "lutbench/numerics.hpp"

#include "lutbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lutbench {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionMismatch("matrix data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionMismatch("ragged initializer list");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("multiply: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto o = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const auto br = b.row(k);
            for (std::size_t j = 0; j < br.size(); ++j) o[j] += aik * br[j];
        }
    }
    return out;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DimensionMismatch("multiply: vector length differs");
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * x[j];
        out[i] = s;
    }
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("max_abs_diff: shapes differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

Matrix cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionMismatch("cholesky: matrix is not square");
    const double scale = max_abs(a);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(a(i, j) - a(j, i)) > 1e-12 * scale)
                throw DimensionMismatch("cholesky: matrix is not symmetric");

    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* li = l.row(i).data();
        for (std::size_t j = 0; j <= i; ++j) {
            const double* lj = l.row(j).data();
            double s = 0.0;
#pragma omp simd reduction(+ : s)
            for (std::size_t k = 0; k < j; ++k) s += li[k] * lj[k];
            const double v = a(i, j) - s;
            if (i == j) {
                if (!(v > 0.0)) {
                    throw NotPositiveDefinite("pivot " + std::to_string(i) + " is " +
                                              std::to_string(v));
                }
                l(i, i) = std::sqrt(v);
            } else {
                l(i, j) = v / l(j, j);
            }
        }
    }
    return l;
}

void solve_lower_inplace(const Matrix& lower, std::span<double> b) {
    const std::size_t n = lower.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const double* li = lower.row(i).data();
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= li[k] * b[k];
        b[i] = s / li[i];
    }
}

void solve_lower_transposed_inplace(const Matrix& lower, std::span<double> b) {
    const std::size_t n = lower.rows();
    for (std::size_t ii = n; ii-- > 0;) {
        b[ii] /= lower(ii, ii);
        const double bi = b[ii];
        const double* li = lower.row(ii).data();
        for (std::size_t k = 0; k < ii; ++k) b[k] -= li[k] * bi;
    }
}

std::vector<double> solve_cholesky(const Matrix& lower, std::span<const double> b) {
    if (lower.rows() != lower.cols() || b.size() != lower.rows()) {
        throw DimensionMismatch("solve_cholesky: rhs length " + std::to_string(b.size()) +
                                " vs factor " + std::to_string(lower.rows()));
    }
    std::vector<double> x(b.begin(), b.end());
    solve_lower_inplace(lower, x);
    solve_lower_transposed_inplace(lower, x);
    return x;
}

Matrix cholesky_inverse(const Matrix& lower) {
    const std::size_t n = lower.rows();
    // Rows of L^{-1} by forward substitution; each row update is a contiguous axpy.
    Matrix linv(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double* xi = linv.row(i).data();
        xi[i] = 1.0;
        const double* li = lower.row(i).data();
        for (std::size_t k = 0; k < i; ++k) {
            const double c = li[k];
            const double* xk = linv.row(k).data();
#pragma omp simd
            for (std::size_t j = 0; j <= k; ++j) xi[j] -= c * xk[j];
        }
        const double inv = 1.0 / li[i];
#pragma omp simd
        for (std::size_t j = 0; j <= i; ++j) xi[j] *= inv;
    }
    // (L L^T)^{-1} = L^{-T} L^{-1} as a sum of rank-1 updates over rows of L^{-1}.
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double* xk = linv.row(k).data();
        for (std::size_t a = 0; a <= k; ++a) {
            const double c = xk[a];
            if (c == 0.0) continue;
            double* oa = out.row(a).data();
#pragma omp simd
            for (std::size_t b = 0; b <= a; ++b) oa[b] += c * xk[b];
        }
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < a; ++b) out(b, a) = out(a, b);
    return out;
}

double cholesky_log_det(const Matrix& lower) {
    double s = 0.0;
    for (std::size_t i = 0; i < lower.rows(); ++i) s += std::log(lower(i, i));
    return 2.0 * s;
}

SymEigen sym_eigen(const Matrix& input, int max_sweeps) {
    const std::size_t n = input.rows();
    if (input.cols() != n) throw DimensionMismatch("sym_eigen: matrix is not square");

    Matrix a = input;
    Matrix vt = Matrix::identity(n);  // row j holds eigenvector j

    double frob2 = 0.0;
    for (double v : a.data()) frob2 += v * v;

    auto off_diagonal = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
        return 2.0 * s;
    };

    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const double off = off_diagonal();
        if (off == 0.0 || off <= 1e-30 * frob2) {
            converged = true;
            break;
        }
        const double threshold = sweep < 3 ? 0.2 * std::sqrt(off / 2.0) / double(n * n) : 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                const double g = 100.0 * std::abs(apq);
                const double app = a(p, p);
                const double aqq = a(q, q);
                if (sweep > 3 && std::abs(app) + g == std::abs(app) &&
                    std::abs(aqq) + g == std::abs(aqq)) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                if (std::abs(apq) <= threshold || apq == 0.0) continue;

                const double h = aqq - app;
                double t;
                if (std::abs(h) + g == std::abs(h)) {
                    t = apq / h;
                } else {
                    const double theta = 0.5 * h / apq;
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                double* rp = a.row(p).data();
                double* rq = a.row(q).data();
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = rp[k];
                    const double akq = rq[k];
                    const double np = akp - s * (akq + tau * akp);
                    const double nq = akq + s * (akp - tau * akq);
                    rp[k] = np;
                    rq[k] = nq;
                    a(k, p) = np;
                    a(k, q) = nq;
                }
                double* vp = vt.row(p).data();
                double* vq = vt.row(q).data();
#pragma omp simd
                for (std::size_t k = 0; k < n; ++k) {
                    const double x = vp[k];
                    const double y = vq[k];
                    vp[k] = x - s * (y + tau * x);
                    vq[k] = y + s * (x - tau * y);
                }
            }
        }
    }
    if (!converged) {
        const double off = off_diagonal();
        if (!(off == 0.0 || off <= 1e-30 * frob2)) {
            throw NoConvergence("Jacobi did not converge in " + std::to_string(max_sweeps) +
                                " sweeps");
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    SymEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        const auto v = vt.row(order[j]);
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v[k];
    }
    return out;
}

void solve_linear_inplace(std::span<double> a, std::span<double> b, std::size_t n) {
    double scale = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) scale = std::max(scale, std::abs(a[i]));
    const double tiny = 1e-13 * scale;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a[r * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (!(best >= tiny) || best == 0.0) {
            throw Singular("pivot " + std::to_string(col) + " below 1e-13*max|A|");
        }
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
            std::swap(b[piv], b[col]);
        }
        const double d = a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / d;
            if (f == 0.0) continue;
            for (std::size_t c = col + 1; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t c = ii + 1; c < n; ++c) s -= a[ii * n + c] * b[c];
        b[ii] = s / a[ii * n + ii];
    }
}

std::vector<double> solve_linear(const Matrix& a, std::span<const double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionMismatch("solve_linear: matrix is not square");
    if (b.size() != n) throw DimensionMismatch("solve_linear: rhs length differs");
    std::vector<double> work(a.data());
    std::vector<double> x(b.begin(), b.end());
    solve_linear_inplace(work, x, n);
    return x;
}

double determinant_inplace(std::span<double> a, std::size_t n) {
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a[r * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
            det = -det;
        }
        const double d = a[col * n + col];
        det *= d;
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / d;
            if (f == 0.0) continue;
            for (std::size_t c = col + 1; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
        }
    }
    return det;
}

}  // namespace lutbench
