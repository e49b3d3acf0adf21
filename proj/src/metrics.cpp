#include "lutbench/metrics.hpp"

#include "lutbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lutbench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_shapes(const Matrix& ref, const Matrix& pred) {
    if (ref.rows() != pred.rows() || ref.cols() != pred.cols()) {
        throw ShapeMismatch("reference is " + std::to_string(ref.rows()) + "x" +
                            std::to_string(ref.cols()) + ", prediction is " +
                            std::to_string(pred.rows()) + "x" + std::to_string(pred.cols()));
    }
    if (ref.rows() == 0) throw ShapeMismatch("no spectra to compare");
}

double column_rmse(const Matrix& ref, const Matrix& pred, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i < ref.rows(); ++i) {
        const double e = ref(i, k) - pred(i, k);
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(ref.rows()));
}

void column_percentiles(const ResidualSet& residuals, std::span<const double> qs, std::size_t k,
                        std::vector<double>& scratch, Matrix& out) {
    scratch.clear();
    for (std::size_t i = 0; i < residuals.percent.rows(); ++i) {
        const double v = residuals.percent(i, k);
        if (!std::isnan(v)) scratch.push_back(v);
    }
    if (scratch.size() < 2)
        throw TooFewSamples("wavelength " + std::to_string(k) + " has fewer than 2 residuals");
    std::sort(scratch.begin(), scratch.end());
    for (std::size_t r = 0; r < qs.size(); ++r) out(r, k) = quantile_sorted(scratch, qs[r]);
}

}  // namespace

const char* to_string(NrmseNorm norm) {
    return norm == NrmseNorm::Global ? "global" : "per-wavelength";
}

NrmseNorm nrmse_norm_from_string(const std::string& s) {
    if (s == "per-wavelength") return NrmseNorm::PerWavelength;
    if (s == "global") return NrmseNorm::Global;
    throw InvalidConfig("nrmse norm must be 'per-wavelength' or 'global', got '" + s + "'");
}

std::vector<double> rmse_per_wavelength(const Matrix& ref, const Matrix& pred) {
    check_shapes(ref, pred);
    std::vector<double> out(ref.cols());
    for (std::size_t k = 0; k < ref.cols(); ++k) out[k] = column_rmse(ref, pred, k);
    return out;
}

std::vector<double> rmse_per_wavelength_parallel(const Matrix& ref, const Matrix& pred) {
    check_shapes(ref, pred);
    std::vector<double> out(ref.cols());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < static_cast<long>(ref.cols()); ++k)
        out[static_cast<std::size_t>(k)] = column_rmse(ref, pred, static_cast<std::size_t>(k));
    return out;
}

NrmseResult nrmse_per_wavelength(const Matrix& ref, const Matrix& pred, NrmseNorm norm) {
    const auto rmse = rmse_per_wavelength(ref, pred);
    const std::size_t k_count = ref.cols();
    std::vector<double> range(k_count);
    if (norm == NrmseNorm::Global) {
        const auto [lo, hi] = std::minmax_element(ref.data().begin(), ref.data().end());
        std::fill(range.begin(), range.end(), *hi - *lo);
    } else {
        for (std::size_t k = 0; k < k_count; ++k) {
            double lo = ref(0, k);
            double hi = lo;
            for (std::size_t i = 1; i < ref.rows(); ++i) {
                lo = std::min(lo, ref(i, k));
                hi = std::max(hi, ref(i, k));
            }
            range[k] = hi - lo;
        }
    }

    NrmseResult res;
    res.per_wavelength.resize(k_count);
    double sum = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
        if (!(range[k] > 0.0)) {
            res.per_wavelength[k] = kNaN;
            ++res.degenerate;
            continue;
        }
        res.per_wavelength[k] = 100.0 * rmse[k] / range[k];
        sum += res.per_wavelength[k];
    }
    if (res.degenerate == k_count)
        throw DegenerateRange("reference range is zero at every wavelength");
    res.aggregate = sum / static_cast<double>(k_count - res.degenerate);
    return res;
}

ResidualSet relative_residuals(const Matrix& ref, const Matrix& pred) {
    check_shapes(ref, pred);
    ResidualSet res;
    res.percent = Matrix(ref.rows(), ref.cols());
    for (std::size_t i = 0; i < ref.data().size(); ++i) {
        const double r = ref.data()[i];
        if (std::abs(r) < 1e-12) {
            res.percent.data()[i] = kNaN;
            ++res.excluded;
        } else {
            res.percent.data()[i] = 100.0 * std::abs(pred.data()[i] - r) / std::abs(r);
        }
    }
    return res;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw TooFewSamples("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q / 100.0;
    const double lo = std::floor(h);
    const auto i = static_cast<std::size_t>(lo);
    if (i + 1 >= sorted.size()) return sorted.back();
    return sorted[i] + (h - lo) * (sorted[i + 1] - sorted[i]);
}

Matrix residual_percentiles(const ResidualSet& residuals, std::span<const double> qs) {
    if (residuals.percent.rows() < 2) throw TooFewSamples("need at least 2 residual spectra");
    Matrix out(qs.size(), residuals.percent.cols());
    std::vector<double> scratch;
    for (std::size_t k = 0; k < residuals.percent.cols(); ++k)
        column_percentiles(residuals, qs, k, scratch, out);
    return out;
}

Matrix residual_percentiles_parallel(const ResidualSet& residuals, std::span<const double> qs) {
    if (residuals.percent.rows() < 2) throw TooFewSamples("need at least 2 residual spectra");
    Matrix out(qs.size(), residuals.percent.cols());
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (long k = 0; k < static_cast<long>(residuals.percent.cols()); ++k)
            column_percentiles(residuals, qs, static_cast<std::size_t>(k), scratch, out);
    }
    return out;
}

std::vector<double> mean_relative_residual(const ResidualSet& residuals) {
    const auto& m = residuals.percent;
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t k = 0; k < m.cols(); ++k) {
        double s = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (std::isnan(m(i, k))) continue;
            s += m(i, k);
            ++count;
        }
        out[k] = count ? s / static_cast<double>(count) : kNaN;
    }
    return out;
}

EvalReport compare(const Matrix& ref, std::span<const double> wavelengths, const MethodOutput& out,
                   NrmseNorm norm) {
    if (out.spectra.rows() == 0) throw ShapeMismatch("method produced no spectra");
    check_shapes(ref, out.spectra);
    if (wavelengths.size() != ref.cols())
        throw ShapeMismatch("wavelength axis does not match the spectra");

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < ref.rows(); ++i) {
        const auto row = out.spectra.row(i);
        if (std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); }))
            keep.push_back(i);
    }
    const Matrix r = keep.size() == ref.rows() ? ref : ref.select_rows(keep);
    const Matrix p = keep.size() == ref.rows() ? out.spectra : out.spectra.select_rows(keep);

    EvalReport rep;
    rep.method = out.method;
    rep.lut_size = out.lut_size;
    rep.components = out.components;
    rep.nrmse_norm = to_string(norm);
    rep.wavelengths.assign(wavelengths.begin(), wavelengths.end());
    rep.evaluated = keep.size();
    rep.failed = ref.rows() - keep.size();
    rep.build_seconds = out.build_seconds;
    rep.query_seconds = out.query_seconds;

    rep.rmse = rmse_per_wavelength_parallel(r, p);
    const auto nr = nrmse_per_wavelength(r, p, norm);
    rep.nrmse = nr.per_wavelength;
    rep.nrmse_mean = nr.aggregate;
    rep.nrmse_degenerate = nr.degenerate;
    double s = 0.0;
    for (double v : rep.rmse) s += v;
    rep.rmse_mean = s / static_cast<double>(rep.rmse.size());

    const auto res = relative_residuals(r, p);
    rep.residual_excluded = res.excluded;
    rep.mean_relative = mean_relative_residual(res);
    rep.percentiles = residual_percentiles_parallel(res, kResidualPercentiles);
    return rep;
}

}  // namespace lutbench
