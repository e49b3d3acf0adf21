#pragma once

#include "lutbench/numerics.hpp"

#include <span>
#include <string>
#include <vector>

namespace lutbench {

/// Percentile levels of the residual bands, in percent.
inline constexpr double kResidualPercentiles[] = {2.5, 16.0, 84.0, 95.5};

enum class NrmseNorm { PerWavelength, Global };

const char* to_string(NrmseNorm norm);
NrmseNorm nrmse_norm_from_string(const std::string& s);

std::vector<double> rmse_per_wavelength(const Matrix& ref, const Matrix& pred);

struct NrmseResult {
    std::vector<double> per_wavelength;  ///< percent; NaN where the reference range is zero
    double aggregate = 0.0;              ///< mean over the defined wavelengths
    std::size_t degenerate = 0;          ///< wavelengths excluded from the aggregate
};

/// 100 * rmse / (max - min), with max/min taken per wavelength over the
/// reference spectra, or over all reference values for NrmseNorm::Global.
/// Throws DegenerateRange when no wavelength has a usable range.
NrmseResult nrmse_per_wavelength(const Matrix& ref, const Matrix& pred,
                                 NrmseNorm norm = NrmseNorm::PerWavelength);

/// |pred - ref| / |ref| in percent. Entries with |ref| < 1e-12 are NaN and counted.
struct ResidualSet {
    Matrix percent;
    std::size_t excluded = 0;
};

ResidualSet relative_residuals(const Matrix& ref, const Matrix& pred);

/// Type-7 quantile (linear interpolation between order statistics) of an
/// ascending sample; q in percent.
double quantile_sorted(std::span<const double> sorted, double q);

/// One row per requested percentile, one column per wavelength. NaN residuals
/// are skipped. Throws TooFewSamples when fewer than two residuals remain.
Matrix residual_percentiles(const ResidualSet& residuals, std::span<const double> qs);

/// Per-wavelength mean over the defined residuals.
std::vector<double> mean_relative_residual(const ResidualSet& residuals);

struct EvalReport {
    std::string method;
    std::size_t lut_size = 0;
    std::size_t components = 0;  ///< 0 for interpolation
    std::string nrmse_norm = "per-wavelength";

    std::vector<double> wavelengths;
    std::vector<double> rmse;
    std::vector<double> nrmse;
    std::vector<double> mean_relative;
    Matrix percentiles;  ///< rows follow kResidualPercentiles

    double rmse_mean = 0.0;
    double nrmse_mean = 0.0;
    std::size_t nrmse_degenerate = 0;
    std::size_t residual_excluded = 0;
    std::size_t evaluated = 0;  ///< reference spectra compared
    std::size_t failed = 0;     ///< rows dropped because the method produced no value

    double build_seconds = 0.0;
    double query_seconds = 0.0;
};

struct MethodOutput {
    std::string method;
    std::size_t lut_size = 0;
    std::size_t components = 0;
    Matrix spectra;  ///< rows with non-finite values count as failures
    double build_seconds = 0.0;
    double query_seconds = 0.0;
};

/// All statistics of `out` against the reference spectra on the shared grid.
EvalReport compare(const Matrix& ref, std::span<const double> wavelengths, const MethodOutput& out,
                   NrmseNorm norm = NrmseNorm::PerWavelength);

/// Parallel variants of the per-wavelength kernels; the serial functions above
/// are the reference implementation.
std::vector<double> rmse_per_wavelength_parallel(const Matrix& ref, const Matrix& pred);
Matrix residual_percentiles_parallel(const ResidualSet& residuals, std::span<const double> qs);

}  // namespace lutbench
