#pragma once

// Spectral emulator: PCA compression of LUT spectra followed by one
// Gaussian-process regressor per retained component.
//
// Artifact choices (none are fixed by the method description): ARD
// squared-exponential kernel, inputs scaled to the unit box of the variable
// bounds, component scores standardized before training, PCA fitted on the
// training rows only, hyperparameters chosen by maximizing the log marginal
// likelihood with bounded L-BFGS from several seeded starts.

#include "lutbench/lut.hpp"
#include "lutbench/metrics.hpp"
#include "lutbench/numerics.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lutbench {

struct PcaModel {
    std::vector<double> mean;       ///< K
    Matrix basis;                   ///< K x p, orthonormal columns
    std::vector<double> explained;  ///< p ratios, descending

    std::size_t components() const noexcept { return basis.cols(); }
};

/// Top-p principal directions of the mean-centered spectra (n x K). Uses the
/// n x n Gram matrix when n < K. Throws RankDeficient.
PcaModel fit_pca(const Matrix& spectra, std::size_t p);
Matrix project(const PcaModel& pca, const Matrix& spectra);
Matrix reconstruct(const PcaModel& pca, const Matrix& scores);

/// Log-space kernel hyperparameters: [log sf2, log l_1 .. log l_D, log sn2].
struct GpHyper {
    std::vector<double> theta;

    static GpHyper from_values(double signal_var, std::span<const double> lengths, double noise_var);
    std::size_t dims() const noexcept { return theta.size() - 2; }
    double signal_var() const;
    double noise_var() const;
    double length(std::size_t d) const;
};

inline constexpr double kMinLength = 1e-2;
inline constexpr double kMaxLength = 1e2;
inline constexpr double kMinSignalVar = 1e-6;
inline constexpr double kMaxSignalVar = 1e4;
inline constexpr double kMinNoiseVar = 1e-10;
inline constexpr double kMaxNoiseVar = 1e1;
inline constexpr double kMaxJitter = 1e-4;

/// Clamps theta into the hyperparameter box.
void clamp_hyper(GpHyper& h);

/// sf2 exp(-1/2 sum_d (x_d - x'_d)^2 / l_d^2) between rows of `a` and `b`
/// (no noise term). OpenMP over rows.
Matrix cross_kernel(const GpHyper& h, const Matrix& a, const Matrix& b);
Matrix cross_kernel_serial(const GpHyper& h, const Matrix& a, const Matrix& b);

struct LmlResult {
    double value = 0.0;
    std::vector<double> gradient;  ///< d value / d theta
    double jitter = 0.0;           ///< diagonal jitter that made the factorization succeed
};

/// Log marginal likelihood and its analytic gradient. On a failed Cholesky the
/// diagonal gets jitter 1e-10, growing x10 up to 1e-4, before NotPositiveDefinite
/// escapes.
LmlResult log_marginal_likelihood(const GpHyper& h, const Matrix& x, std::span<const double> z,
                                  bool with_gradient = true);

struct TrainConfig {
    std::size_t n_components = 10;
    double train_fraction = 0.70;
    std::uint64_t seed = 0;
    int restarts = 5;
    int max_iterations = 200;
    /// Training rows used for the hyperparameter search; the final fit uses all.
    std::size_t hyper_subset = 256;

    void validate() const;
};

struct GprComponent {
    Matrix inputs;               ///< n_t x D, unit-box coordinates
    std::vector<double> targets; ///< standardized scores
    GpHyper hyper;
    double jitter = 0.0;
    std::vector<double> alpha;   ///< (K + sn2 I)^-1 z
    Matrix chol;                 ///< lower factor of K + (sn2 + jitter) I
    double lml = 0.0;

    /// Rebuilds chol and alpha from inputs, targets and hyper.
    void factorize();
};

/// Fits one component. `stream` separates the restart seeds of different components.
/// Throws OptimizationFailed when every restart fails.
GprComponent train_component(const Matrix& x, std::span<const double> z, const TrainConfig& cfg,
                             std::uint64_t stream = 0);

/// Posterior mean at the rows of `q` (unit-box coordinates). OpenMP over rows.
std::vector<double> predict_mean(const GprComponent& comp, const Matrix& q);
std::vector<double> predict_mean_serial(const GprComponent& comp, const Matrix& q);
/// Posterior variance of the latent function (noise excluded).
std::vector<double> predict_variance(const GprComponent& comp, const Matrix& q);

/// Held-out scores stored with the model ("code uncertainty").
struct ValidationSummary {
    std::size_t rows = 0;
    double rmse_mean = 0.0;
    double nrmse_mean = 0.0;
    /// Mean posterior standard deviation in radiance units, over at most
    /// kVarianceSample held-out rows.
    double mean_predictive_sd = 0.0;
};

inline constexpr std::size_t kVarianceSample = 50;

struct EmulatorModel {
    std::vector<VariableSpec> specs;
    SpectralGrid grid;
    PcaModel pca;
    std::vector<GprComponent> components;
    std::vector<double> input_offset;
    std::vector<double> input_scale;
    std::vector<double> score_mean;
    std::vector<double> score_std;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> valid_rows;
    TrainConfig config;
    ValidationSummary validation;
    double train_seconds = 0.0;

    std::size_t components_count() const noexcept { return components.size(); }
    Matrix normalize_inputs(const Matrix& q) const;
};

/// Seeded split, PCA on the training rows, one GP per component, validation on
/// the held-out rows. Throws InvalidConfig when the split leaves either side
/// too small.
EmulatorModel train_emulator(const Lut& lut, const TrainConfig& cfg);

/// Trains max(ps) components once and returns one model per entry of `ps`.
/// Each model is identical to train_emulator with n_components = p, since the
/// components are independent and share the split and PCA decomposition.
std::vector<EmulatorModel> train_emulator_family(const Lut& lut, const TrainConfig& cfg,
                                                 std::span<const std::size_t> ps);

struct PredictResult {
    Matrix spectra;
    double seconds = 0.0;
    std::size_t out_of_bounds = 0;  ///< queries outside the training bounds (extrapolation)
};

PredictResult predict(const EmulatorModel& model, const Matrix& q);
PredictResult predict_serial(const EmulatorModel& model, const Matrix& q);

/// Scores the model against any LUT sharing its grid and variables.
EvalReport validate_model(const EmulatorModel& model, const Lut& lut, const std::string& method,
                          NrmseNorm norm = NrmseNorm::PerWavelength);

}  // namespace lutbench
