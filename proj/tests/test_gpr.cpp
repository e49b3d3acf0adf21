#include "lutbench/errors.hpp"
#include "lutbench/experiment.hpp"
#include "lutbench/gpr.hpp"
#include "lutbench/rng.hpp"
#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace lutbench;
using lutbench::testing::random_matrix;
using lutbench::testing::standard_normal;

namespace {

GpHyper random_hyper(std::size_t dims, CounterRng& rng) {
    std::vector<double> l(dims);
    for (double& v : l) v = std::exp(rng.uniform(std::log(0.2), std::log(2.0)));
    return GpHyper::from_values(std::exp(rng.uniform(-1.0, 1.0)), l, std::exp(rng.uniform(-6.0, -2.0)));
}

Lut small_lut(std::size_t n_lhs, double step = 50.0, std::uint64_t seed = 8) {
    const auto specs = atmospheric_variables();
    return generate_lut(merge(latin_hypercube(n_lhs, specs, seed), vertices(specs)),
                        SpectralGrid::uniform(400, 2400, step), Geometry{});
}

TrainConfig quick_config(std::size_t p) {
    TrainConfig cfg;
    cfg.n_components = p;
    cfg.restarts = 2;
    cfg.max_iterations = 60;
    return cfg;
}

}  // namespace

TEST(Pca, RankOneDataExplainsEverything) {
    const Matrix base = random_matrix(1, 12, 3);
    Matrix x(30, 12);
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t k = 0; k < 12; ++k) x(i, k) = 5.0 + (static_cast<double>(i) - 7.5) * base(0, k);
    const auto pca = fit_pca(x, 1);
    EXPECT_NEAR(pca.explained[0], 1.0, 1e-12);
    EXPECT_THROW(fit_pca(x, 2), RankDeficient);
}

TEST(Pca, CompleteBasisRoundTripBothPaths) {
    // n < K uses the Gram matrix, n > K the covariance.
    for (auto [n, k] : {std::pair{8u, 20u}, std::pair{25u, 6u}}) {
        const Matrix x = random_matrix(n, k, n * 100 + k);
        const std::size_t p = std::min<std::size_t>(n - 1, k);
        const auto pca = fit_pca(x, p);
        const Matrix btb = multiply(pca.basis.transposed(), pca.basis);
        EXPECT_LT(max_abs_diff(btb, Matrix::identity(p)), 1e-10);
        EXPECT_LT(max_abs_diff(reconstruct(pca, project(pca, x)), x), 1e-10);
        double sum = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            EXPECT_GT(pca.explained[j], 0.0);
            if (j) {
                EXPECT_LE(pca.explained[j], pca.explained[j - 1]);
            }
            sum += pca.explained[j];
        }
        EXPECT_LE(sum, 1.0 + 1e-12);
    }
}

TEST(Pca, GramAndCovariancePathsAgree) {
    const Matrix x = random_matrix(30, 29, 4);
    const Matrix y = x.select_rows(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14,
                                                            15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29});
    const auto a = fit_pca(y, 3);  // n >= K: covariance
    Matrix wide(30, 31);
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t k = 0; k < 29; ++k) wide(i, k) = x(i, k);
    const auto b = fit_pca(wide, 3);  // n < K: Gram, two zero-variance columns appended
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(a.explained[j], b.explained[j], 1e-10);
        for (std::size_t k = 0; k < 29; ++k) EXPECT_NEAR(a.basis(k, j), b.basis(k, j), 1e-9);
    }
}

TEST(Pca, ProjectionIdentities) {
    const Matrix x = random_matrix(20, 10, 5);
    const auto pca = fit_pca(x, 4);
    const Matrix zero_scores(1, 4);
    const Matrix mean_row(1, 10, pca.mean);
    EXPECT_EQ(reconstruct(pca, zero_scores), mean_row);
    EXPECT_LT(max_abs(project(pca, mean_row)), 1e-14);
    const Matrix s = random_matrix(3, 4, 6);
    EXPECT_LT(max_abs_diff(project(pca, reconstruct(pca, s)), s), 1e-10);
    EXPECT_THROW(project(pca, Matrix(1, 9)), DimensionMismatch);
    EXPECT_THROW(reconstruct(pca, Matrix(1, 3)), DimensionMismatch);
    EXPECT_THROW(fit_pca(x, 0), RankDeficient);
    EXPECT_THROW(fit_pca(x, 20), RankDeficient);
}

TEST(Pca, SurrogateLutFiveComponentBaseline) {
    const ExperimentConfig cfg;
    const auto lut = generate_lut(training_design(cfg, 500), cfg.grid(), cfg.geometry);
    ASSERT_EQ(lut.size(), 564u);
    const auto pca = fit_pca(lut.spectra, 5);
    double sum = 0.0;
    for (double e : pca.explained) sum += e;
    // Frozen regression baseline for the default 564-node LUT.
    EXPECT_NEAR(sum, 0.9974722247, 1e-9);
}

TEST(Lml, SinglePointClosedForm) {
    const GpHyper h = GpHyper::from_values(1.7, std::vector<double>{0.4, 0.9}, 0.3);
    const Matrix x{{0.2, 0.7}};
    const std::vector<double> z{1.3};
    const auto r = log_marginal_likelihood(h, x, z);
    const double v = 1.7 + 0.3;
    EXPECT_NEAR(r.value, -0.5 * 1.3 * 1.3 / v - 0.5 * std::log(v) - 0.5 * std::log(2 * std::numbers::pi), 1e-14);
}

TEST(Lml, GradientMatchesCentralDifferences) {
    CounterRng rng(2024);
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t dims = 1 + inst % 6;
        const Matrix x = random_matrix(20, dims, 500 + inst, 0.0, 1.0);
        std::vector<double> z(20);
        for (double& v : z) v = standard_normal(rng);
        const GpHyper h = random_hyper(dims, rng);
        const auto r = log_marginal_likelihood(h, x, z);
        for (std::size_t i = 0; i < h.theta.size(); ++i) {
            GpHyper hp = h;
            GpHyper hm = h;
            hp.theta[i] += 1e-5;
            hm.theta[i] -= 1e-5;
            const double fd = (log_marginal_likelihood(hp, x, z, false).value -
                               log_marginal_likelihood(hm, x, z, false).value) / 2e-5;
            EXPECT_LE(std::abs(fd - r.gradient[i]), 1e-5 * std::max(1.0, std::abs(fd)))
                << "instance " << inst << " parameter " << i;
        }
    }
}

TEST(Lml, DuplicateInputsEscalateJitter) {
    const Matrix x{{0.5}, {0.5}, {0.1}};
    const std::vector<double> z{1.0, 1.0, -0.5};
    const GpHyper h = GpHyper::from_values(1.0, std::vector<double>{0.5}, kMinNoiseVar);
    const auto r = log_marginal_likelihood(h, x, z);
    EXPECT_GE(r.jitter, 0.0);
    EXPECT_TRUE(std::isfinite(r.value));
    // Exactly singular kernel without noise room: duplicates of a huge-signal kernel.
    GpHyper big = GpHyper::from_values(1e4, std::vector<double>{100.0}, kMinNoiseVar);
    big.theta.back() = std::log(1e-30);  // below the floor: the kernel is singular
    const Matrix x2{{0.5}, {0.5}, {0.5}, {0.5}};
    const auto r2 = log_marginal_likelihood(big, x2, std::vector<double>{1, 1, 1, 1});
    EXPECT_GT(r2.jitter, 0.0);
    EXPECT_LE(r2.jitter, kMaxJitter);
}

TEST(Lml, ShapeErrors) {
    const GpHyper h = GpHyper::from_values(1.0, std::vector<double>{0.5}, 0.1);
    EXPECT_THROW(log_marginal_likelihood(h, Matrix(3, 2), std::vector<double>(3)), DimensionMismatch);
    EXPECT_THROW(log_marginal_likelihood(h, Matrix(3, 1), std::vector<double>(2)), DimensionMismatch);
}

TEST(GpMean, NoiseFreeInterpolatesTrainingTargets) {
    CounterRng rng(9);
    const Matrix x = random_matrix(40, 3, 10, 0.0, 1.0);
    GprComponent comp;
    comp.inputs = x;
    comp.targets.resize(40);
    for (double& v : comp.targets) v = standard_normal(rng);
    comp.hyper = GpHyper::from_values(1.0, std::vector<double>{0.3, 0.3, 0.3}, kMinNoiseVar);
    comp.factorize();
    const auto mu = predict_mean(comp, x);
    for (std::size_t i = 0; i < 40; ++i)
        EXPECT_LE(std::abs(mu[i] - comp.targets[i]), 1e-6 * std::max(1.0, std::abs(comp.targets[i])));
    EXPECT_EQ(mu, predict_mean_serial(comp, x));
    for (double v : predict_variance(comp, x)) EXPECT_LT(v, 1e-6);
}

TEST(TrainComponent, RecoversLengthScaleOfKnownSample) {
    const std::size_t n = 200;
    Matrix x(n, 1);
    for (std::size_t i = 0; i < n; ++i) x(i, 0) = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const GpHyper truth = GpHyper::from_values(1.0, std::vector<double>{0.5}, 1e-6);
    Matrix k = cross_kernel(truth, x, x);
    for (std::size_t i = 0; i < n; ++i) k(i, i) += 1e-6;
    const Matrix l = cholesky(k);
    CounterRng rng(31);
    std::vector<double> e(n);
    for (double& v : e) v = standard_normal(rng);
    std::vector<double> z(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) z[i] += l(i, j) * e[j];
    TrainConfig cfg;
    cfg.hyper_subset = n;
    const auto comp = train_component(x, z, cfg);
    EXPECT_GT(comp.hyper.length(0), 0.25);
    EXPECT_LT(comp.hyper.length(0), 1.0);
}

TEST(TrainComponent, ZeroTargetsDriveSignalToLowerBound) {
    const Matrix x = random_matrix(30, 2, 12, 0.0, 1.0);
    const std::vector<double> z(30, 0.0);
    const auto comp = train_component(x, z, quick_config(1));
    EXPECT_NEAR(comp.hyper.signal_var(), kMinSignalVar, 1e-9);
    for (double v : predict_mean(comp, random_matrix(10, 2, 13, 0.0, 1.0))) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(TrainComponent, DeterministicAndWithinBounds) {
    CounterRng rng(3);
    const Matrix x = random_matrix(40, 3, 14, 0.0, 1.0);
    std::vector<double> z(40);
    for (std::size_t i = 0; i < 40; ++i) z[i] = std::sin(3 * x(i, 0)) + x(i, 1) * x(i, 2);
    const auto a = train_component(x, z, quick_config(1), 5);
    const auto b = train_component(x, z, quick_config(1), 5);
    EXPECT_EQ(a.hyper.theta, b.hyper.theta);
    EXPECT_EQ(a.alpha, b.alpha);
    for (std::size_t d = 0; d < 3; ++d) {
        EXPECT_GE(a.hyper.length(d), kMinLength * (1 - 1e-12));
        EXPECT_LE(a.hyper.length(d), kMaxLength * (1 + 1e-12));
    }
    EXPECT_GE(a.hyper.noise_var(), kMinNoiseVar * (1 - 1e-12));
}

TEST(TrainComponent, TooFewRows) {
    EXPECT_THROW(train_component(Matrix(3, 2), std::vector<double>(3), quick_config(1)), InvalidConfig);
}

TEST(Emulator, SplitSizes) {
    const auto lut = small_lut(500, 100.0);
    auto cfg = quick_config(2);
    cfg.max_iterations = 5;
    const auto m = train_emulator(lut, cfg);
    EXPECT_EQ(m.train_rows.size(), 395u);
    EXPECT_EQ(m.valid_rows.size(), 169u);
    EXPECT_EQ(m.validation.rows, 169u);
}

TEST(Emulator, EmptyValidationSplitRejected) {
    const auto specs = atmospheric_variables();
    const auto lut = generate_lut(latin_hypercube(20, specs, 1), SpectralGrid::uniform(400, 2400, 200), Geometry{});
    auto cfg = quick_config(2);
    cfg.train_fraction = 0.999;
    EXPECT_THROW(train_emulator(lut, cfg), InvalidConfig);
    const auto tiny = generate_lut(latin_hypercube(19, specs, 1), SpectralGrid::uniform(400, 2400, 200), Geometry{});
    EXPECT_THROW(train_emulator(tiny, quick_config(2)), InvalidConfig);
}

TEST(Emulator, DeskScaleHeldOutAccuracyAndCapacity) {
    const auto lut = small_lut(500, 25.0);
    TrainConfig cfg;
    const std::size_t ps[] = {10, 20};
    const auto models = train_emulator_family(lut, cfg, ps);
    EXPECT_LT(models[0].validation.nrmse_mean, 1.0);
    EXPECT_LE(models[1].validation.rmse_mean, models[0].validation.rmse_mean);
    EXPECT_GT(models[0].validation.mean_predictive_sd, 0.0);
}

TEST(Emulator, FamilyMatchesSeparateTraining) {
    const auto lut = small_lut(60, 100.0);
    auto cfg = quick_config(4);
    const std::size_t ps[] = {2, 4};
    const auto family = train_emulator_family(lut, cfg, ps);
    cfg.n_components = 2;
    const auto single = train_emulator(lut, cfg);
    EXPECT_EQ(family[0].pca.basis, single.pca.basis);
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(family[0].components[c].alpha, single.components[c].alpha);
    EXPECT_EQ(predict(family[0], lut.design.points).spectra, predict(single, lut.design.points).spectra);
}

TEST(Emulator, TrainingInputsReproducedWithNoiseFloor) {
    const auto lut = small_lut(60, 50.0);
    auto model = train_emulator(lut, quick_config(8));
    for (auto& c : model.components) {
        c.hyper.theta.back() = std::log(kMinNoiseVar);
        c.jitter = 0.0;
        c.factorize();
    }
    const Matrix xt = lut.design.points.select_rows(model.train_rows);
    const Matrix ft = lut.spectra.select_rows(model.train_rows);
    const auto pred = predict(model, xt).spectra;
    const Matrix truncated = reconstruct(model.pca, project(model.pca, ft));
    // Relative to each spectrum's peak; absorption-band radiances are near zero.
    for (std::size_t i = 0; i < ft.rows(); ++i) {
        const auto row = ft.row(i);
        const double peak = std::abs(*std::max_element(row.begin(), row.end(),
                                                       [](double a, double b) { return std::abs(a) < std::abs(b); }));
        for (std::size_t k = 0; k < ft.cols(); ++k)
            EXPECT_LE(std::abs(pred(i, k) - truncated(i, k)), 1e-4 * peak);
    }
}

TEST(Emulator, PredictEdgeCases) {
    const auto lut = small_lut(40, 200.0);
    const auto model = train_emulator(lut, quick_config(2));
    const auto empty = predict(model, Matrix(0, 6));
    EXPECT_EQ(empty.spectra.rows(), 0u);
    EXPECT_EQ(empty.seconds, 0.0);
    Matrix bad(1, 6, 0.5);
    bad(0, 2) = std::nan("");
    EXPECT_THROW(predict(model, bad), NonFiniteInput);
    Matrix outside = lut.design.points.select_rows(std::vector<std::size_t>{0});
    outside(0, 2) = 0.9;  // AOT above its bound: extrapolation is allowed but counted
    EXPECT_EQ(predict(model, outside).out_of_bounds, 1u);
    EXPECT_THROW(predict(model, Matrix(1, 5)), DimensionMismatch);
}

TEST(Emulator, ValidateRejectsGridMismatch) {
    const auto lut = small_lut(40, 200.0);
    const auto model = train_emulator(lut, quick_config(2));
    const auto other = small_lut(40, 100.0);
    EXPECT_THROW(validate_model(model, other, "gpr-2"), FormatError);
    const auto self = validate_model(model, lut, "gpr-2");
    EXPECT_EQ(self.method, "gpr-2");
    EXPECT_EQ(self.lut_size, lut.size());
}
