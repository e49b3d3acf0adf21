// Serial reference kernels against their OpenMP counterparts.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include "lutbench/gpr.hpp"
#include "lutbench/lut.hpp"
#include "lutbench/metrics.hpp"
#include "lutbench/rng.hpp"
#include "lutbench/simplex.hpp"

#include <benchmark/benchmark.h>

using namespace lutbench;

namespace {

const Design& query_design() {
    static const Design d = latin_hypercube(2000, atmospheric_variables(), 99);
    return d;
}

const Lut& training_lut() {
    static const Lut lut = generate_lut(merge(latin_hypercube(200, atmospheric_variables(), 1),
                                              vertices(atmospheric_variables())),
                                        SpectralGrid::default_grid(), Geometry{});
    return lut;
}

const SimplicialComplex& complex() {
    static const SimplicialComplex c = SimplicialComplex::build(training_lut().design.points);
    return c;
}

const EmulatorModel& model() {
    static const EmulatorModel m = [] {
        TrainConfig cfg;
        cfg.n_components = 10;
        cfg.restarts = 1;
        cfg.max_iterations = 40;
        return train_emulator(training_lut(), cfg);
    }();
    return m;
}

Matrix random_unit(std::size_t r, std::size_t c, std::uint64_t seed) {
    CounterRng rng(seed);
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.next_double();
    return m;
}

void BM_generate_lut_serial(benchmark::State& s) {
    const auto grid = SpectralGrid::default_grid();
    for (auto _ : s) benchmark::DoNotOptimize(generate_lut_serial(query_design(), grid, Geometry{}));
}
void BM_generate_lut_parallel(benchmark::State& s) {
    const auto grid = SpectralGrid::default_grid();
    for (auto _ : s) benchmark::DoNotOptimize(generate_lut(query_design(), grid, Geometry{}));
}

void BM_cross_kernel_serial(benchmark::State& s) {
    const auto h = GpHyper::from_values(1.0, std::vector<double>(6, 0.5), 1e-4);
    const Matrix a = random_unit(2000, 6, 1);
    const Matrix b = random_unit(400, 6, 2);
    for (auto _ : s) benchmark::DoNotOptimize(cross_kernel_serial(h, a, b));
}
void BM_cross_kernel_parallel(benchmark::State& s) {
    const auto h = GpHyper::from_values(1.0, std::vector<double>(6, 0.5), 1e-4);
    const Matrix a = random_unit(2000, 6, 1);
    const Matrix b = random_unit(400, 6, 2);
    for (auto _ : s) benchmark::DoNotOptimize(cross_kernel(h, a, b));
}

void BM_predict_serial(benchmark::State& s) {
    const auto& m = model();
    for (auto _ : s) benchmark::DoNotOptimize(predict_serial(m, query_design().points));
}
void BM_predict_parallel(benchmark::State& s) {
    const auto& m = model();
    for (auto _ : s) benchmark::DoNotOptimize(predict(m, query_design().points));
}

void BM_interpolate_serial(benchmark::State& s) {
    const auto& c = complex();
    for (auto _ : s)
        benchmark::DoNotOptimize(interpolate_batch_serial(c, training_lut().spectra, query_design().points));
}
void BM_interpolate_parallel(benchmark::State& s) {
    const auto& c = complex();
    for (auto _ : s) benchmark::DoNotOptimize(interpolate_batch(c, training_lut().spectra, query_design().points));
}

void BM_percentiles_serial(benchmark::State& s) {
    const Matrix ref = random_unit(5000, 401, 3);
    const auto res = relative_residuals(ref, random_unit(5000, 401, 4));
    for (auto _ : s) benchmark::DoNotOptimize(residual_percentiles(res, kResidualPercentiles));
}
void BM_percentiles_parallel(benchmark::State& s) {
    const Matrix ref = random_unit(5000, 401, 3);
    const auto res = relative_residuals(ref, random_unit(5000, 401, 4));
    for (auto _ : s) benchmark::DoNotOptimize(residual_percentiles_parallel(res, kResidualPercentiles));
}

}  // namespace

BENCHMARK(BM_generate_lut_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_generate_lut_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cross_kernel_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cross_kernel_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_predict_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_predict_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_interpolate_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_interpolate_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_percentiles_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_percentiles_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
