#include "lutbench/lut.hpp"

#include "lutbench/errors.hpp"

#include <algorithm>
#include <exception>

namespace lutbench {

namespace {

Lut empty_lut(const Design& design, const SpectralGrid& grid, const Geometry& geom) {
    if (design.size() == 0) throw InvalidConfig("cannot generate a LUT from an empty design");
    if (design.dims() != kNumAtmVars)
        throw InvalidConfig("surrogate RTM needs the six atmospheric variables");
    geom.validate();
    Lut lut;
    lut.design = design;
    lut.grid = grid;
    lut.geometry = geom;
    lut.spectra = Matrix(design.size(), grid.size());
    lut.provenance = "analytic surrogate RTM";
    return lut;
}

}  // namespace

Lut generate_lut_serial(const Design& design, const SpectralGrid& grid, const Geometry& geom) {
    Lut lut = empty_lut(design, grid, geom);
    for (std::size_t i = 0; i < design.size(); ++i) {
        const auto spec = toa_radiance(design.points.row(i), grid, geom);
        std::copy(spec.begin(), spec.end(), lut.spectra.row(i).begin());
    }
    return lut;
}

Lut generate_lut(const Design& design, const SpectralGrid& grid, const Geometry& geom) {
    Lut lut = empty_lut(design, grid, geom);
    const auto n = static_cast<long>(design.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        try {
            const auto spec = toa_radiance(design.points.row(i), grid, geom);
            std::copy(spec.begin(), spec.end(), lut.spectra.row(i).begin());
        } catch (...) {
#pragma omp critical(lutbench_generate_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return lut;
}

}  // namespace lutbench
