#pragma once

#include "lutbench/numerics.hpp"
#include "lutbench/rtm.hpp"
#include "lutbench/sampling.hpp"

#include <string>

namespace lutbench {

/// Pre-computed nodes: design row i maps to spectra row i.
struct Lut {
    Design design;
    SpectralGrid grid;
    Geometry geometry;
    Matrix spectra;          ///< n x K radiance
    std::string provenance;  ///< free text
    std::string created;     ///< ISO-8601 timestamp, caller supplied

    std::size_t size() const noexcept { return spectra.rows(); }
};

/// Evaluates toa_radiance for every design row (OpenMP over rows).
/// Output is independent of thread count and evaluation order.
Lut generate_lut(const Design& design, const SpectralGrid& grid, const Geometry& geom);

/// Single-threaded reference for `generate_lut`.
Lut generate_lut_serial(const Design& design, const SpectralGrid& grid, const Geometry& geom);

}  // namespace lutbench
