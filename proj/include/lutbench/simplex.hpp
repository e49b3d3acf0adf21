#pragma once

// Piecewise-linear interpolation over a Delaunay triangulation of scattered
// D-dimensional nodes.
//
// The triangulation is built incrementally as the lower hull of the points
// lifted onto the paraboloid (x, |x|^2), with a symbolic point at infinity
// closing the hull. Cospherical and coplanar ties are broken by perturbing the
// lifted height of each point by an infinitesimal that grows with its index.
// Coordinates are normalized per dimension to [0, 1] before anything else.

#include "lutbench/numerics.hpp"
#include "lutbench/rtm.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lutbench {

inline constexpr double kBarycentricTolerance = 1e-10;

struct BarycentricResult {
    std::size_t simplex = 0;
    std::vector<double> weights;  ///< D + 1 weights, aligned with the simplex vertices
};

/// Warm-start state for successive `locate` calls. One per thread.
struct WalkCursor {
    std::size_t simplex = 0;
};

class SimplicialComplex {
public:
    static constexpr std::int32_t kBoundary = -1;

    /// Delaunay triangulation of the rows of `points` (n x D).
    /// Throws TooFewPoints (n < D + 1) or DegenerateInput (affinely dependent
    /// or duplicate points).
    static SimplicialComplex build(const Matrix& points);

    std::size_t dims() const noexcept { return dims_; }
    std::size_t num_points() const noexcept { return points_.rows(); }
    std::size_t num_simplices() const noexcept { return vertices_.size() / (dims_ + 1); }

    /// Normalized node coordinates (n x D).
    const Matrix& points() const noexcept { return points_; }
    std::span<const std::int32_t> simplex(std::size_t s) const noexcept {
        return {vertices_.data() + s * (dims_ + 1), dims_ + 1};
    }
    /// neighbors(s)[j] is the simplex across the facet opposite vertex j, or kBoundary.
    std::span<const std::int32_t> neighbors(std::size_t s) const noexcept {
        return {neighbors_.data() + s * (dims_ + 1), dims_ + 1};
    }
    const std::vector<double>& offset() const noexcept { return offset_; }
    const std::vector<double>& scale() const noexcept { return scale_; }

    /// Maps a physical-unit query into the normalized frame.
    std::vector<double> normalize(std::span<const double> q) const;

    /// Barycentric weights of normalized point `qn` in simplex `s`.
    void barycentric(std::size_t s, std::span<const double> qn, std::span<double> weights) const;

    /// Walk from `cursor` towards the simplex containing `q` (physical units),
    /// stepping across the facet with the most negative weight. Falls back to
    /// an exhaustive scan on a cycle or at the hull boundary. Throws OutsideHull.
    BarycentricResult locate(std::span<const double> q, WalkCursor& cursor) const;
    BarycentricResult locate(std::span<const double> q) const;

    /// Exhaustive scan; returns the first simplex whose weights are all >= -1e-10.
    BarycentricResult locate_scan(std::span<const double> q) const;

private:
    std::size_t dims_ = 0;
    Matrix points_;
    std::vector<double> offset_;
    std::vector<double> scale_;
    std::vector<std::int32_t> vertices_;
    std::vector<std::int32_t> neighbors_;

    BarycentricResult scan_normalized(std::span<const double> qn) const;
};

/// Sum over the containing simplex of weight * values row. Throws OutsideHull
/// and DimensionMismatch.
Spectrum interpolate(const SimplicialComplex& complex, const Matrix& values,
                     std::span<const double> q);
Spectrum interpolate(const SimplicialComplex& complex, const Matrix& values,
                     std::span<const double> q, WalkCursor& cursor);

struct BatchResult {
    Matrix spectra;                      ///< m x K; rows of failed queries are NaN
    std::vector<std::size_t> failures;   ///< query rows that fell outside the hull
    double seconds = 0.0;
};

/// Queries are processed in fixed blocks of `kInterpolationBlock`; the walk
/// cursor restarts at simplex 0 for every block, so results do not depend on
/// the number of threads.
inline constexpr std::size_t kInterpolationBlock = 64;

/// OpenMP-parallel batch interpolation (timing excludes the build).
BatchResult interpolate_batch(const SimplicialComplex& complex, const Matrix& values,
                              const Matrix& queries);
/// Single-threaded reference with the same block/cursor schedule.
BatchResult interpolate_batch_serial(const SimplicialComplex& complex, const Matrix& values,
                                     const Matrix& queries);

}  // namespace lutbench
