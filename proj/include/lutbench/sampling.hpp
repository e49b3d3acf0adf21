#pragma once

#include "lutbench/numerics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lutbench {

/// One input variable of the design with its sampling bounds.
/// min == max marks a frozen variable.
struct VariableSpec {
    std::string name;
    std::string units;
    double min = 0.0;
    double max = 1.0;

    bool frozen() const noexcept { return min == max; }
    friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

enum class DesignKind { Lhs, Vertices, Merged };

const char* to_string(DesignKind kind);
DesignKind design_kind_from_string(const std::string& s);

/// n x D samples in physical units; column order follows `specs`.
struct Design {
    std::vector<VariableSpec> specs;
    Matrix points;
    std::uint64_t seed = 0;
    DesignKind kind = DesignKind::Lhs;

    std::size_t size() const noexcept { return points.rows(); }
    std::size_t dims() const noexcept { return specs.size(); }
};

/// The six atmospheric variables and bounds of the reference experiment:
/// O3C, CWV, AOT, G, alpha (Angstrom exponent), SSA.
std::vector<VariableSpec> atmospheric_variables();

/// Throws InvalidBounds when any min > max or a bound is not finite.
void validate_specs(const std::vector<VariableSpec>& specs);

/// Plain random Latin hypercube: one sample per equal-width stratum per column,
/// uniform placement inside the stratum, independent row permutation per column.
Design latin_hypercube(std::size_t n, const std::vector<VariableSpec>& specs, std::uint64_t seed);

/// All 2^D_free corners of the bounds box; frozen variables stay at their value.
Design vertices(const std::vector<VariableSpec>& specs);

/// Row concatenation (a first) with exact duplicate rows removed.
Design merge(const Design& a, const Design& b);

/// Header of variable names, one row per sample, 17 significant digits.
void export_design_csv(const Design& design, const std::string& path);

}  // namespace lutbench
