#include "lutbench/sampling.hpp"

#include "lutbench/errors.hpp"
#include "lutbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <unordered_set>

namespace lutbench {

const char* to_string(DesignKind kind) {
    switch (kind) {
        case DesignKind::Lhs: return "lhs";
        case DesignKind::Vertices: return "vertices";
        case DesignKind::Merged: return "merged";
    }
    return "lhs";
}

DesignKind design_kind_from_string(const std::string& s) {
    if (s == "lhs") return DesignKind::Lhs;
    if (s == "vertices") return DesignKind::Vertices;
    if (s == "merged") return DesignKind::Merged;
    throw FormatError("unknown design kind '" + s + "'");
}

std::vector<VariableSpec> atmospheric_variables() {
    return {
        {"O3C", "atm-cm", 0.2, 0.45},
        {"CWV", "scale-factor", 1.0, 4.0},
        {"AOT", "unitless", 0.05, 0.4},
        {"G", "unitless", 0.65, 0.99},
        {"ALPHA", "unitless", 1.0, 2.0},
        {"SSA", "unitless", 0.75, 1.0},
    };
}

void validate_specs(const std::vector<VariableSpec>& specs) {
    if (specs.empty()) throw InvalidBounds("no variables");
    for (const auto& s : specs) {
        if (!std::isfinite(s.min) || !std::isfinite(s.max))
            throw InvalidBounds("variable " + s.name + " has non-finite bounds");
        if (s.min > s.max)
            throw InvalidBounds("variable " + s.name + " has min > max");
    }
}

Design latin_hypercube(std::size_t n, const std::vector<VariableSpec>& specs, std::uint64_t seed) {
    validate_specs(specs);
    if (n == 0) throw InvalidBounds("latin_hypercube requires n >= 1");

    Design d;
    d.specs = specs;
    d.seed = seed;
    d.kind = DesignKind::Lhs;
    d.points = Matrix(n, specs.size());

    std::vector<std::size_t> strata(n);
    for (std::size_t c = 0; c < specs.size(); ++c) {
        CounterRng rng(CounterRng::derive(seed, c));
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        shuffle(strata.begin(), strata.end(), rng);
        const auto& s = specs[c];
        const double width = s.max - s.min;
        for (std::size_t r = 0; r < n; ++r) {
            const double u = (static_cast<double>(strata[r]) + rng.next_double()) /
                             static_cast<double>(n);
            d.points(r, c) = s.frozen() ? s.min : std::min(s.max, s.min + u * width);
        }
    }
    return d;
}

Design vertices(const std::vector<VariableSpec>& specs) {
    validate_specs(specs);
    if (specs.size() > 20) throw TooManyDimensions("vertices supports at most 20 variables");

    std::vector<std::size_t> free_dims;
    for (std::size_t c = 0; c < specs.size(); ++c)
        if (!specs[c].frozen()) free_dims.push_back(c);

    const std::size_t count = std::size_t{1} << free_dims.size();
    Design d;
    d.specs = specs;
    d.kind = DesignKind::Vertices;
    d.points = Matrix(count, specs.size());
    for (std::size_t r = 0; r < count; ++r) {
        for (std::size_t c = 0; c < specs.size(); ++c) d.points(r, c) = specs[c].min;
        // Most significant bit on the first free variable gives lexicographic order.
        for (std::size_t k = 0; k < free_dims.size(); ++k) {
            const std::size_t bit = free_dims.size() - 1 - k;
            const auto c = free_dims[k];
            if ((r >> bit) & 1U) d.points(r, c) = specs[c].max;
        }
    }
    return d;
}

namespace {

struct RowKey {
    std::vector<std::uint64_t> bits;
    bool operator==(const RowKey&) const = default;
};

struct RowKeyHash {
    std::size_t operator()(const RowKey& k) const noexcept {
        std::uint64_t h = 0;
        for (auto b : k.bits) h = CounterRng::mix64(h ^ b);
        return static_cast<std::size_t>(h);
    }
};

RowKey key_of(std::span<const double> row) {
    RowKey k;
    k.bits.resize(row.size());
    std::memcpy(k.bits.data(), row.data(), row.size() * sizeof(double));
    return k;
}

}  // namespace

Design merge(const Design& a, const Design& b) {
    if (a.specs != b.specs) throw SpecMismatch("merge requires identical variable specs");

    std::unordered_set<RowKey, RowKeyHash> seen;
    std::vector<double> data;
    std::size_t rows = 0;
    for (const Design* src : {&a, &b}) {
        for (std::size_t r = 0; r < src->size(); ++r) {
            const auto row = src->points.row(r);
            if (seen.insert(key_of(row)).second) {
                data.insert(data.end(), row.begin(), row.end());
                ++rows;
            }
        }
    }
    Design out;
    out.specs = a.specs;
    out.seed = a.seed;
    out.kind = DesignKind::Merged;
    out.points = Matrix(rows, a.specs.size(), std::move(data));
    return out;
}

void export_design_csv(const Design& design, const std::string& path) {
    std::ofstream os(path);
    if (path.empty() || !os) throw IoError("cannot open '" + path + "' for writing");
    for (std::size_t c = 0; c < design.specs.size(); ++c)
        os << (c ? "," : "") << design.specs[c].name;
    os << '\n';
    char buf[32];
    for (std::size_t r = 0; r < design.size(); ++r) {
        for (std::size_t c = 0; c < design.dims(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", design.points(r, c));
            os << (c ? "," : "") << buf;
        }
        os << '\n';
    }
    if (!os) throw IoError("write failed for '" + path + "'");
}

}  // namespace lutbench
