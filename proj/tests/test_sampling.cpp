#include "lutbench/errors.hpp"
#include "lutbench/rng.hpp"
#include "lutbench/sampling.hpp"
#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

using namespace lutbench;

namespace {

/// Number of samples in each of the n equal-width strata of column c.
std::vector<int> stratum_counts(const Design& d, std::size_t c) {
    const auto& s = d.specs[c];
    const std::size_t n = d.size();
    std::vector<int> counts(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (d.points(i, c) - s.min) / (s.max - s.min);
        auto k = static_cast<std::size_t>(std::floor(u * static_cast<double>(n)));
        counts[std::min(k, n - 1)]++;
    }
    return counts;
}

}  // namespace

TEST(CounterRng, MatchesSplitMix64Reference) {
    // SplitMix64 seeded with 0: first outputs of the canonical generator.
    CounterRng rng(0);
    EXPECT_EQ(rng.next_u64(), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(rng.next_u64(), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(rng.next_u64(), 0x06C45D188009454FULL);
}

TEST(CounterRng, DoublesInUnitIntervalAndBoundedIntegers) {
    CounterRng rng(42);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_double();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(rng.below(7), 7u);
    }
    EXPECT_NE(CounterRng::derive(1, "a"), CounterRng::derive(1, "b"));
    EXPECT_NE(CounterRng::derive(1, 0), CounterRng::derive(2, 0));
}

TEST(LatinHypercube, FourStrataOnUnitInterval) {
    const std::vector<VariableSpec> specs{{"x", "", 0.0, 1.0}};
    for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
        const auto d = latin_hypercube(4, specs, seed);
        EXPECT_EQ(stratum_counts(d, 0), (std::vector<int>{1, 1, 1, 1}));
    }
}

TEST(LatinHypercube, FrozenVariableSinglePoint) {
    const auto d = latin_hypercube(1, {{"sza", "deg", 55.0, 55.0}}, 3);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d.points(0, 0), 55.0);
}

TEST(LatinHypercube, TableBoundsStratumOccupancyAllOnes) {
    const auto specs = atmospheric_variables();
    const auto d = latin_hypercube(500, specs, 2024);
    ASSERT_EQ(d.size(), 500u);
    ASSERT_EQ(d.dims(), 6u);
    for (std::size_t c = 0; c < 6; ++c) {
        const auto counts = stratum_counts(d, c);
        EXPECT_TRUE(std::all_of(counts.begin(), counts.end(), [](int k) { return k == 1; })) << c;
        for (std::size_t i = 0; i < d.size(); ++i) {
            EXPECT_GE(d.points(i, c), specs[c].min);
            EXPECT_LE(d.points(i, c), specs[c].max);
        }
    }
    EXPECT_EQ(d.kind, DesignKind::Lhs);
    EXPECT_EQ(d.seed, 2024u);
}

TEST(LatinHypercube, DeterministicPerSeed) {
    const auto specs = atmospheric_variables();
    EXPECT_EQ(latin_hypercube(50, specs, 7).points, latin_hypercube(50, specs, 7).points);
    EXPECT_NE(latin_hypercube(50, specs, 7).points, latin_hypercube(50, specs, 8).points);
}

TEST(LatinHypercube, Errors) {
    EXPECT_THROW(latin_hypercube(4, {{"x", "", 1.0, 0.0}}, 0), InvalidBounds);
    EXPECT_THROW(latin_hypercube(4, {{"x", "", 0.0, NAN}}, 0), InvalidBounds);
    EXPECT_THROW(latin_hypercube(0, atmospheric_variables(), 0), InvalidBounds);
}

TEST(Vertices, SixTableVariablesGiveSixtyFour) {
    const auto d = vertices(atmospheric_variables());
    EXPECT_EQ(d.size(), 64u);
    std::set<std::vector<double>> unique;
    for (std::size_t i = 0; i < d.size(); ++i) unique.insert({d.points.row(i).begin(), d.points.row(i).end()});
    EXPECT_EQ(unique.size(), 64u);
}

TEST(Vertices, OneAndTwoVariables) {
    EXPECT_EQ(vertices({{"x", "", 0, 1}}).points, (Matrix{{0}, {1}}));
    EXPECT_EQ(vertices({{"x", "", 0, 1}, {"y", "", 2, 3}}).points, (Matrix{{0, 2}, {0, 3}, {1, 2}, {1, 3}}));
}

TEST(Vertices, FrozenVariableStaysFixed) {
    const auto d = vertices({{"x", "", 0, 1}, {"sza", "", 55, 55}});
    EXPECT_EQ(d.points, (Matrix{{0, 55}, {1, 55}}));
}

TEST(Vertices, TooManyDimensions) {
    std::vector<VariableSpec> specs(21, {"v", "", 0, 1});
    EXPECT_THROW(vertices(specs), TooManyDimensions);
}

TEST(Merge, LhsPlusVerticesGives564) {
    const auto specs = atmospheric_variables();
    const auto m = merge(latin_hypercube(500, specs, 1), vertices(specs));
    EXPECT_EQ(m.size(), 564u);
    EXPECT_EQ(m.kind, DesignKind::Merged);
}

TEST(Merge, EmptyAndSelf) {
    const auto specs = atmospheric_variables();
    const auto a = latin_hypercube(20, specs, 1);
    Design empty{specs, Matrix(0, specs.size()), 0, DesignKind::Lhs};
    EXPECT_EQ(merge(a, empty).points, a.points);
    EXPECT_EQ(merge(a, a).points, a.points);
}

TEST(Merge, SpecMismatch) {
    const auto a = latin_hypercube(5, {{"x", "", 0, 1}}, 1);
    const auto b = latin_hypercube(5, {{"y", "", 0, 1}}, 1);
    EXPECT_THROW(merge(a, b), SpecMismatch);
}

TEST(DesignCsv, HeaderAndRowsRoundTrip) {
    const auto dir = lutbench::testing::scratch_dir("design_csv");
    const auto d = latin_hypercube(3, atmospheric_variables(), 5);
    const auto path = dir + "/d.csv";
    export_design_csv(d, path);
    std::ifstream is(path);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "O3C,CWV,AOT,G,ALPHA,SSA");
    for (std::size_t i = 0; i < 3; ++i) {
        ASSERT_TRUE(std::getline(is, line));
        std::size_t pos = 0;
        for (std::size_t c = 0; c < 6; ++c) {
            std::size_t used = 0;
            EXPECT_EQ(std::stod(line.substr(pos), &used), d.points(i, c));
            pos += used + 1;
        }
    }
    EXPECT_FALSE(std::getline(is, line));
    EXPECT_THROW(export_design_csv(d, ""), IoError);
}

TEST(DesignKind, StringRoundTrip) {
    for (auto k : {DesignKind::Lhs, DesignKind::Vertices, DesignKind::Merged})
        EXPECT_EQ(design_kind_from_string(to_string(k)), k);
}
