#include "lutbench/errors.hpp"
#include "lutbench/lut_store.hpp"
#include "lutbench/model_store.hpp"
#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <sstream>

using namespace lutbench;
using lutbench::testing::scratch_dir;

namespace {

Lut small_lut(std::size_t n, std::uint64_t seed = 4) {
    const auto specs = atmospheric_variables();
    Lut lut = generate_lut(latin_hypercube(n, specs, seed), SpectralGrid::uniform(400, 2400, 100), Geometry{});
    lut.created = "1970-01-01T00:00:00Z";
    return lut;
}

void expect_same(const Lut& a, const Lut& b) {
    EXPECT_EQ(a.design.specs, b.design.specs);
    EXPECT_EQ(a.design.points, b.design.points);
    EXPECT_EQ(a.design.seed, b.design.seed);
    EXPECT_EQ(a.design.kind, b.design.kind);
    EXPECT_EQ(a.grid, b.grid);
    EXPECT_EQ(a.geometry, b.geometry);
    EXPECT_EQ(a.spectra, b.spectra);
    EXPECT_EQ(a.provenance, b.provenance);
    EXPECT_EQ(a.created, b.created);
}

std::string read_all(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_all(const std::string& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << bytes;
}

}  // namespace

TEST(LutStore, RoundTripIsBitIdentical) {
    const auto dir = scratch_dir("lut_roundtrip");
    const Lut lut = small_lut(30);
    save_lut(lut, dir + "/a.lut");
    expect_same(lut, load_lut(dir + "/a.lut"));
}

TEST(LutStore, SingleRowLut) {
    const auto dir = scratch_dir("lut_single");
    const Lut lut = small_lut(1);
    save_lut(lut, dir + "/one.lut");
    expect_same(lut, load_lut(dir + "/one.lut"));
}

TEST(LutStore, LayoutHeaderMagicPayload) {
    const auto dir = scratch_dir("lut_layout");
    const Lut lut = small_lut(3);
    save_lut(lut, dir + "/a.lut");
    const auto bytes = read_all(dir + "/a.lut");
    const auto nl = bytes.find('\n');
    ASSERT_NE(nl, std::string::npos);
    const auto header = nlohmann::json::parse(bytes.substr(0, nl));
    EXPECT_EQ(header["schema_version"], 1);
    EXPECT_EQ(header["kind"], "lut");
    EXPECT_EQ(bytes.substr(nl + 1, 8), "LUTBENCH");
    std::size_t total = 0;
    for (const auto& a : header["arrays"]) {
        std::size_t n = 1;
        for (const auto& s : a["shape"]) n *= s.get<std::size_t>();
        EXPECT_EQ(a["offset"].get<std::size_t>(), total);
        total += 8 * n;
    }
    EXPECT_EQ(bytes.size(), nl + 1 + 8 + total);
    // First design value, little-endian.
    const auto& first = header["arrays"][0];
    EXPECT_EQ(first["name"], "design");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[nl + 9 + b])) << (8 * b);
    double v;
    std::memcpy(&v, &bits, 8);
    EXPECT_EQ(v, lut.design.points(0, 0));
}

TEST(LutStore, TruncatedPayloadIsFormatError) {
    const auto dir = scratch_dir("lut_trunc");
    save_lut(small_lut(5), dir + "/a.lut");
    auto bytes = read_all(dir + "/a.lut");
    bytes.resize(bytes.size() - 3);
    write_all(dir + "/a.lut", bytes);
    EXPECT_THROW(load_lut(dir + "/a.lut"), FormatError);
}

TEST(LutStore, WrongMagicIsFormatError) {
    const auto dir = scratch_dir("lut_magic");
    save_lut(small_lut(5), dir + "/a.lut");
    auto bytes = read_all(dir + "/a.lut");
    bytes[bytes.find('\n') + 1] = 'X';
    write_all(dir + "/a.lut", bytes);
    EXPECT_THROW(load_lut(dir + "/a.lut"), FormatError);
}

TEST(LutStore, FutureSchemaIsVersionError) {
    const auto dir = scratch_dir("lut_version");
    save_lut(small_lut(5), dir + "/a.lut");
    auto bytes = read_all(dir + "/a.lut");
    const auto pos = bytes.find("\"schema_version\":1");
    ASSERT_NE(pos, std::string::npos);
    bytes.replace(pos, 18, "\"schema_version\":2");
    write_all(dir + "/a.lut", bytes);
    EXPECT_THROW(load_lut(dir + "/a.lut"), VersionError);
}

TEST(LutStore, IoErrors) {
    EXPECT_THROW(save_lut(small_lut(2), "/nonexistent_dir_lutbench/a.lut"), IoError);
    EXPECT_THROW(load_lut("/nonexistent_dir_lutbench/a.lut"), IoError);
}

TEST(LutStore, ShapeMismatchInHeaderIsFormatError) {
    const auto dir = scratch_dir("lut_shape");
    Container c;
    c.kind = "lut";
    c.arrays.push_back({"design", {2, 6}, std::vector<double>(12, 0.5)});
    write_container(c, dir + "/a.lut");
    auto bytes = read_all(dir + "/a.lut");
    const auto pos = bytes.find("[2,6]");
    ASSERT_NE(pos, std::string::npos);
    bytes.replace(pos, 5, "[3,6]");
    write_all(dir + "/a.lut", bytes);
    EXPECT_THROW(read_container(dir + "/a.lut"), FormatError);
}

TEST(LutCsv, ToyLutThreeLines) {
    const auto dir = scratch_dir("lut_csv");
    Lut lut = small_lut(2);
    export_csv(lut, dir + "/a.csv");
    std::ifstream is(dir + "/a.csv");
    std::vector<std::string> lines;
    for (std::string l; std::getline(is, l);) lines.push_back(l);
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0].rfind("O3C,CWV,AOT,G,ALPHA,SSA,400,500", 0), 0u);
    // Values survive the decimal round trip.
    std::stringstream row(lines[1]);
    std::vector<double> values;
    for (std::string cell; std::getline(row, cell, ',');) values.push_back(std::stod(cell));
    ASSERT_EQ(values.size(), 6 + lut.grid.size());
    for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(values[c], lut.design.points(0, c));
    for (std::size_t k = 0; k < lut.grid.size(); ++k)
        EXPECT_LE(std::abs(values[6 + k] - lut.spectra(0, k)), 1e-15 * std::abs(lut.spectra(0, k)));
    EXPECT_THROW(export_csv(lut, ""), IoError);
}

TEST(ModelStore, RoundTripPredictsIdentically) {
    const auto dir = scratch_dir("model_roundtrip");
    const auto specs = atmospheric_variables();
    const Lut lut = generate_lut(merge(latin_hypercube(40, specs, 8), vertices(specs)),
                                 SpectralGrid::uniform(400, 2400, 50), Geometry{});
    TrainConfig cfg;
    cfg.n_components = 3;
    cfg.restarts = 2;
    cfg.max_iterations = 30;
    const auto model = train_emulator(lut, cfg);
    save_model(model, dir + "/m.lbm");
    const auto loaded = load_model(dir + "/m.lbm");
    EXPECT_EQ(loaded.components.size(), 3u);
    EXPECT_EQ(loaded.train_rows, model.train_rows);
    EXPECT_EQ(loaded.valid_rows, model.valid_rows);
    EXPECT_EQ(loaded.pca.basis, model.pca.basis);
    for (std::size_t c = 0; c < 3; ++c) {
        EXPECT_EQ(loaded.components[c].hyper.theta, model.components[c].hyper.theta);
        EXPECT_EQ(loaded.components[c].alpha, model.components[c].alpha);
        EXPECT_EQ(loaded.components[c].chol, model.components[c].chol);
    }
    EXPECT_EQ(predict(loaded, lut.design.points).spectra, predict(model, lut.design.points).spectra);
    EXPECT_THROW(load_model("/nonexistent_dir_lutbench/m.lbm"), IoError);
}

TEST(ModelStore, LutFileIsNotAModel) {
    const auto dir = scratch_dir("model_kind");
    save_lut(small_lut(3), dir + "/a.lut");
    EXPECT_THROW(load_model(dir + "/a.lut"), FormatError);
}
