#include "lutbench/lut_store.hpp"

#include "lutbench/errors.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace lutbench {

namespace {

using nlohmann::json;

std::size_t element_count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
}

void append_le(std::string& out, const std::vector<double>& v) {
    const std::size_t start = out.size();
    out.resize(start + v.size() * 8);
    char* dst = out.data() + start;
    for (double d : v) {
        auto bits = std::bit_cast<std::uint64_t>(d);
        for (int b = 0; b < 8; ++b) *dst++ = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
}

std::vector<double> read_le(const char* src, std::size_t count) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(src[i * 8 + b])) << (8 * b);
        v[i] = std::bit_cast<double>(bits);
    }
    return v;
}

}  // namespace

const ArrayBlock& Container::array(const std::string& name) const {
    for (const auto& a : arrays)
        if (a.name == name) return a;
    throw FormatError("container has no array '" + name + "'");
}

void write_container(const Container& c, const std::string& path) {
    json header;
    header["schema_version"] = kContainerSchemaVersion;
    header["kind"] = c.kind;
    header["meta"] = c.meta;
    header["arrays"] = json::array();
    std::string payload;
    for (const auto& a : c.arrays) {
        if (element_count(a.shape) != a.data.size())
            throw DimensionMismatch("array '" + a.name + "' shape does not match its data");
        header["arrays"].push_back({{"name", a.name}, {"shape", a.shape}, {"offset", payload.size()}});
        append_le(payload, a.data);
    }

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (path.empty() || !os) throw IoError("cannot open '" + path + "' for writing");
    const std::string text = header.dump();
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    os.put('\n');
    os.write(kContainerMagic, sizeof kContainerMagic);
    os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!os) throw IoError("write failed for '" + path + "'");
}

Container read_container(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

    const auto newline = bytes.find('\n');
    if (newline == std::string::npos) throw FormatError(path + ": missing header line");
    json header;
    try {
        header = json::parse(bytes.substr(0, newline));
    } catch (const json::exception& e) {
        throw FormatError(path + ": header is not valid JSON (" + e.what() + ")");
    }
    const std::size_t magic_at = newline + 1;
    if (bytes.size() < magic_at + 8 ||
        std::memcmp(bytes.data() + magic_at, kContainerMagic, 8) != 0) {
        throw FormatError(path + ": bad magic");
    }
    try {
        const int version = header.at("schema_version").get<int>();
        if (version != kContainerSchemaVersion)
            throw VersionError(path + ": unsupported schema version " + std::to_string(version));

        Container c;
        c.kind = header.at("kind").get<std::string>();
        c.meta = header.value("meta", json::object());
        const char* payload = bytes.data() + magic_at + 8;
        const std::size_t payload_size = bytes.size() - magic_at - 8;
        std::size_t expected_offset = 0;
        for (const auto& d : header.at("arrays")) {
            ArrayBlock a;
            a.name = d.at("name").get<std::string>();
            a.shape = d.at("shape").get<std::vector<std::size_t>>();
            const auto offset = d.at("offset").get<std::size_t>();
            const std::size_t count = element_count(a.shape);
            if (offset != expected_offset || offset + count * 8 > payload_size)
                throw FormatError(path + ": array '" + a.name + "' exceeds the payload");
            a.data = read_le(payload + offset, count);
            expected_offset = offset + count * 8;
            c.arrays.push_back(std::move(a));
        }
        if (expected_offset != payload_size)
            throw FormatError(path + ": payload length does not match descriptors");
        return c;
    } catch (const json::exception& e) {
        throw FormatError(path + ": malformed header (" + e.what() + ")");
    }
}

Matrix block_to_matrix(const ArrayBlock& block) {
    if (block.shape.size() != 2) throw FormatError("array '" + block.name + "' is not 2-D");
    return Matrix(block.shape[0], block.shape[1], block.data);
}

ArrayBlock matrix_block(std::string name, const Matrix& m) {
    return {std::move(name), {m.rows(), m.cols()}, m.data()};
}

ArrayBlock vector_block(std::string name, std::vector<double> v) {
    const std::size_t n = v.size();
    return {std::move(name), {n}, std::move(v)};
}

json specs_to_json(const std::vector<VariableSpec>& specs) {
    json out = json::array();
    for (const auto& s : specs)
        out.push_back({{"name", s.name}, {"units", s.units}, {"min", s.min}, {"max", s.max}});
    return out;
}

std::vector<VariableSpec> specs_from_json(const json& j) {
    std::vector<VariableSpec> specs;
    for (const auto& s : j) {
        specs.push_back({s.at("name").get<std::string>(), s.value("units", std::string{}),
                         s.at("min").get<double>(), s.at("max").get<double>()});
    }
    return specs;
}

json geometry_to_json(const Geometry& g) { return {{"sza", g.sza}, {"vza", g.vza}, {"raa", g.raa}}; }

Geometry geometry_from_json(const json& j) {
    return {j.at("sza").get<double>(), j.at("vza").get<double>(), j.at("raa").get<double>()};
}

void save_lut(const Lut& lut, const std::string& path) {
    if (lut.spectra.rows() != lut.design.size() || lut.spectra.cols() != lut.grid.size())
        throw DimensionMismatch("LUT spectra shape does not match design and grid");
    Container c;
    c.kind = "lut";
    c.meta = {{"variables", specs_to_json(lut.design.specs)},
              {"design_seed", lut.design.seed},
              {"design_kind", to_string(lut.design.kind)},
              {"geometry", geometry_to_json(lut.geometry)},
              {"provenance", lut.provenance},
              {"created", lut.created}};
    c.arrays.push_back(matrix_block("design", lut.design.points));
    c.arrays.push_back(vector_block("wavelengths", lut.grid.wavelengths()));
    c.arrays.push_back(matrix_block("spectra", lut.spectra));
    write_container(c, path);
}

Lut load_lut(const std::string& path) {
    const Container c = read_container(path);
    if (c.kind != "lut") throw FormatError(path + ": container kind is '" + c.kind + "', not 'lut'");
    try {
        Lut lut;
        lut.design.specs = specs_from_json(c.meta.at("variables"));
        lut.design.seed = c.meta.at("design_seed").get<std::uint64_t>();
        lut.design.kind = design_kind_from_string(c.meta.at("design_kind").get<std::string>());
        lut.design.points = block_to_matrix(c.array("design"));
        lut.grid = SpectralGrid(c.array("wavelengths").data);
        lut.geometry = geometry_from_json(c.meta.at("geometry"));
        lut.spectra = block_to_matrix(c.array("spectra"));
        lut.provenance = c.meta.value("provenance", std::string{});
        lut.created = c.meta.value("created", std::string{});
        if (lut.design.points.cols() != lut.design.specs.size() ||
            lut.spectra.rows() != lut.design.size() || lut.spectra.cols() != lut.grid.size()) {
            throw FormatError(path + ": array shapes are inconsistent");
        }
        return lut;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": malformed LUT metadata (" + e.what() + ")");
    } catch (const InvalidConfig& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void export_csv(const Lut& lut, const std::string& path) {
    std::ofstream os(path);
    if (path.empty() || !os) throw IoError("cannot open '" + path + "' for writing");
    char buf[32];
    bool first = true;
    for (const auto& s : lut.design.specs) {
        os << (first ? "" : ",") << s.name;
        first = false;
    }
    for (double nm : lut.grid.wavelengths()) {
        std::snprintf(buf, sizeof buf, "%.17g", nm);
        os << ',' << buf;
    }
    os << '\n';
    for (std::size_t r = 0; r < lut.size(); ++r) {
        first = true;
        for (double v : lut.design.points.row(r)) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << (first ? "" : ",") << buf;
            first = false;
        }
        for (double v : lut.spectra.row(r)) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << ',' << buf;
        }
        os << '\n';
    }
    if (!os) throw IoError("write failed for '" + path + "'");
}

}  // namespace lutbench
