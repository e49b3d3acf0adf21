#pragma once

// Single-file binary container:
//
//   <one-line UTF-8 JSON header>\n
//   LUTBENCH                       (8-byte magic)
//   <float64 little-endian blocks in descriptor order>
//
// Header: {"schema_version": 1, "kind": ..., "meta": {...},
//          "arrays": [{"name": ..., "shape": [...], "offset": <bytes from payload start>}]}

#include "lutbench/lut.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace lutbench {

inline constexpr int kContainerSchemaVersion = 1;
inline constexpr char kContainerMagic[8] = {'L', 'U', 'T', 'B', 'E', 'N', 'C', 'H'};

struct ArrayBlock {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> data;
};

struct Container {
    std::string kind;
    nlohmann::json meta = nlohmann::json::object();
    std::vector<ArrayBlock> arrays;

    /// Throws FormatError when the array is missing.
    const ArrayBlock& array(const std::string& name) const;
};

void write_container(const Container& c, const std::string& path);
Container read_container(const std::string& path);

/// Matrix from a 2-D block; throws FormatError on a shape mismatch.
Matrix block_to_matrix(const ArrayBlock& block);
ArrayBlock matrix_block(std::string name, const Matrix& m);
ArrayBlock vector_block(std::string name, std::vector<double> v);

void save_lut(const Lut& lut, const std::string& path);
Lut load_lut(const std::string& path);

/// Header: variable names then wavelengths; one row per node; 17 significant digits.
void export_csv(const Lut& lut, const std::string& path);

nlohmann::json specs_to_json(const std::vector<VariableSpec>& specs);
std::vector<VariableSpec> specs_from_json(const nlohmann::json& j);
nlohmann::json geometry_to_json(const Geometry& g);
Geometry geometry_from_json(const nlohmann::json& j);

}  // namespace lutbench
