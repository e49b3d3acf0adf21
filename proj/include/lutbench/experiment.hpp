#pragma once

// The benchmark pipeline behind the lutbench CLI: generate the training and
// reference LUTs, run interpolation and emulation against the reference,
// write reports, figures and a manifest.

#include "lutbench/gpr.hpp"
#include "lutbench/metrics.hpp"
#include "lutbench/rtm.hpp"
#include "lutbench/sampling.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lutbench {

inline constexpr const char* kToolVersion = "1.0.0";

struct ExperimentConfig {
    double grid_start = 400.0;
    double grid_stop = 2400.0;
    double grid_step = 5.0;
    Geometry geometry;
    std::vector<VariableSpec> variables = atmospheric_variables();
    std::vector<std::size_t> lut_sizes{500, 2000};
    std::size_t reference_size = 5000;
    bool vertex_augmentation = true;
    std::vector<std::size_t> pca_components{10, 20};
    double train_fraction = 0.70;
    int restarts = 5;
    int max_iterations = 200;
    std::size_t hyper_subset = 256;
    std::uint64_t seed = 1;
    NrmseNorm nrmse_norm = NrmseNorm::PerWavelength;
    std::string output_dir = "lutbench_out";

    SpectralGrid grid() const;
    /// Throws InvalidConfig (or InvalidBounds for the variables).
    void validate() const;

    std::uint64_t reference_seed() const;
    std::uint64_t lut_seed(std::size_t lut_size) const;
    std::uint64_t emulator_seed(std::size_t lut_size) const;
    TrainConfig train_config(std::size_t lut_size) const;

    nlohmann::json to_json() const;
    /// Missing keys keep their defaults; unknown keys are rejected.
    static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Throws IoError when unreadable, InvalidConfig when malformed.
ExperimentConfig load_config(const std::string& path);

struct RunManifest {
    nlohmann::json config;
    std::vector<std::string> artifacts;  ///< paths relative to the output directory
    std::vector<std::pair<std::string, double>> stage_seconds;
    std::string tool_version = kToolVersion;
    std::string status = "ok";
    std::string error;
};

/// Lists every file under `dir` (plus manifest.json itself) and writes
/// dir/manifest.json.
void write_manifest(RunManifest& manifest, const std::string& dir);

std::string reference_lut_path(const ExperimentConfig& cfg);
std::string training_lut_path(const ExperimentConfig& cfg, std::size_t lut_size);

/// Reference LHS design with `reference_size` rows.
Design reference_design(const ExperimentConfig& cfg);
/// LHS design of `lut_size` rows, merged with the bounds-box vertices when enabled.
Design training_design(const ExperimentConfig& cfg, std::size_t lut_size);

/// Writes the reference LUT and every training LUT. Returns their paths.
std::vector<std::string> cmd_generate(const ExperimentConfig& cfg);

struct RunOptions {
    /// Empty, "linear", "gpr" or "gpr-<p>".
    std::string only;
    /// Generate missing LUTs instead of failing.
    bool generate = false;
};

struct RunResult {
    std::vector<EvalReport> reports;
    RunManifest manifest;
};

/// Full comparison against the reference LUT. On failure a manifest with
/// status "failed" is still written before the error propagates.
RunResult cmd_run(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Scores a saved emulator against a LUT file.
EvalReport cmd_validate(const std::string& model_path, const std::string& lut_path,
                        NrmseNorm norm = NrmseNorm::PerWavelength);

}  // namespace lutbench
