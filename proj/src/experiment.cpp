#include "lutbench/experiment.hpp"

#include "lutbench/errors.hpp"
#include "lutbench/lut_store.hpp"
#include "lutbench/model_store.hpp"
#include "lutbench/report.hpp"
#include "lutbench/rng.hpp"
#include "lutbench/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>

namespace lutbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kWarmupQueries = 10;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
}

/// Deterministic creation stamp so that regenerated files are byte-identical.
std::string creation_stamp() {
    long long epoch = 0;
    if (const char* s = std::getenv("SOURCE_DATE_EPOCH")) {
        try {
            epoch = std::stoll(s);
        } catch (const std::exception&) {
            epoch = 0;
        }
    }
    const std::time_t t = static_cast<std::time_t>(epoch);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Matrix head_rows(const Matrix& m, std::size_t count) {
    std::vector<std::size_t> rows(std::min(count, m.rows()));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return m.select_rows(rows);
}

struct MethodFilter {
    bool linear = true;
    std::set<std::size_t> components;
};

MethodFilter parse_only(const std::string& only, const ExperimentConfig& cfg) {
    MethodFilter f;
    f.components.insert(cfg.pca_components.begin(), cfg.pca_components.end());
    if (only.empty()) return f;
    if (only == "linear") {
        f.components.clear();
        return f;
    }
    f.linear = false;
    if (only == "gpr") return f;
    if (only.rfind("gpr-", 0) == 0) {
        try {
            std::size_t pos = 0;
            const auto p = std::stoul(only.substr(4), &pos);
            if (pos == only.size() - 4 && f.components.count(p)) {
                f.components = {p};
                return f;
            }
        } catch (const std::exception&) {
        }
    }
    throw InvalidConfig("--only must be linear, gpr or gpr-<p> with p among the configured "
                        "component counts, got '" + only + "'");
}

Lut load_or_generate(const std::string& path, const Design& design, const ExperimentConfig& cfg,
                     bool generate) {
    if (fs::exists(path)) {
        Lut lut = load_lut(path);
        if (!(lut.grid == cfg.grid()) || lut.design.specs != cfg.variables)
            throw FormatError(path + ": LUT does not match the configured grid or variables");
        return lut;
    }
    if (!generate)
        throw IoError("LUT file '" + path + "' not found; run 'lutbench generate' first or pass --generate");
    Lut lut = generate_lut(design, cfg.grid(), cfg.geometry);
    lut.created = creation_stamp();
    save_lut(lut, path);
    return lut;
}

std::vector<std::size_t> get_sizes(const json& j, const char* key) {
    std::vector<std::size_t> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number_integer() || v.get<std::int64_t>() <= 0)
            throw InvalidConfig(std::string(key) + " must hold positive integers");
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

}  // namespace

SpectralGrid ExperimentConfig::grid() const { return SpectralGrid::uniform(grid_start, grid_stop, grid_step); }

void ExperimentConfig::validate() const {
    (void)grid();
    geometry.validate();
    validate_specs(variables);
    if (variables.size() != kNumAtmVars)
        throw InvalidConfig("the surrogate RTM takes exactly 6 variables");
    if (lut_sizes.empty()) throw InvalidConfig("no LUT sizes configured");
    if (std::any_of(lut_sizes.begin(), lut_sizes.end(), [](std::size_t n) { return n == 0; }))
        throw InvalidConfig("LUT sizes must be positive");
    const std::size_t largest = *std::max_element(lut_sizes.begin(), lut_sizes.end());
    if (reference_size <= largest)
        throw InvalidConfig("reference size " + std::to_string(reference_size) +
                            " must exceed the largest LUT size " + std::to_string(largest));
    if (pca_components.empty()) throw InvalidConfig("no PCA component counts configured");
    for (const auto p : pca_components)
        if (p == 0) throw InvalidConfig("PCA component counts must be positive");
    train_config(largest).validate();
    if (output_dir.empty()) throw InvalidConfig("output directory is empty");
}

std::uint64_t ExperimentConfig::reference_seed() const { return CounterRng::derive(seed, "reference"); }

std::uint64_t ExperimentConfig::lut_seed(std::size_t lut_size) const {
    return CounterRng::derive(CounterRng::derive(seed, "training-lut"), lut_size);
}

std::uint64_t ExperimentConfig::emulator_seed(std::size_t lut_size) const {
    return CounterRng::derive(CounterRng::derive(seed, "emulator"), lut_size);
}

TrainConfig ExperimentConfig::train_config(std::size_t lut_size) const {
    TrainConfig t;
    t.n_components = pca_components.empty() ? 1 : *std::max_element(pca_components.begin(), pca_components.end());
    t.train_fraction = train_fraction;
    t.seed = emulator_seed(lut_size);
    t.restarts = restarts;
    t.max_iterations = max_iterations;
    t.hyper_subset = hyper_subset;
    return t;
}

json ExperimentConfig::to_json() const {
    json seeds = {{"seed", seed}, {"reference", reference_seed()}};
    for (const auto n : lut_sizes) {
        seeds["training_lut_" + std::to_string(n)] = lut_seed(n);
        seeds["emulator_" + std::to_string(n)] = emulator_seed(n);
    }
    return {{"grid", {{"start", grid_start}, {"stop", grid_stop}, {"step", grid_step}}},
            {"geometry", geometry_to_json(geometry)},
            {"variables", specs_to_json(variables)},
            {"lut_sizes", lut_sizes},
            {"reference_size", reference_size},
            {"vertex_augmentation", vertex_augmentation},
            {"pca_components", pca_components},
            {"train_fraction", train_fraction},
            {"restarts", restarts},
            {"max_iterations", max_iterations},
            {"hyper_subset", hyper_subset},
            {"seed", seed},
            {"derived_seeds", seeds},
            {"nrmse_norm", to_string(nrmse_norm)},
            {"output_dir", output_dir}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
    static const std::set<std::string> known = {
        "grid",     "geometry",       "variables",      "lut_sizes",    "reference_size",
        "vertex_augmentation",        "pca_components", "train_fraction", "restarts",
        "max_iterations", "hyper_subset", "seed",       "nrmse_norm",   "output_dir",
        "derived_seeds"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw InvalidConfig("unknown config key '" + key + "'");

    ExperimentConfig c;
    try {
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            c.grid_start = g.value("start", c.grid_start);
            c.grid_stop = g.value("stop", c.grid_stop);
            c.grid_step = g.value("step", c.grid_step);
        }
        if (j.contains("geometry")) {
            const auto& g = j.at("geometry");
            c.geometry.sza = g.value("sza", c.geometry.sza);
            c.geometry.vza = g.value("vza", c.geometry.vza);
            c.geometry.raa = g.value("raa", c.geometry.raa);
        }
        if (j.contains("variables")) c.variables = specs_from_json(j.at("variables"));
        if (j.contains("lut_sizes")) c.lut_sizes = get_sizes(j, "lut_sizes");
        if (j.contains("pca_components")) c.pca_components = get_sizes(j, "pca_components");
        c.reference_size = j.value("reference_size", c.reference_size);
        c.vertex_augmentation = j.value("vertex_augmentation", c.vertex_augmentation);
        c.train_fraction = j.value("train_fraction", c.train_fraction);
        c.restarts = j.value("restarts", c.restarts);
        c.max_iterations = j.value("max_iterations", c.max_iterations);
        c.hyper_subset = j.value("hyper_subset", c.hyper_subset);
        c.seed = j.value("seed", c.seed);
        if (j.contains("nrmse_norm")) c.nrmse_norm = nrmse_norm_from_string(j.at("nrmse_norm").get<std::string>());
        c.output_dir = j.value("output_dir", c.output_dir);
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config '" + path + "'");
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw InvalidConfig(path + ": " + e.what());
    }
    return ExperimentConfig::from_json(j);
}

void write_manifest(RunManifest& manifest, const std::string& dir) {
    std::set<std::string> files{"manifest.json"};
    std::error_code ec;
    for (fs::recursive_directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec))
        if (it->is_regular_file()) files.insert(fs::relative(it->path(), dir).generic_string());
    manifest.artifacts.assign(files.begin(), files.end());

    json stages = json::array();
    for (const auto& [name, s] : manifest.stage_seconds) stages.push_back({{"stage", name}, {"seconds", s}});
    json j = {{"tool", "lutbench"},
              {"tool_version", manifest.tool_version},
              {"status", manifest.status},
              {"config", manifest.config},
              {"stages", stages},
              {"artifacts", manifest.artifacts}};
    if (!manifest.error.empty()) j["error"] = manifest.error;
    write_text(j.dump(2) + "\n", join(dir, "manifest.json"));
}

std::string reference_lut_path(const ExperimentConfig& cfg) {
    return join(cfg.output_dir, "lut_reference_" + std::to_string(cfg.reference_size) + ".lut");
}

std::string training_lut_path(const ExperimentConfig& cfg, std::size_t lut_size) {
    return join(cfg.output_dir, "lut_train_" + std::to_string(lut_size) + ".lut");
}

Design reference_design(const ExperimentConfig& cfg) {
    return latin_hypercube(cfg.reference_size, cfg.variables, cfg.reference_seed());
}

Design training_design(const ExperimentConfig& cfg, std::size_t lut_size) {
    Design d = latin_hypercube(lut_size, cfg.variables, cfg.lut_seed(lut_size));
    return cfg.vertex_augmentation ? merge(d, vertices(cfg.variables)) : d;
}

std::vector<std::string> cmd_generate(const ExperimentConfig& cfg) {
    cfg.validate();
    ensure_dir(cfg.output_dir);
    RunManifest manifest;
    manifest.config = cfg.to_json();
    std::vector<std::string> paths;
    try {
        const auto grid = cfg.grid();
        const auto stamp = creation_stamp();
        auto t0 = std::chrono::steady_clock::now();
        Lut ref = generate_lut(reference_design(cfg), grid, cfg.geometry);
        ref.created = stamp;
        paths.push_back(reference_lut_path(cfg));
        save_lut(ref, paths.back());
        manifest.stage_seconds.emplace_back("generate_reference", seconds_since(t0));
        for (const auto n : cfg.lut_sizes) {
            t0 = std::chrono::steady_clock::now();
            Lut lut = generate_lut(training_design(cfg, n), grid, cfg.geometry);
            lut.created = stamp;
            paths.push_back(training_lut_path(cfg, n));
            save_lut(lut, paths.back());
            manifest.stage_seconds.emplace_back("generate_train_" + std::to_string(n), seconds_since(t0));
        }
    } catch (const std::exception& e) {
        manifest.status = "failed";
        manifest.error = e.what();
        write_manifest(manifest, cfg.output_dir);
        throw;
    }
    write_manifest(manifest, cfg.output_dir);
    return paths;
}

RunResult cmd_run(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    const MethodFilter filter = parse_only(opts.only, cfg);
    ensure_dir(cfg.output_dir);
    RunResult result;
    auto& manifest = result.manifest;
    manifest.config = cfg.to_json();
    manifest.config["only"] = opts.only;
    const std::string& out = cfg.output_dir;

    try {
        auto t0 = std::chrono::steady_clock::now();
        const Lut ref = load_or_generate(reference_lut_path(cfg), reference_design(cfg), cfg, opts.generate);
        manifest.stage_seconds.emplace_back("load_reference", seconds_since(t0));
        const auto& queries = ref.design.points;
        const auto& wl = ref.grid.wavelengths();

        for (const auto n : cfg.lut_sizes) {
            t0 = std::chrono::steady_clock::now();
            const Lut train =
                load_or_generate(training_lut_path(cfg, n), training_design(cfg, n), cfg, opts.generate);
            manifest.stage_seconds.emplace_back("load_train_" + std::to_string(n), seconds_since(t0));

            if (filter.linear) {
                t0 = std::chrono::steady_clock::now();
                const auto tb = std::chrono::steady_clock::now();
                const auto complex = SimplicialComplex::build(train.design.points);
                const double build = seconds_since(tb);
                (void)interpolate_batch(complex, train.spectra, head_rows(queries, kWarmupQueries));
                const auto batch = interpolate_batch(complex, train.spectra, queries);
                MethodOutput mo{"linear", train.size(), 0, batch.spectra, build, batch.seconds};
                result.reports.push_back(compare(ref.spectra, wl, mo, cfg.nrmse_norm));
                manifest.stage_seconds.emplace_back("linear_" + std::to_string(train.size()), seconds_since(t0));
            }

            if (!filter.components.empty()) {
                t0 = std::chrono::steady_clock::now();
                const std::vector<std::size_t> ps(filter.components.begin(), filter.components.end());
                const auto models = train_emulator_family(train, cfg.train_config(n), ps);
                for (const auto& model : models) {
                    const std::string method = "gpr-" + std::to_string(model.components.size());
                    (void)predict(model, head_rows(queries, kWarmupQueries));
                    const auto pred = predict(model, queries);
                    MethodOutput mo{method, train.size(), model.components.size(), pred.spectra,
                                    model.train_seconds, pred.seconds};
                    result.reports.push_back(compare(ref.spectra, wl, mo, cfg.nrmse_norm));
                    save_model(model, join(out, "model_" + method + "_" + std::to_string(train.size()) + ".lbm"));
                }
                manifest.stage_seconds.emplace_back("gpr_" + std::to_string(train.size()), seconds_since(t0));
            }
        }

        t0 = std::chrono::steady_clock::now();
        for (const auto& r : result.reports) {
            const std::string stem = join(out, "report_" + r.method + "_" + std::to_string(r.lut_size));
            write_report_json(r, stem + ".json");
            write_report_csv(r, stem + ".csv");
        }
        write_summary_csv(result.reports, join(out, "summary.csv"));
        write_text(summary_text(result.reports), join(out, "summary.txt"));
        write_text(residual_figure_svg(result.reports), join(out, "fig_residuals.svg"));
        write_text(runtime_figure_svg(result.reports), join(out, "fig_runtime.svg"));
        manifest.stage_seconds.emplace_back("reports", seconds_since(t0));
    } catch (const std::exception& e) {
        manifest.status = "failed";
        manifest.error = e.what();
        write_manifest(manifest, out);
        throw;
    }
    write_manifest(manifest, out);
    return result;
}

EvalReport cmd_validate(const std::string& model_path, const std::string& lut_path, NrmseNorm norm) {
    const EmulatorModel model = load_model(model_path);
    const Lut lut = load_lut(lut_path);
    return validate_model(model, lut, "gpr-" + std::to_string(model.components.size()), norm);
}

}  // namespace lutbench
