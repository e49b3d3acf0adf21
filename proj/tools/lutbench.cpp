// lutbench: LUT interpolation vs GP emulation benchmark.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure,
// 1 anything unexpected.

#include "lutbench/errors.hpp"
#include "lutbench/experiment.hpp"
#include "lutbench/report.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace lutbench;

namespace {

int exit_code(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Config: return 2;
        case ErrorCategory::Data: return 3;
        case ErrorCategory::Numerical: return 4;
    }
    return 1;
}

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string only;
    int threads = 0;
    std::string nrmse_norm;
    bool generate = false;
    std::string model;
    std::string lut;
};

ExperimentConfig resolve_config(const Options& o) {
    ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (const char* env = std::getenv("LUTBENCH_OUT"); env && *env) cfg.output_dir = env;
    if (o.seed) cfg.seed = *o.seed;
    if (!o.nrmse_norm.empty()) cfg.nrmse_norm = nrmse_norm_from_string(o.nrmse_norm);
    cfg.validate();
    return cfg;
}

void print_speed(const std::vector<EvalReport>& reports) {
    for (const auto& lin : reports) {
        if (lin.method != "linear") continue;
        for (const auto& g : reports) {
            if (g.lut_size != lin.lut_size || g.components == 0 || !(g.query_seconds > 0.0)) continue;
            std::cout << "speed " << g.method << " @ " << g.lut_size << ": interpolation (build + query) / "
                      << "prediction = " << (lin.build_seconds + lin.query_seconds) / g.query_seconds
                      << "x, query only = " << lin.query_seconds / g.query_seconds << "x\n";
        }
    }
}

int run_validate(const Options& o, const ExperimentConfig& cfg) {
    std::vector<std::string> models;
    if (!o.model.empty()) {
        models.push_back(o.model);
    } else {
        std::error_code ec;
        for (fs::directory_iterator it(cfg.output_dir, ec), end; !ec && it != end; it.increment(ec)) {
            const auto name = it->path().filename().string();
            if (name.rfind("model_", 0) == 0 && it->path().extension() == ".lbm")
                models.push_back(it->path().string());
        }
        std::sort(models.begin(), models.end());
        if (models.empty()) throw IoError("no model_*.lbm files in '" + cfg.output_dir + "'");
    }
    const std::string lut = o.lut.empty() ? reference_lut_path(cfg) : o.lut;
    std::vector<EvalReport> reports;
    for (const auto& m : models) {
        reports.push_back(cmd_validate(m, lut, cfg.nrmse_norm));
        const auto stem = fs::path(cfg.output_dir) / ("validate_" + fs::path(m).stem().string());
        fs::create_directories(cfg.output_dir);
        write_report_json(reports.back(), stem.string() + ".json");
        write_report_csv(reports.back(), stem.string() + ".csv");
    }
    std::cout << "validated against " << lut << "\n" << summary_text(reports);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark of LUT interpolation against GP emulation of TOA radiance spectra"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON experiment config");
        sub->add_option("--out", o.out, "output directory (LUTBENCH_OUT overrides)");
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--threads", o.threads, "cap on OpenMP worker threads")->check(CLI::NonNegativeNumber);
        sub->add_option("--nrmse-norm", o.nrmse_norm, "per-wavelength or global")
            ->check(CLI::IsMember({"per-wavelength", "global"}));
    };
    auto* gen = app.add_subcommand("generate", "write the reference and training LUTs");
    add_common(gen);
    auto* run = app.add_subcommand("run", "compare interpolation and emulation against the reference LUT");
    add_common(run);
    run->add_option("--only", o.only, "linear, gpr or gpr-<p>");
    run->add_flag("--generate", o.generate, "generate missing LUTs");
    auto* val = app.add_subcommand("validate", "score saved emulators against a LUT");
    add_common(val);
    val->add_option("--model", o.model, "model file (default: every model in the output directory)");
    val->add_option("--lut", o.lut, "LUT file (default: the reference LUT)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (o.threads > 0) omp_set_num_threads(o.threads);
        const ExperimentConfig cfg = resolve_config(o);
        if (*gen) {
            for (const auto& p : cmd_generate(cfg)) std::cout << "wrote " << p << "\n";
            return 0;
        }
        if (*run) {
            RunOptions ro;
            ro.only = o.only;
            ro.generate = o.generate;
            const auto res = cmd_run(cfg, ro);
            std::cout << summary_text(res.reports);
            print_speed(res.reports);
            std::cout << "outputs in " << cfg.output_dir << "\n";
            return 0;
        }
        return run_validate(o, cfg);
    } catch (const Error& e) {
        std::cerr << "lutbench: " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "lutbench: " << e.what() << "\n";
        return 1;
    }
}
