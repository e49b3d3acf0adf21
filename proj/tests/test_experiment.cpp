#include "lutbench/errors.hpp"
#include "lutbench/experiment.hpp"
#include "lutbench/lut_store.hpp"
#include "lutbench/report.hpp"
#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace lutbench;
namespace fs = std::filesystem;

namespace {

nlohmann::json small_config_json() {
    return {{"grid", {{"start", 400}, {"stop", 2400}, {"step", 100}}},
            {"lut_sizes", nlohmann::json::array({30})},
            {"reference_size", 120},
            {"pca_components", {3, 5}},
            {"restarts", 2},
            {"max_iterations", 30},
            {"seed", 11}};
}

std::string write_config(const std::string& dir, const nlohmann::json& j) {
    const auto path = dir + "/config.json";
    std::ofstream(path) << j.dump(2);
    return path;
}

int cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + LUTBENCH_CLI + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> summary_lines(const std::string& dir) {
    std::vector<std::string> out;
    std::istringstream is(read_text(dir + "/summary.csv"));
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Config, DefaultsAndJsonRoundTrip) {
    const ExperimentConfig d;
    EXPECT_EQ(d.grid().size(), 401u);
    EXPECT_EQ(d.lut_sizes, (std::vector<std::size_t>{500, 2000}));
    EXPECT_EQ(d.reference_size, 5000u);
    EXPECT_NO_THROW(d.validate());
    const auto back = ExperimentConfig::from_json(d.to_json());
    EXPECT_EQ(back.to_json(), d.to_json());
    EXPECT_NE(d.lut_seed(500), d.lut_seed(2000));
    EXPECT_NE(d.emulator_seed(500), d.lut_seed(500));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(ExperimentConfig::from_json({{"lut_size", 3}}), InvalidConfig);
    EXPECT_THROW(ExperimentConfig::from_json({{"train_fraction", "x"}}), InvalidConfig);
    EXPECT_THROW(ExperimentConfig::from_json({{"reference_size", 2000}}).validate(), InvalidConfig);
    EXPECT_THROW(ExperimentConfig::from_json({{"train_fraction", 1.5}}).validate(), InvalidConfig);
    EXPECT_THROW(load_config("/nonexistent/lutbench.json"), IoError);
}

TEST(Designs, SizesFollowAugmentation) {
    auto c = ExperimentConfig::from_json(small_config_json());
    EXPECT_EQ(training_design(c, 30).size(), 94u);
    c.vertex_augmentation = false;
    EXPECT_EQ(training_design(c, 30).size(), 30u);
    EXPECT_EQ(reference_design(c).size(), 120u);
}

TEST(Pipeline, GenerateIsBitIdenticalAcrossRuns) {
    const auto a = lutbench::testing::scratch_dir("gen_a");
    const auto b = lutbench::testing::scratch_dir("gen_b");
    auto c = ExperimentConfig::from_json(small_config_json());
    c.output_dir = a;
    cmd_generate(c);
    c.output_dir = b;
    cmd_generate(c);
    for (const auto* name : {"lut_reference_120.lut", "lut_train_30.lut"})
        EXPECT_EQ(read_text(a + "/" + name), read_text(b + "/" + name)) << name;
}

TEST(Pipeline, RunWritesReportsManifestAndModels) {
    const auto dir = lutbench::testing::scratch_dir("run_full");
    auto c = ExperimentConfig::from_json(small_config_json());
    c.output_dir = dir;
    RunOptions o;
    o.generate = true;
    const auto res = cmd_run(c, o);
    ASSERT_EQ(res.reports.size(), 3u);
    EXPECT_EQ(res.reports[0].method, "linear");
    for (const auto& r : res.reports) {
        EXPECT_EQ(r.lut_size, 94u);
        EXPECT_EQ(r.evaluated + r.failed, 120u);
        EXPECT_TRUE(std::isfinite(r.nrmse_mean));
    }
    for (const auto* f : {"summary.csv", "summary.txt", "fig_residuals.svg", "fig_runtime.svg",
                          "report_linear_94.json", "report_gpr-3_94.csv", "model_gpr-5_94.lbm"})
        EXPECT_TRUE(fs::exists(dir + "/" + f)) << f;

    const auto manifest = nlohmann::json::parse(read_text(dir + "/manifest.json"));
    EXPECT_EQ(manifest.at("status"), "ok");
    std::set<std::string> listed(manifest.at("artifacts").begin(), manifest.at("artifacts").end());
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) {
            EXPECT_TRUE(listed.count(fs::relative(e.path(), dir).string())) << e.path();
        }

    // A saved model scored against the reference reproduces the run row.
    const auto v = cmd_validate(dir + "/model_gpr-5_94.lbm", reference_lut_path(c));
    EXPECT_NEAR(v.nrmse_mean, res.reports[2].nrmse_mean, 1e-12);
    EXPECT_NEAR(v.rmse_mean, res.reports[2].rmse_mean, 1e-12);

    // Wrong grid for the model.
    auto other = c;
    other.grid_step = 200;
    other.output_dir = lutbench::testing::scratch_dir("run_other_grid");
    cmd_generate(other);
    EXPECT_THROW(cmd_validate(dir + "/model_gpr-5_94.lbm", reference_lut_path(other)), FormatError);
}

TEST(Pipeline, MissingLutNamesPath) {
    auto c = ExperimentConfig::from_json(small_config_json());
    c.output_dir = lutbench::testing::scratch_dir("run_missing");
    try {
        cmd_run(c);
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("lut_reference_120.lut"), std::string::npos);
    }
    const auto manifest = nlohmann::json::parse(read_text(c.output_dir + "/manifest.json"));
    EXPECT_EQ(manifest.at("status"), "failed");
}

TEST(Pipeline, OnlyFilterValidated) {
    auto c = ExperimentConfig::from_json(small_config_json());
    c.output_dir = lutbench::testing::scratch_dir("run_only_bad");
    RunOptions o;
    o.only = "kriging";
    EXPECT_THROW(cmd_run(c, o), InvalidConfig);
}

TEST(Cli, ExitCodesAndOutputOverride) {
    const auto dir = lutbench::testing::scratch_dir("cli");
    auto j = small_config_json();
    j["lut_sizes"] = nlohmann::json::array({30, 40});
    const auto cfg = write_config(dir, j);
    const auto out = dir + "/out";

    EXPECT_EQ(cli("run --config " + cfg + " --out " + out), 3);  // no LUTs yet
    EXPECT_EQ(cli("generate --config " + cfg + " --out " + out), 0);
    EXPECT_EQ(cli("run --only linear --config " + cfg + " --out " + out), 0);
    const auto lines = summary_lines(out);
    ASSERT_EQ(lines.size(), 3u);  // header plus one linear row per LUT size
    EXPECT_EQ(lines[1].rfind("linear,", 0), 0u);
    EXPECT_EQ(lines[2].rfind("linear,", 0), 0u);

    const auto env_out = dir + "/env_out";
    EXPECT_EQ(cli("generate --config " + cfg + " --out " + out, "LUTBENCH_OUT=" + env_out), 0);
    EXPECT_TRUE(fs::exists(env_out + "/lut_train_30.lut"));

    auto bad = small_config_json();
    bad["reference_size"] = 30;
    EXPECT_EQ(cli("generate --config " + write_config(dir, bad) + " --out " + out), 2);
    EXPECT_EQ(cli("generate --config " + dir + "/nothing.json"), 3);
    EXPECT_EQ(cli("run --nrmse-norm sideways"), 2);
    EXPECT_EQ(cli("frobnicate"), 2);
}
