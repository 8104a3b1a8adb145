#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ywlab/config.hpp"
#include "ywlab/errors.hpp"
#include "ywlab/report.hpp"

using namespace ywlab;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run_cli(const std::string& args) {
    const std::string cmd = std::string(YWLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ywlab_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

}  // namespace

TEST(Config, PresetsAreKnownAndBuild) {
    for (const auto& name : run_preset_names()) {
        const RunConfig c = preset_config(name);
        EXPECT_EQ(c.preset, name);
        EXPECT_NO_THROW(build_model(c)) << name;
    }
    EXPECT_THROW(preset_config("nope"), ConfigError);
}

TEST(Config, OverridesAreTyped) {
    RunConfig c = preset_config("heat");
    apply_override(c, "grid.steps=64");
    apply_override(c, "initial.mean=1,2.5");
    apply_override(c, "solver.summation = pairwise");
    EXPECT_EQ(c.steps, 64u);
    EXPECT_EQ(c.initial_mean, (std::vector<double>{1.0, 2.5}));
    EXPECT_EQ(c.summation, "pairwise");
    EXPECT_THROW(apply_override(c, "grid.steps=abc"), ConfigError);
    EXPECT_THROW(apply_override(c, "grid.steps=-3"), ConfigError);
    EXPECT_THROW(apply_override(c, "grid.horizon=inf"), ConfigError);
    EXPECT_THROW(apply_override(c, "grid.nope=1"), ConfigError);
    EXPECT_THROW(apply_override(c, "no_equals_sign"), ConfigError);
}

TEST(Config, FileLoadingAndErrors) {
    const auto dir = fresh_dir("config");
    write_text(dir / "ok.ini", "; comment\n[grid]\nsteps = 16\n[run]\nseed = 42\n");
    RunConfig c = preset_config("heat");
    load_config_file(c, (dir / "ok.ini").string());
    EXPECT_EQ(c.steps, 16u);
    EXPECT_EQ(c.seed, 42u);

    write_text(dir / "bad_key.ini", "[grid]\nstep = 16\n");
    EXPECT_THROW(load_config_file(c, (dir / "bad_key.ini").string()), ConfigError);
    write_text(dir / "bad_section.ini", "[gird]\nsteps = 16\n");
    EXPECT_THROW(load_config_file(c, (dir / "bad_section.ini").string()), ConfigError);
    EXPECT_THROW(load_config_file(c, (dir / "missing.ini").string()), ConfigError);
}

TEST(Config, DigestIsStableAndSensitive) {
    const RunConfig a = preset_config("porous_medium");
    RunConfig b = a;
    EXPECT_EQ(config_digest(a), config_digest(b));
    EXPECT_EQ(canonical_text(a), canonical_text(b));
    b.gamma = std::nextafter(a.gamma, 1.0);
    EXPECT_NE(config_digest(a), config_digest(b));
    EXPECT_EQ(digest_hex(0x1234).size(), 16u);
}

TEST(Config, InconsistentSettingsAreRejected) {
    RunConfig c = preset_config("heat");
    c.coefficients = "unknown";
    EXPECT_THROW(build_model(c), ConfigError);
    c = preset_config("heat");
    c.intensity = "unknown";
    EXPECT_THROW(build_model(c), ConfigError);
    c = preset_config("heat");
    c.stepping = "sideways";
    EXPECT_THROW(build_model(c), ConfigError);
}

TEST(Cli, SimulateZeroPresetGivesConstantSolution) {
    const auto dir = fresh_dir("zero");
    const CliRun r = run_cli("simulate --preset zero --out " + dir.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("digest "), std::string::npos);
    ASSERT_TRUE(fs::exists(dir / "resolved_config.txt"));
    ASSERT_TRUE(fs::exists(dir / "bundle_0.ywnb"));
    const JumpPath p = read_path_csv((dir / "solution_0.csv").string());
    EXPECT_EQ(p.jumps(), 0u);
}

TEST(Cli, RepeatedRunIsByteIdentical) {
    const auto a = fresh_dir("rep_a"), b = fresh_dir("rep_b");
    ASSERT_EQ(run_cli("simulate --preset heat_jump --set run.paths=2 --seed 9 --out " + a.string()).code, 0);
    ASSERT_EQ(run_cli("simulate --preset heat_jump --set run.paths=2 --seed 9 --out " + b.string()).code, 0);
    for (const char* f : {"resolved_config.txt", "bundle_0.ywnb", "bundle_1.ywnb", "solution_0.csv", "solution_1.csv"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Cli, UsageErrorsExitTwoWithoutOutput) {
    const auto dir = fresh_dir("usage");
    EXPECT_EQ(run_cli("simulate --preset nope --out " + dir.string()).code, 2);
    EXPECT_FALSE(fs::exists(dir));
    EXPECT_EQ(run_cli("verify nope --out " + dir.string()).code, 2);
    EXPECT_EQ(run_cli("simulate --set grid.steps=x --out " + dir.string()).code, 2);
    EXPECT_EQ(run_cli("simulate --config " + (dir / "missing.ini").string() + " --out " + dir.string()).code, 2);
    EXPECT_EQ(run_cli("frobnicate").code, 2);
    EXPECT_EQ(run_cli("").code, 2);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, UnderpoweredVerifyIsInconclusive) {
    const auto dir = fresh_dir("inconclusive");
    EXPECT_EQ(run_cli("verify prm --set run.samples=10 --out " + dir.string()).code, 3);
}

TEST(Cli, LawWithMismatchedEnsemblesIsAUsageError) {
    const auto dir = fresh_dir("law");
    EXPECT_EQ(run_cli("yw law --set run.ensemble=100 --set run.ensemble_b=120 --out " + dir.string()).code, 2);
}

TEST(Cli, AnticipatingCompatibilityFails) {
    const auto dir = fresh_dir("compat");
    const CliRun r = run_cli("yw compat --preset multiplicative_sigma --variant anticipating --out " + dir.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_TRUE(fs::exists(dir / "yw_compat.csv"));
}

TEST(Cli, StrongCheckOnHeatPasses) {
    const auto dir = fresh_dir("strong");
    EXPECT_EQ(run_cli("yw strong --preset heat --set run.ensemble=100 --out " + dir.string()).code, 0);
}

TEST(Cli, D0Subcommand) {
    const auto dir = fresh_dir("d0");
    write_text(dir / "a.csv", "time,u\n0,0\n0.25,0\n0.5,1\n0.75,1\n1,1\n");
    write_text(dir / "b.csv", "# shifted\ntime,u\n0,0\n0.25,0\n0.5,0\n0.75,1\n1,1\n");
    const CliRun r = run_cli("d0 " + (dir / "a.csv").string() + " " + (dir / "b.csv").string());
    ASSERT_EQ(r.code, 0);
    // jump at 0.5 against 0.75: slopes 0.75/0.5 and 0.25/0.5
    std::istringstream in(r.out);
    std::string key;
    double d = -1.0, sup = -1.0;
    in >> key >> d >> key >> sup;
    EXPECT_NEAR(d, std::log(2.0), 1e-12);
    EXPECT_EQ(sup, 1.0);
    EXPECT_NE(r.out.find("matched_jumps 1"), std::string::npos);
    write_text(dir / "bad.csv", "time,u\n0.1,0\n");
    EXPECT_EQ(run_cli("d0 " + (dir / "a.csv").string() + " " + (dir / "bad.csv").string()).code, 2);
}
