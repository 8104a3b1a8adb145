#include "ywlab/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "ywlab/bundle_io.hpp"
#include "ywlab/config.hpp"
#include "ywlab/errors.hpp"
#include "ywlab/numeric.hpp"
#include "ywlab/report.hpp"
#include "ywlab/suites.hpp"
#include "ywlab/yw_harness.hpp"

namespace ywlab {

namespace {

struct CommonOptions {
    std::string config_file;
    std::string preset;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned threads = 1;
    std::string variant;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_file, "INI configuration file");
    cmd->add_option("--preset", o.preset, "run preset (zero, heat, heat_jump, porous_medium, multiplicative_sigma, identity)");
    cmd->add_option("--set", o.overrides, "override section.key=value")->take_all();
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--variant", o.variant, "solver variant (standard, anticipating, ambient_rng)");
}

RunConfig resolve(const CommonOptions& o) {
    RunConfig c = preset_config(o.preset.empty() ? "heat" : o.preset);
    if (!o.config_file.empty()) {
        if (!std::filesystem::exists(o.config_file)) throw ConfigError("config file not found: " + o.config_file);
        load_config_file(c, o.config_file);
        if (!o.preset.empty() && c.preset != o.preset)
            throw ConfigError("--preset conflicts with run.preset in the config file");
    }
    for (const std::string& a : o.overrides) apply_override(c, a);
    if (o.seed) c.seed = *o.seed;
    if (!o.variant.empty()) c.variant = o.variant;
    return c;
}

std::filesystem::path output_dir(const CommonOptions& o) {
    if (!o.out.empty()) return o.out;
    if (const char* env = std::getenv("YWLAB_OUT"); env && *env) return env;
    return "ywlab_out";
}

std::filesystem::path prepare_dir(const CommonOptions& o) {
    const auto dir = output_dir(o);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InfrastructureError("cannot create output directory " + dir.string());
    return dir;
}

template <class Writer>
void write_file(const std::filesystem::path& file, Writer&& writer) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw InfrastructureError("cannot write " + file.string());
    writer(out);
    if (!out) throw InfrastructureError("write failed for " + file.string());
}

void write_resolved_config(const std::filesystem::path& dir, const RunConfig& c) {
    write_file(dir / "resolved_config.txt", [&](std::ostream& out) {
        out << "# digest=" << digest_hex(config_digest(c)) << '\n' << canonical_text(c);
    });
}

int exit_for(Verdict v) {
    switch (v) {
        case Verdict::pass: return exit_pass;
        case Verdict::fail: return exit_fail;
        case Verdict::inconclusive: return exit_inconclusive;
    }
    return exit_fail;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommonOptions& o) {
    const RunConfig c = resolve(o);
    const Model m = build_model(c);
    if (c.paths == 0) throw ConfigError("run.paths must be positive");
    std::vector<NoiseBundle> bundles(c.paths);
    std::vector<SolutionPath> paths(c.paths);
    parallel_for(c.paths, o.threads, [&](std::size_t p) {
        bundles[p] = simulate_bundle(m.noise, c.seed, p);
        paths[p] = solve(m.coefficients, m.space, bundles[p], m.noise.grid, m.options);
    });
    const auto dir = prepare_dir(o);
    write_resolved_config(dir, c);
    for (std::size_t p = 0; p < c.paths; ++p) {
        write_bundle_file((dir / ("bundle_" + std::to_string(p) + ".ywnb")).string(), bundles[p]);
        write_file(dir / ("solution_" + std::to_string(p) + ".csv"),
                   [&](std::ostream& out) { write_solution_csv(out, paths[p], m.digest); });
    }
    std::cout << "digest " << digest_hex(m.digest) << '\n';
    std::cout << "wrote " << c.paths << " bundle(s) and solution(s) to " << dir.string() << '\n';
    return exit_pass;
}

int cmd_verify(const std::string& suite, const CommonOptions& o) {
    const RunConfig c = resolve(o);
    const std::uint64_t digest = config_digest(c);
    SuiteSettings s{c.samples, c.seed, o.threads};
    SuiteReport report;
    if (suite == "prm") {
        report = prm_law_suite(s);
        SuiteSettings ds = s;
        ds.samples = std::min<std::size_t>(s.samples, 1000);
        SuiteReport metric = ds_suite(ds);
        if (s.samples < kMinStatisticalSamples) metric.inconclusive = true;
        report.merge(metric);
    } else if (suite == "integral") {
        report = integral_suite(s);
    } else if (suite == "spde") {
        report = spde_suite(s);
    } else if (suite == "skorokhod") {
        SuiteSettings sk = s;
        sk.samples = std::min<std::size_t>(s.samples, 1000);
        report = skorokhod_suite(sk);
        if (s.samples < kMinStatisticalSamples) report.inconclusive = true;
    } else {
        throw ConfigError("unknown suite '" + suite + "'");
    }
    report.name = suite;
    const auto dir = prepare_dir(o);
    write_file(dir / ("verify_" + suite + ".csv"), [&](std::ostream& out) { write_report_csv(out, report, digest); });
    write_summary(std::cout, report);
    return exit_for(report.verdict());
}

int cmd_yw(const std::string& check, const CommonOptions& o) {
    const RunConfig c = resolve(o);
    const Model m = build_model(c);
    const System system{&m.coefficients, &m.space, m.options};
    SuiteReport report;
    report.name = "yw " + check;

    if (check == "pathwise" || check == "strong") {
        const std::size_t N = c.ensemble;
        if (N < kMinStatisticalSamples) report.inconclusive = true;
        std::vector<char> ok(N, 0), equivalent(N, 0);
        std::vector<double> dist(N, 0.0), eq_dist(N, 0.0);
        parallel_for(N, o.threads, [&](std::size_t i) {
            const NoiseBundle bundle = simulate_bundle(m.noise, c.seed, i);
            if (check == "pathwise") {
                const PathwiseReport same = pathwise_uniqueness_test(m.coefficients, m.space, bundle, m.options, m.options);
                SolverOptions other = m.options;
                other.summation =
                    other.summation == Summation::pairwise ? Summation::sequential : Summation::pairwise;
                const PathwiseReport eq = pathwise_uniqueness_test(m.coefficients, m.space, bundle, m.options, other);
                ok[i] = same.pass && same.max_distance == 0.0 && same.d0 == 0.0;
                dist[i] = std::max(same.max_distance, same.d0);
                equivalent[i] = eq.pass;
                eq_dist[i] = std::max(eq.max_distance, eq.d0);
            } else {
                ok[i] = strong_solution_check(m.coefficients, m.space, bundle, m.options).pass;
            }
        });
        const double passed = static_cast<double>(std::count(ok.begin(), ok.end(), 1));
        if (check == "pathwise") {
            report.add("identical variants: bundles with distance exactly 0", passed, 0.0, static_cast<double>(N),
                       passed == static_cast<double>(N));
            report.add("identical variants: max distance", *std::max_element(dist.begin(), dist.end()), 0.0, 0.0,
                       *std::max_element(dist.begin(), dist.end()) == 0.0);
            const double eq_max = *std::max_element(eq_dist.begin(), eq_dist.end());
            report.add("summation-order variants: max distance", eq_max, 0.0, 1e-10, eq_max < 1e-10);
        } else {
            report.add("bit-identical re-solves after serialization", passed, 0.0, static_cast<double>(N),
                       passed == static_cast<double>(N));
        }
    } else if (check == "compat") {
        const double cut = c.cut * c.horizon;
        if (!m.noise.grid.index_of(cut)) throw ConfigError("run.cut must land on a grid time");
        EnsembleSettings es{c.seed, c.family, c.compat_samples, o.threads};
        const CompatibilityReport cr = compatibility_test(system, m.noise, es, cut);
        const auto dir = prepare_dir(o);
        write_file(dir / "yw_compat_correlations.csv",
                   [&](std::ostream& out) { write_compat_csv(out, cr, m.digest); });
        report.add("max |correlation| past vs future noise", cr.max_abs, 0.0, cr.threshold,
                   cr.verdict != Verdict::fail);
        report.inconclusive = cr.verdict == Verdict::inconclusive;
    } else if (check == "law") {
        const std::size_t nb = c.ensemble_b == 0 ? c.ensemble : c.ensemble_b;
        if (nb != c.ensemble) throw ConfigError("law comparison needs ensembles of equal size");
        Ensemble a{system, m.noise, {c.seed, c.family, c.ensemble, o.threads}, {}};
        Ensemble b{system, m.noise, {c.seed + 1, c.family + 1, nb, o.threads}, {}};
        const LawComparisonReport lr = law_compare(a, b, default_statistics(m.space, m.noise.grid), c.alpha);
        const auto dir = prepare_dir(o);
        write_file(dir / "yw_law.csv", [&](std::ostream& out) { write_law_csv(out, lr, m.digest); });
        for (const StatisticComparison& s : lr.statistics)
            report.add("KS p-value " + s.name, s.p_value, 0.0, lr.corrected_alpha, !s.reject);
        report.inconclusive = lr.verdict == Verdict::inconclusive;
    } else {
        throw ConfigError("unknown check '" + check + "'");
    }

    const auto dir = prepare_dir(o);
    write_file(dir / ("yw_" + check + ".csv"), [&](std::ostream& out) { write_report_csv(out, report, m.digest); });
    write_summary(std::cout, report);
    return exit_for(report.verdict());
}

int cmd_d0(const std::string& a, const std::string& b) {
    const JumpPath x = read_path_csv(a);
    const JumpPath y = read_path_csv(b);
    if (x.horizon != y.horizon) throw ConfigError("paths end at different times");
    if (x.dimension() != y.dimension()) throw ConfigError("paths have different dimensions");
    const D0Result r = d0_detail(x, y);
    std::cout << "d0 " << exact(r.distance) << '\n';
    std::cout << "sup_distance " << exact(sup_distance(x, y)) << '\n';
    std::cout << "matched_jumps " << r.matching.size() << '\n';
    return exit_pass;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for SPDEs driven by Wiener and Poisson noise"};
    app.require_subcommand(1);
    CommonOptions o;

    auto* simulate = app.add_subcommand("simulate", "simulate noise bundles and solve");
    add_common(simulate, o);

    std::string suite;
    auto* verify = app.add_subcommand("verify", "run a module's invariant suite");
    verify->add_option("suite", suite, "prm | integral | spde | skorokhod")->required();
    add_common(verify, o);

    std::string check;
    auto* yw = app.add_subcommand("yw", "Yamada-Watanabe checks");
    yw->add_option("check", check, "pathwise | strong | compat | law")->required();
    add_common(yw, o);

    std::string path_a, path_b;
    auto* dist = app.add_subcommand("d0", "Skorokhod distance between two path CSV files");
    dist->add_option("a", path_a)->required();
    dist->add_option("b", path_b)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(o);
        if (verify->parsed()) return cmd_verify(suite, o);
        if (yw->parsed()) return cmd_yw(check, o);
        if (dist->parsed()) return cmd_d0(path_a, path_b);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_fail;
    }
    return exit_usage;
}

}  // namespace ywlab
