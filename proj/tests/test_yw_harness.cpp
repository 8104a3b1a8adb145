#include <gtest/gtest.h>

#include <cmath>

#include "ywlab/config.hpp"
#include "ywlab/errors.hpp"
#include "ywlab/yw_harness.hpp"

using namespace ywlab;

namespace {

Model model(const std::string& preset, const std::string& variant = "standard") {
    RunConfig c = preset_config(preset);
    c.variant = variant;
    return build_model(c);
}

System system_of(const Model& m) { return System{&m.coefficients, &m.space, m.options}; }

}  // namespace

TEST(Pathwise, IdenticalVariantsGiveExactlyZeroOnEveryPreset) {
    for (const auto& preset : run_preset_names()) {
        const Model m = model(preset);
        for (std::uint64_t p = 0; p < 5; ++p) {
            const auto bundle = simulate_bundle(m.noise, 1, p);
            const auto r = pathwise_uniqueness_test(m.coefficients, m.space, bundle, m.options, m.options);
            EXPECT_EQ(r.max_distance, 0.0) << preset;
            EXPECT_EQ(r.d0, 0.0) << preset;
            EXPECT_TRUE(r.pass);
        }
    }
}

TEST(Pathwise, SummationOrderIsWithinReassociationBound) {
    const Model m = model("heat");
    SolverOptions pairwise = m.options;
    pairwise.summation = Summation::pairwise;
    for (std::uint64_t p = 0; p < 20; ++p) {
        const auto r =
            pathwise_uniqueness_test(m.coefficients, m.space, simulate_bundle(m.noise, 2, p), m.options, pairwise);
        EXPECT_LT(r.max_distance, 1e-10);
        EXPECT_TRUE(r.pass);
    }
}

TEST(Pathwise, ContractionOfInitialDifferences) {
    RunConfig c = preset_config("heat");
    c.steps = 128;
    const Model m = build_model(c);
    for (std::uint64_t p = 0; p < 10; ++p) {
        const auto b1 = simulate_bundle(m.noise, 3, p);
        auto b2 = b1;
        for (std::size_t k = 0; k < b2.initial.size(); ++k) b2.initial[k] += 0.5 + 0.1 * static_cast<double>(k);
        const auto u1 = solve(m.coefficients, m.space, b1, m.noise.grid);
        const auto u2 = solve(m.coefficients, m.space, b2, m.noise.grid);
        auto dist = [&](std::size_t i) {
            double s = 0.0;
            for (std::size_t k = 0; k < m.space.dim; ++k) s += std::pow(u1.at(i)[k] - u2.at(i)[k], 2);
            return std::sqrt(s);
        };
        const double ratio = dist(u1.size() - 1) / dist(0);
        EXPECT_LE(ratio, std::exp(-m.space.eigenvalues[0] * 1.0) + 1.0 / 128.0);
    }
}

TEST(Pathwise, DifferentBundlesAreAConfigError) {
    const Model m = model("heat");
    EXPECT_THROW(pathwise_uniqueness_test(m.coefficients, m.space, simulate_bundle(m.noise, 1, 0),
                                          simulate_bundle(m.noise, 1, 1), m.options, m.options),
                 ConfigError);
}

TEST(Strong, ZeroHeatJumpAndAmbientControl) {
    const Model zero = model("zero");
    EXPECT_TRUE(strong_solution_check(zero.coefficients, zero.space, simulate_bundle(zero.noise, 1, 0)).pass);

    const Model hj = model("heat_jump");
    std::size_t passed = 0;
    for (std::uint64_t p = 0; p < 100; ++p)
        passed += strong_solution_check(hj.coefficients, hj.space, simulate_bundle(hj.noise, 4, p), hj.options).pass;
    EXPECT_EQ(passed, 100u);

    const Model amb = model("heat_jump", "ambient_rng");
    std::size_t ambient_passed = 0;
    for (std::uint64_t p = 0; p < 10; ++p)
        ambient_passed +=
            strong_solution_check(amb.coefficients, amb.space, simulate_bundle(amb.noise, 4, p), amb.options).pass;
    EXPECT_EQ(ambient_passed, 0u);
}

TEST(Compatibility, LeftPointSchemePasses) {
    for (const char* preset : {"heat", "multiplicative_sigma", "porous_medium"}) {
        const Model m = model(preset);
        const auto r = compatibility_test(system_of(m), m.noise, {7, 0, 1000, 1}, 0.5);
        EXPECT_EQ(r.verdict, Verdict::pass) << preset << " max " << r.max_abs;
        EXPECT_DOUBLE_EQ(r.threshold, 4.0 / std::sqrt(1000.0));
    }
}

TEST(Compatibility, AnticipatingVariantIsDetected) {
    const Model m = model("multiplicative_sigma", "anticipating");
    const auto r = compatibility_test(system_of(m), m.noise, {7, 0, 1000, 1}, 0.5);
    EXPECT_EQ(r.verdict, Verdict::fail);
    EXPECT_GT(r.max_abs, r.threshold);
}

TEST(Compatibility, CutAtHorizonIsVacuous) {
    const Model m = model("multiplicative_sigma", "anticipating");
    const auto r = compatibility_test(system_of(m), m.noise, {7, 0, 1000, 1}, 1.0);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_TRUE(r.entries.empty());
    EXPECT_THROW(compatibility_test(system_of(m), m.noise, {7, 0, 1000, 1}, 0.3), ValidationError);
}

TEST(Compatibility, SmallEnsembleIsInconclusive) {
    const Model m = model("heat");
    EXPECT_EQ(compatibility_test(system_of(m), m.noise, {7, 0, 50, 1}, 0.5).verdict, Verdict::inconclusive);
}

TEST(Law, SameConfigDifferentSeedsDoesNotReject) {
    const Model m = model("heat");
    const Ensemble a{system_of(m), m.noise, {1, 10, 300, 1}, {}};
    const Ensemble b{system_of(m), m.noise, {2, 11, 300, 1}, {}};
    const auto r = law_compare(a, b, default_statistics(m.space, m.noise.grid));
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_EQ(r.statistics.size(), 11u);
    EXPECT_DOUBLE_EQ(r.corrected_alpha, 0.01 / 11.0);
    for (const auto& s : r.statistics) {
        EXPECT_GE(s.p_value, 0.0);
        EXPECT_LE(s.p_value, 1.0);
    }
    EXPECT_EQ(r.skorokhod_distances.size(), 3u);
}

TEST(Law, ShiftedInitialLawIsRejected) {
    const Model m = model("identity");
    auto shifted = m.noise;
    for (double& v : shifted.initial.mean) v += 1.0;
    const Ensemble a{system_of(m), m.noise, {1, 10, 200, 1}, {}};
    const Ensemble b{system_of(m), shifted, {2, 11, 200, 1}, {}};
    const auto r = law_compare(a, b, default_statistics(m.space, m.noise.grid));
    EXPECT_TRUE(r.reject);
    EXPECT_EQ(r.verdict, Verdict::fail);
}

TEST(Law, ReversedMarksUnderSymmetricIntensity) {
    const Model m = model("identity");
    const auto T = m.noise.grid.steps();
    const std::vector<Statistic> sum_of_marks{{"sum z", [T](const SolutionPath& U) { return U.at(T)[0]; }}};
    const Ensemble a{system_of(m), m.noise, {1, 10, 1000, 1}, {}};
    const Ensemble b{system_of(m), m.noise, {2, 11, 1000, 1}, reverse_marks};
    EXPECT_EQ(law_compare(a, b, sum_of_marks).verdict, Verdict::pass);
}

TEST(Law, UsageErrors) {
    const Model m = model("heat");
    const Ensemble a{system_of(m), m.noise, {1, 10, 100, 1}, {}};
    const Ensemble b{system_of(m), m.noise, {2, 11, 120, 1}, {}};
    EXPECT_THROW(law_compare(a, b, default_statistics(m.space, m.noise.grid)), ConfigError);
    EXPECT_THROW(law_compare(a, a, default_statistics(m.space, m.noise.grid)), ConfigError);
}

TEST(Transfer, RegistryRelabelings) {
    const Model hj = model("heat_jump");
    RunConfig sc = preset_config("heat_jump");
    sc.intensity = "finite3";
    const Model hjs = build_model(sc);
    for (std::uint64_t p = 0; p < 10; ++p) {
        const auto bundle = simulate_bundle(hj.noise, 1, p);
        EXPECT_TRUE(transfer_check(hj.coefficients, hj.space, *hj.intensity, bundle, {}).pass);
        EXPECT_TRUE(
            transfer_check(hj.coefficients, hj.space, *hj.intensity, bundle, {Relabeling::Kind::sign_flip}).pass);
        const auto b2 = simulate_bundle(hjs.noise, 1, p);
        EXPECT_TRUE(
            transfer_check(hjs.coefficients, hjs.space, *hjs.intensity, b2, {Relabeling::Kind::sign_flip}).pass);
    }
    const Model ms = model("multiplicative_sigma");
    for (std::uint64_t p = 0; p < 10; ++p) {
        const auto bundle = simulate_bundle(ms.noise, 1, p);
        EXPECT_TRUE(
            transfer_check(ms.coefficients, ms.space, *ms.intensity, bundle, {Relabeling::Kind::mode_swap, 0, 1}).pass);
    }
}

TEST(Transfer, RelabelingsOutsideTheirScopeAreRejected) {
    const Model heat = model("heat");
    const auto bundle = simulate_bundle(heat.noise, 1, 0);
    EXPECT_THROW(transfer_check(heat.coefficients, heat.space, *heat.intensity, bundle,
                                {Relabeling::Kind::mode_swap, 0, 1}),
                 ConfigError);
    RunConfig c = preset_config("heat_jump");
    c.intensity = "finite_asym";
    const Model asym = build_model(c);
    EXPECT_THROW(transfer_check(asym.coefficients, asym.space, *asym.intensity, simulate_bundle(asym.noise, 1, 0),
                                {Relabeling::Kind::sign_flip}),
                 ConfigError);
    const Model pm = model("porous_medium");
    EXPECT_THROW(transfer_check(pm.coefficients, pm.space, *pm.intensity, simulate_bundle(pm.noise, 1, 0),
                                {Relabeling::Kind::sign_flip}),
                 ConfigError);
}
