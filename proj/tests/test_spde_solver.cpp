#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ywlab/config.hpp"
#include "ywlab/errors.hpp"
#include "ywlab/numeric.hpp"
#include "ywlab/presets.hpp"
#include "ywlab/spde_solver.hpp"

using namespace ywlab;

namespace {

Model model(const std::string& preset, std::size_t steps = 32) {
    RunConfig c = preset_config(preset);
    c.steps = steps;
    return build_model(c);
}

double sup_h(const SolutionPath& a, const SolutionPath& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.dim; ++k) s += std::pow(a.at(i)[k] - b.at(i)[k], 2);
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

}  // namespace

TEST(Solve, ZeroCoefficientsGiveConstantPath) {
    const Model m = model("zero");
    const auto bundle = simulate_bundle(m.noise, 1, 0);
    const auto U = solve(m.coefficients, m.space, bundle, m.noise.grid);
    for (std::size_t i = 0; i < U.size(); ++i)
        for (std::size_t k = 0; k < U.dim; ++k) ASSERT_EQ(U.at(i)[k], bundle.initial[k]);
    EXPECT_EQ(max_gamma_residual(U, bundle, m.coefficients, m.space), 0.0);
}

TEST(Solve, NoiselessHeatIsTheScalarRecursion) {
    RunConfig c = preset_config("heat");
    c.sigma_scale = 0.0;
    c.intensity = "finite3";
    c.jump_scale = 0.0;
    c.steps = 64;
    c.initial_mean = {1.0, -0.5, 0.25, 0.125};
    const Model m = build_model(c);
    NoiseBundle bundle = simulate_bundle(m.noise, 1, 0);
    bundle.prm.atoms.clear();
    bundle.prm.marks.clear();
    const auto U = solve(m.coefficients, m.space, bundle, m.noise.grid);
    const double dt = 1.0 / 64.0;
    for (std::size_t i = 0; i < U.size(); ++i)
        for (std::size_t k = 0; k < 4; ++k) {
            const double mu = m.space.eigenvalues[k];
            double rec = c.initial_mean[k];
            for (std::size_t s = 0; s < i; ++s) rec += (-mu * rec) * dt;
            ASSERT_EQ(U.at(i)[k], rec);
            ASSERT_NEAR(U.at(i)[k], std::exp(-mu * U.times[i]) * c.initial_mean[k], 0.6 * mu * dt * std::abs(c.initial_mean[k]));
        }
}

TEST(Solve, LinearAdditiveJumpsMatchClosedRecursion) {
    RunConfig c = preset_config("heat_jump");
    c.intensity = "finite_asym";
    c.embedding = "direct";
    c.steps = 50;
    const Model m = build_model(c);
    for (std::uint64_t p = 0; p < 10; ++p) {
        const auto bundle = simulate_bundle(m.noise, 3, p);
        const auto U = solve(m.coefficients, m.space, bundle, m.noise.grid);
        // finite_asym: every mark is +1 at rate 2, embedded into coefficient 1
        std::vector<double> rec(4, 0.0);
        const auto& g = m.noise.grid.times;
        std::size_t a = 0;
        for (std::size_t i = 1; i < g.size(); ++i) {
            const double dt = g[i] - g[i - 1];
            std::vector<double> next(4);
            for (std::size_t k = 0; k < 4; ++k) next[k] = rec[k] + (-m.space.eigenvalues[k] * rec[k]) * dt;
            while (a < bundle.prm.size() && bundle.prm.atoms[a].time <= g[i]) {
                next[0] += 1.0;
                ++a;
            }
            next[0] -= dt * 2.0;
            rec = next;
            for (std::size_t k = 0; k < 4; ++k) ASSERT_NEAR(U.at(i)[k], rec[k], 1e-12);
        }
    }
}

TEST(Solve, DeterministicAndDivergenceReported) {
    const Model m = model("porous_medium");
    const auto bundle = simulate_bundle(m.noise, 5, 2);
    const auto a = solve(m.coefficients, m.space, bundle, m.noise.grid, m.options);
    const auto b = solve(m.coefficients, m.space, bundle, m.noise.grid, m.options);
    EXPECT_EQ(a.values, b.values);

    RunConfig c = preset_config("heat");
    c.dim = 12;
    c.steps = 200;
    c.horizon = 200.0;
    const Model stiff = build_model(c);
    const auto sb = simulate_bundle(stiff.noise, 1, 0);
    try {
        solve(stiff.coefficients, stiff.space, sb, stiff.noise.grid);
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_GT(e.blow_up_time(), 0.0);
        EXPECT_LE(e.blow_up_time(), 200.0);
    }
}

TEST(Solve, RejectsTooManyModes) {
    RunConfig c = preset_config("heat");
    c.modes = 3;
    const Model m = build_model(c);
    auto noise = m.noise;
    noise.wiener_modes = 2;
    const auto bundle = simulate_bundle(noise, 1, 0);
    EXPECT_THROW(solve(m.coefficients, m.space, bundle, m.noise.grid), ValidationError);
}

TEST(Gamma, SchemeConsistencyOnEveryPreset) {
    for (const auto& preset : run_preset_names()) {
        const Model m = model(preset);
        for (std::uint64_t p = 0; p < 4; ++p) {
            const auto bundle = simulate_bundle(m.noise, 11, p);
            const auto U = solve(m.coefficients, m.space, bundle, m.noise.grid, m.options);
            EXPECT_LT(max_gamma_residual(U, bundle, m.coefficients, m.space, m.options), 1e-10) << preset;
        }
    }
}

TEST(Gamma, PerturbationShowsUpAtItsTime) {
    const Model m = model("heat");
    const auto bundle = simulate_bundle(m.noise, 1, 0);
    auto U = solve(m.coefficients, m.space, bundle, m.noise.grid);
    const double delta = 1e-3;
    const std::size_t i = 10, k = 2;
    U.at(i)[k] += delta;
    const double t = m.noise.grid.times[i];
    EXPECT_NEAR(gamma_residual(U, bundle, m.coefficients, m.space, k, t), -delta, 1e-12);
    EXPECT_NEAR(gamma_residual(U, bundle, m.coefficients, m.space, k - 1, t), 0.0, 1e-12);
    EXPECT_NEAR(gamma_residual(U, bundle, m.coefficients, m.space, k, m.noise.grid.times[i - 1]), 0.0, 1e-12);
}

TEST(MildOracle, NoAtomsAndSingleAtom) {
    const auto space = GalerkinSpace::dirichlet(4, std::numbers::pi);
    const auto nu = intensity_preset("finite3");
    const auto grid = TimeGrid::uniform(1.0, 8);
    const auto direct = make_embedding({JumpEmbedding::Kind::direct, 0.0, 1.0}, space, 1);
    PrmRealization eta;
    eta.horizon = 1.0;
    eta.intensity_id = nu->id;
    eta.layers_simulated = 1;
    const auto zero = mild_heat_oracle(space, eta, *nu, grid, direct);
    for (double v : zero.values) EXPECT_EQ(v, 0.0);

    eta.atoms.push_back({0.5, 1, 0});
    eta.marks.push_back(1.0);
    const auto one = mild_heat_oracle(space, eta, *nu, grid, direct);
    for (std::size_t i = 0; i < grid.times.size(); ++i) {
        const double t = grid.times[i];
        EXPECT_NEAR(one.at(i)[0], t >= 0.5 ? std::exp(-(t - 0.5)) : 0.0, 1e-15);
        for (std::size_t k = 1; k < 4; ++k) EXPECT_EQ(one.at(i)[k], 0.0);
    }
}

TEST(MildOracle, AsymmetricInfiniteActivityUnsupported) {
    auto nu = *intensity_preset("alpha_half");
    nu.symmetric = false;
    for (auto& layer : nu.layers) layer.law = MarkLaw(PowerExpMagnitude{0.5, layer.law.size_lo(), layer.law.size_hi(), false});
    const auto space = GalerkinSpace::dirichlet(4, std::numbers::pi);
    const auto eta = simulate_prm(nu, 3, 1.0, StreamKey{1, 0, StreamTag::prm, 0, 0});
    EXPECT_THROW(mild_heat_oracle(space, eta, nu, TimeGrid::uniform(1.0, 4),
                                  make_embedding({}, space, 1)),
                 UnsupportedError);
}

TEST(MildOracle, SchemeConvergesAtFirstOrder) {
    std::vector<double> errors;
    for (std::size_t M : {32, 64, 128, 256}) {
        const Model m = model("heat_jump", M);
        std::vector<double> e(32);
        for (std::size_t b = 0; b < 32; ++b) {
            const auto bundle = simulate_bundle(m.noise, 2, b);
            e[b] = sup_h(solve(m.coefficients, m.space, bundle, m.noise.grid),
                         mild_heat_oracle(m.space, bundle.prm, *m.intensity, m.noise.grid, m.embedding));
        }
        errors.push_back(moments(e).mean);
    }
    for (std::size_t i = 1; i < errors.size(); ++i) {
        EXPECT_LT(errors[i], errors[i - 1]);
        EXPECT_NEAR(errors[i - 1] / errors[i], 2.0, 0.5);
    }
}

TEST(MildOracle, SecondMomentStableInLadderCutoff) {
    RunConfig c = preset_config("heat_jump");
    c.intensity = "alpha_half";
    std::vector<double> moment;
    for (std::size_t layers : {3, 5, 8}) {
        c.layers = layers;
        const Model m = build_model(c);
        double worst = 0.0;
        const std::size_t N = 4000;
        std::vector<double> acc(m.noise.grid.times.size(), 0.0);
        for (std::size_t b = 0; b < N; ++b) {
            const auto bundle = simulate_bundle(m.noise, 6, b);
            const auto X = mild_heat_oracle(m.space, bundle.prm, *m.intensity, m.noise.grid, m.embedding);
            for (std::size_t i = 0; i < X.size(); ++i)
                for (std::size_t k = 0; k < X.dim; ++k) acc[i] += X.at(i)[k] * X.at(i)[k] / static_cast<double>(N);
        }
        for (double v : acc) worst = std::max(worst, v);
        moment.push_back(worst);
    }
    EXPECT_TRUE(std::isfinite(moment.back()));
    EXPECT_NEAR(moment[1], moment[0], 0.15 * moment[0]);
    EXPECT_NEAR(moment[2], moment[1], 0.15 * moment[1]);
}

TEST(Finiteness, ZeroHeatAndContaminated) {
    {
        const Model m = model("zero");
        const auto bundle = simulate_bundle(m.noise, 1, 0);
        const auto U = solve(m.coefficients, m.space, bundle, m.noise.grid);
        const auto f = finiteness_check(U, m.coefficients, *m.intensity, m.space, 2.0, 1);
        EXPECT_EQ(f.drift_l1, 0.0);
        EXPECT_EQ(f.diffusion_l2, 0.0);
        EXPECT_EQ(f.small_jump_p, 0.0);
        EXPECT_EQ(f.large_jump_1, 0.0);
        EXPECT_TRUE(f.finite);
    }
    const Model m = model("heat");
    const auto bundle = simulate_bundle(m.noise, 1, 0);
    auto U = solve(m.coefficients, m.space, bundle, m.noise.grid);
    const auto f = finiteness_check(U, m.coefficients, *m.intensity, m.space, 2.0, 2);
    EXPECT_TRUE(f.finite);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t n = 0; n < 2; ++n)
            EXPECT_NEAR(f.small_mass[k * 2 + n] + f.large_mass[k * 2 + n], m.intensity->layers[n].mass, 1e-12);
    U.at(5)[1] = NAN;
    const auto bad = finiteness_check(U, m.coefficients, *m.intensity, m.space, 2.0, 2);
    EXPECT_FALSE(bad.finite);
    EXPECT_FALSE(bad.flagged.empty());
}

TEST(Theta, RegistryVerdicts) {
    const Model m = model("heat");
    std::vector<SolutionPath> ensemble;
    for (std::uint64_t p = 0; p < 20; ++p)
        ensemble.push_back(solve(m.coefficients, m.space, simulate_bundle(m.noise, 1, p), m.noise.grid));
    EXPECT_TRUE(theta_check(ensemble, {}).member);

    RegularityRegistry reg;
    reg.theta0.push_back(theta_l2_v(m.space));
    reg.budget = 1e9;
    const auto ok = theta_check(ensemble, reg);
    EXPECT_TRUE(ok.member);
    reg.budget = 0.5 * ok.theta0_means[0];
    EXPECT_FALSE(theta_check(ensemble, reg).member);

    RegularityRegistry pos;
    pos.theta1.push_back(theta_nonnegative(m.space));
    SolutionPath negative = ensemble[0];
    for (double& v : negative.values) v = 0.0;
    negative.at(3)[0] = -1.0;
    std::vector<SolutionPath> one{negative};
    EXPECT_FALSE(theta_check(one, pos).member);
    for (double& v : one[0].values) v = 0.0;
    EXPECT_TRUE(theta_check(one, pos).member);
}

TEST(Coefficients, PresetsValidate) {
    for (const auto& preset : run_preset_names()) {
        const Model m = model(preset);
        EXPECT_NO_THROW(m.coefficients.validate(m.space, m.intensity->dimension)) << preset;
    }
}
