#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ywlab/errors.hpp"
#include "ywlab/measure_core.hpp"
#include "ywlab/presets.hpp"
#include "ywlab/rng.hpp"

using namespace ywlab;

namespace {

IntensityMeasure ladder_of(std::vector<double> masses, double lo = 1.0) {
    IntensityMeasure nu;
    nu.id = "test_ladder";
    for (std::size_t i = 0; i < masses.size(); ++i)
        nu.layers.push_back({i + 1, masses[i], MarkLaw(UniformMagnitude{lo, lo + 1.0, true}), "uniform"});
    nu.validate();
    return nu;
}

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// \int_lo^hi w(r) r^{-1/2} e^{-r} dr, substituting r = s^2 to remove the
// endpoint singularity: 2 \int w(s^2) e^{-s^2} ds.
template <class W>
double alpha_half_integral(W w, double lo, double hi) {
    return 2.0 * simpson([&](double s) { return w(s * s) * std::exp(-s * s); }, std::sqrt(lo), std::sqrt(hi), 20000);
}

CountingMeasure random_counting(const IntensityMeasure& nu, Stream& s) {
    CountingMeasure mu;
    mu.ladder_id = nu.id;
    mu.ladder_size = nu.layers.size();
    mu.dimension = nu.dimension;
    const int atoms = static_cast<int>(s.uniform() * 6.0);
    std::vector<double> z(nu.dimension);
    for (int a = 0; a < atoms; ++a) {
        const std::size_t layer = 1 + static_cast<std::size_t>(s.uniform() * static_cast<double>(nu.layers.size()));
        nu.layers[layer - 1].law.sample(s, z);
        mu.add(z, layer);
    }
    return mu;
}

}  // namespace

TEST(CumulativeMass, SingleLayer) { EXPECT_DOUBLE_EQ(cumulative_mass(ladder_of({3.0}), 1), 3.0); }

TEST(CumulativeMass, SumsLayers) { EXPECT_DOUBLE_EQ(cumulative_mass(ladder_of({1.0, 2.0, 4.0}), 3), 7.0); }

TEST(CumulativeMass, OutOfRangeThrows) {
    const auto nu = ladder_of({1.0, 2.0});
    EXPECT_THROW(cumulative_mass(nu, 0), RangeError);
    EXPECT_THROW(cumulative_mass(nu, 3), RangeError);
}

TEST(CumulativeMass, AlphaHalfOuterLayerMatchesQuadrature) {
    const auto nu = intensity_preset("alpha_half");
    // nu_0(R \ [-1, 1]) = 2 \int_1^inf r^{-1/2} e^{-r} dr = 2 sqrt(pi) erfc(1)
    const double closed = 2.0 * std::sqrt(std::numbers::pi) * std::erfc(1.0);
    const double quad = 2.0 * alpha_half_integral([](double) { return 1.0; }, 1.0, 60.0);
    EXPECT_NEAR(closed, quad, 1e-9);
    EXPECT_NEAR(cumulative_mass(*nu, 1), closed, 1e-9);
}

TEST(CumulativeMass, NondecreasingOnRegistry) {
    for (const auto& name : intensity_preset_names()) {
        const auto nu = intensity_preset(name);
        for (std::size_t n = 2; n <= nu->layers.size(); ++n)
            EXPECT_GE(cumulative_mass(*nu, n), cumulative_mass(*nu, n - 1)) << name;
    }
}

TEST(LevyIntegrability, EmptyMeasureIsZero) {
    IntensityMeasure nu;
    EXPECT_EQ(levy_integrability(nu, 2.0).value, 0.0);
}

TEST(LevyIntegrability, LargeJumpsCollapseToMass) {
    for (double p : {1.0, 1.5, 2.0}) {
        const auto nu = ladder_of({1.5, 0.25, 2.0}, 1.0);
        EXPECT_NEAR(levy_integrability(nu, p).value, 3.75, 1e-9);
    }
    EXPECT_NEAR(levy_integrability(*intensity_preset("finite3"), 2.0).value, 3.0, 1e-9);
}

TEST(LevyIntegrability, AlphaHalfMatchesQuadrature) {
    const auto nu = intensity_preset("alpha_half");
    const double oracle = 2.0 * (alpha_half_integral([](double) { return 1.0; }, 1.0, 60.0) +
                                 alpha_half_integral([](double r) { return r * r; }, 1.0 / 3.0, 1.0));
    EXPECT_NEAR(levy_integrability(*nu, 2.0).value, oracle, 1e-6 * oracle);
}

TEST(LevyIntegrability, SamplerlessLayerIsConfigError) {
    IntensityMeasure nu;
    nu.id = "bad";
    nu.symmetric = false;
    nu.layers.push_back({1, 1.0, MarkLaw(SampledAmplitude{"none", {}, 0.0, 1.0, false}), "none"});
    EXPECT_THROW(levy_integrability(nu, 2.0), ConfigError);
}

TEST(Symmetry, SymmetricPresetsPass) {
    for (const char* name : {"finite3", "two_layer", "alpha_half"}) {
        const auto check = check_symmetry(*intensity_preset(name), 10000, 3);
        EXPECT_TRUE(check.pass) << name;
    }
}

TEST(Symmetry, AsymmetricPresetIsDetected) {
    EXPECT_FALSE(check_symmetry(*intensity_preset("finite_asym"), 10000, 3).pass);
}

TEST(Restrict, TopLayerIsIdentityAndFilterKeepsLowerLayers) {
    const auto nu = intensity_preset("two_layer");
    CountingMeasure mu{nu->id, 2, 1, {}, {}};
    const double a[] = {1.5}, b[] = {0.5}, c[] = {-1.2};
    mu.add(a, 1);
    mu.add(b, 2);
    mu.add(c, 1);
    EXPECT_EQ(restrict(mu, 2).layers, mu.layers);
    EXPECT_EQ(restrict(mu, 2).marks, mu.marks);
    const auto r1 = restrict(mu, 1);
    EXPECT_EQ(r1.size(), 2u);
    for (auto l : r1.layers) EXPECT_EQ(l, 1u);
    EXPECT_THROW(restrict(mu, 3), RangeError);
}

TEST(Restrict, CountsPartitionAndIdempotent) {
    const auto nu = intensity_preset("alpha_half");
    Stream s(11);
    for (int trial = 0; trial < 500; ++trial) {
        const auto mu = random_counting(*nu, s);
        ASSERT_TRUE(atoms_in_layers(mu, *nu));
        for (std::size_t n = 1; n <= 3; ++n) {
            const auto r = restrict(mu, n);
            std::size_t above = 0;
            for (auto l : mu.layers) above += l > n;
            EXPECT_EQ(r.size() + above, mu.size());
            const auto rr = restrict(r, n);
            EXPECT_EQ(rr.marks, r.marks);
            EXPECT_EQ(rr.layers, r.layers);
        }
    }
}

TEST(SeparatingFamily, DefaultIsBoundedAndSummable) {
    const auto fam = default_separating_family(2, 32);
    EXPECT_TRUE(fam.summable(1e-9));
    const auto nu = intensity_preset("alpha_half_spacetime");
    Stream s(5);
    for (int i = 0; i < 50; ++i) EXPECT_TRUE(fam.bounded_on(random_counting(*nu, s)));
}

TEST(DS, TwoDiracHandValue) {
    const auto nu = intensity_preset("finite3");
    SeparatingFamily fam;
    fam.functions.push_back([](Mark z) { return std::tanh(z[0]); });
    fam.weights.push_back(0.5);
    CountingMeasure m1{nu->id, 1, 1, {}, {}}, m2 = m1;
    const double a[] = {1.0}, b[] = {-1.0};
    m1.add(a, 1);
    m2.add(b, 1);
    auto g = [](double x) { return x / (1.0 + x); };
    const double expected = 0.5 * g(0.5 * g(std::abs(std::tanh(1.0) - std::tanh(-1.0))));
    EXPECT_NEAR(d_S(m1, m2, fam), expected, 1e-12);
}

TEST(DS, MultiplicityIsSeen) {
    const auto nu = intensity_preset("finite3");
    const auto fam = default_separating_family(1);
    CountingMeasure m1{nu->id, 1, 1, {}, {}};
    const double a[] = {1.0};
    m1.add(a, 1);
    CountingMeasure m2 = m1;
    m2.add(a, 1);
    EXPECT_GT(d_S(m1, m2, fam), 0.0);
    EXPECT_EQ(d_S(m1, m1, fam), 0.0);
}

TEST(DS, MismatchedLaddersThrow) {
    CountingMeasure a{"one", 1, 1, {}, {}}, b{"two", 1, 1, {}, {}};
    EXPECT_THROW(d_S(a, b, default_separating_family(1)), IncompatibleError);
}

TEST(DS, MetricAxiomsOnRandomTriples) {
    for (const char* name : {"two_layer", "alpha_half", "alpha_half_spacetime"}) {
        const auto nu = intensity_preset(name);
        const auto fam = default_separating_family(nu->dimension);
        Stream s(2024);
        for (int trial = 0; trial < 1000; ++trial) {
            const auto x = random_counting(*nu, s), y = random_counting(*nu, s), z = random_counting(*nu, s);
            const double xy = d_S(x, y, fam), yx = d_S(y, x, fam);
            ASSERT_EQ(xy, yx);
            ASSERT_EQ(d_S(x, x, fam), 0.0);
            ASSERT_LE(xy, d_S(x, z, fam) + d_S(z, y, fam) + 1e-12);
            ASSERT_GE(xy, 0.0);
            ASSERT_LT(xy, 1.0);
        }
    }
}
