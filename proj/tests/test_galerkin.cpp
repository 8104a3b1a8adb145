#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ywlab/errors.hpp"
#include "ywlab/galerkin.hpp"
#include "ywlab/rng.hpp"

using namespace ywlab;

TEST(GalerkinSpace, DirichletSpectrumOnPi) {
    const auto s = GalerkinSpace::dirichlet(4, std::numbers::pi);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(s.eigenvalues[k], static_cast<double>((k + 1) * (k + 1)), 1e-12);
    EXPECT_THROW(GalerkinSpace::dirichlet(0, 1.0), ValidationError);
    EXPECT_THROW(GalerkinSpace::dirichlet(3, -1.0), ValidationError);
}

TEST(GalerkinSpace, BasisIsOrthonormal) {
    const auto s = GalerkinSpace::dirichlet(4, 2.0);
    const int n = 4000;
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                const double x = (i + 0.5) * 2.0 / n;
                acc += s.basis(a, x) * s.basis(b, x) * 2.0 / n;
            }
            EXPECT_NEAR(acc, a == b ? 1.0 : 0.0, 1e-6);
        }
}

TEST(GalerkinSpace, EmbeddingChainOnBasisVectors) {
    for (double L : {1.0, std::numbers::pi, 10.0}) {
        const auto s = GalerkinSpace::dirichlet(6, L);
        const auto c = embedding_constants(s);
        for (std::size_t k = 0; k < 6; ++k) {
            std::vector<double> e(6, 0.0);
            e[k] = 1.0;
            EXPECT_LE(s.norm_dual(e), c.c1 * s.norm_h(e) * (1 + 1e-14));
            EXPECT_LE(c.c1 * s.norm_h(e), c.c2 * s.norm_v(e) * (1 + 1e-14));
        }
    }
}

TEST(GalerkinSpace, NodalRoundTripAndAgreementWithBasis) {
    const auto s = GalerkinSpace::dirichlet(5, std::numbers::pi);
    Stream r(1);
    std::vector<double> u(5), nodal(5), back(5);
    for (auto& x : u) x = r.normal();
    s.to_nodal(u, nodal);
    const auto xs = s.collocation_points();
    for (std::size_t j = 0; j < 5; ++j) {
        double direct = 0.0;
        for (std::size_t k = 0; k < 5; ++k) direct += u[k] * s.basis(k, xs[j]);
        EXPECT_NEAR(nodal[j], direct, 1e-12);
    }
    s.from_nodal(nodal, back);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(back[k], u[k], 1e-12);
}

TEST(PorousMedium, ZeroAndLinearReduction) {
    const auto s = GalerkinSpace::dirichlet(4, std::numbers::pi);
    for (double x : porous_medium_b(std::vector<double>(4, 0.0), 3.0, s)) EXPECT_EQ(x, 0.0);
    Stream r(2);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> u(4);
        for (auto& x : u) x = r.normal();
        const auto b = porous_medium_b(u, 2.0, s);
        for (std::size_t k = 0; k < 4; ++k) ASSERT_NEAR(b[k], -s.eigenvalues[k] * u[k], 1e-10);
    }
    EXPECT_THROW(porous_medium_b(std::vector<double>(4, 0.0), 1.5, s), ValidationError);
}

TEST(PorousMedium, MonotoneOnRandomPairs) {
    const auto s = GalerkinSpace::dirichlet(4, std::numbers::pi);
    Stream r(3);
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
        for (int t = 0; t < 1000; ++t) {
            std::vector<double> u(4), v(4), du(4), db(4);
            for (std::size_t k = 0; k < 4; ++k) {
                u[k] = 2.0 * r.normal();
                v[k] = 2.0 * r.normal();
                du[k] = u[k] - v[k];
            }
            const auto bu = porous_medium_b(u, p, s), bv = porous_medium_b(v, p, s);
            for (std::size_t k = 0; k < 4; ++k) db[k] = bu[k] - bv[k];
            ASSERT_LE(monotonicity_pairing(db, du, s), 1e-12 * (1.0 + s.norm_h(du) * s.norm_h(du)));
        }
    }
}

TEST(Product, MatchesPointwiseProductAtNodes) {
    const auto s = GalerkinSpace::dirichlet(4, std::numbers::pi);
    const std::vector<double> a{1.0, -0.5, 0.25, 0.0}, b{0.3, 0.2, -0.1, 0.4};
    std::vector<double> ab(4), na(4), nb(4), nab(4);
    s.product(a, b, ab);
    s.to_nodal(a, na);
    s.to_nodal(b, nb);
    s.to_nodal(ab, nab);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(nab[j], na[j] * nb[j], 1e-12);
}
