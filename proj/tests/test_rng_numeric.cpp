#include <gtest/gtest.h>

#include <atomic>
#include <cmath>

#include "ywlab/numeric.hpp"
#include "ywlab/rng.hpp"

using namespace ywlab;

TEST(Streams, KeyedStreamsAreReproducibleAndDistinct) {
    const StreamKey k{1, 0, StreamTag::wiener, 3, 1};
    Stream a(k), b(k), c(k.with_lane(2)), d(k.with_tag(StreamTag::prm));
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_NE(x, c.uniform());
    EXPECT_NE(x, d.uniform());
    EXPECT_NE(derive_seed(k), derive_seed(k.with_path(4)));
}

TEST(Streams, UniformRanges) {
    Stream s(9);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const double v = s.uniform_open_closed();
        ASSERT_GT(v, 0.0);
        ASSERT_LE(v, 1.0);
    }
}

TEST(Sums, PairwiseMatchesExactIntegerSums) {
    for (std::size_t n : {0, 1, 2, 3, 7, 64, 1001}) {
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i % 17) - 8.0;
        double exact = 0.0;
        for (double x : xs) exact += x;
        EXPECT_EQ(pairwise_sum(xs), exact);
        EXPECT_EQ(sequential_sum(xs), exact);
    }
}

TEST(Moments, KnownSample) {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const auto m = moments(xs);
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_DOUBLE_EQ(m.variance, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.se(), std::sqrt(5.0 / 3.0 / 4.0));
    EXPECT_EQ(correlation(xs, std::vector<double>(4, 1.0)), 0.0);
    EXPECT_NEAR(correlation(xs, std::vector<double>{2.0, 4.0, 6.0, 8.0}), 1.0, 1e-15);
}

TEST(Kolmogorov, MatchesAlternatingSeries) {
    for (double lambda : {0.3, 0.5, 0.8, 1.0, 1.36, 1.63, 2.5}) {
        double series = 0.0;
        for (int k = 1; k < 200; ++k) series += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        EXPECT_NEAR(kolmogorov_q(lambda), series, 1e-10) << lambda;
    }
    EXPECT_NEAR(kolmogorov_q(1.358), 0.05, 5e-4);
}

TEST(KolmogorovSmirnov, DistanceOfDisjointSamplesIsOne) {
    const auto r = ks_two_sample({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0});
    EXPECT_DOUBLE_EQ(r.distance, 1.0);
    const auto same = ks_two_sample({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(same.distance, 0.0);
    EXPECT_DOUBLE_EQ(same.p_value, 1.0);
}

TEST(KolmogorovSmirnov, NullRejectionRateIsCalibrated) {
    Stream s(31);
    int rejections = 0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> a(200), b(200);
        for (auto& x : a) x = s.normal();
        for (auto& x : b) x = s.normal();
        rejections += ks_two_sample(a, b).p_value < 0.05;
    }
    // Binomial(400, 0.05): mean 20, sd 4.4; the test is slightly conservative.
    EXPECT_LE(rejections, 20 + 4 * 5);
}

TEST(ChiSquare, PoissonFitAcceptsPoissonAndRejectsShift) {
    Stream s(8);
    std::vector<std::uint64_t> counts(10000);
    for (auto& c : counts) c = s.poisson(3.0);
    EXPECT_GT(chi_square_poisson(counts, 3.0).p_value, 0.001);
    EXPECT_LT(chi_square_poisson(counts, 3.3).p_value, 1e-6);
}

TEST(ParallelFor, VisitsEveryIndexOnceForAnyThreadCount) {
    for (unsigned threads : {1u, 2u, 3u, 8u}) {
        std::vector<std::atomic<int>> hits(1003);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) ASSERT_EQ(h.load(), 1);
    }
    parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(Quadrature, IntegratesPolynomialsExactly) {
    const auto q = composite_gauss_legendre(0.0, 2.0, 3);
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], 5);
    EXPECT_NEAR(s, std::pow(2.0, 6) / 6.0, 1e-12);
}
