#include <gtest/gtest.h>

#include <cmath>

#include "ywlab/errors.hpp"
#include "ywlab/rng.hpp"
#include "ywlab/skorokhod.hpp"

using namespace ywlab;

namespace {

JumpPath random_path(Stream& s, std::size_t dim = 1) {
    JumpPath p;
    p.horizon = 1.0;
    for (std::size_t c = 0; c < dim; ++c) p.initial.push_back(2.0 * s.uniform() - 1.0);
    const auto n = static_cast<std::size_t>(s.uniform() * 5.0);
    std::vector<double> times;
    for (std::size_t j = 0; j < n; ++j) times.push_back(s.uniform_open_closed());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (double t : times) {
        std::vector<double> v(dim);
        for (auto& x : v) x = 2.0 * s.uniform() - 1.0;
        p.add_jump(t, v);
    }
    return p;
}

TimeChange random_time_change(Stream& s) {
    std::vector<double> knots{0.0}, images{0.0};
    const int n = 1 + static_cast<int>(s.uniform() * 3.0);
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = 0.05 + 0.9 * s.uniform();
    for (auto& x : b) x = 0.05 + 0.9 * s.uniform();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (int i = 0; i < n; ++i) {
        if (a[i] <= knots.back() || b[i] <= images.back()) continue;
        knots.push_back(a[i]);
        images.push_back(b[i]);
    }
    knots.push_back(1.0);
    images.push_back(1.0);
    return TimeChange(knots, images);
}

bool same_structure(const JumpPath& x, const JumpPath& y) {
    return x.initial == y.initial && x.jump_times == y.jump_times && x.jump_values == y.jump_values;
}

}  // namespace

TEST(TimeChange, ValidationAndEvaluation) {
    EXPECT_THROW(TimeChange({0.0, 0.5, 0.4, 1.0}, {0.0, 0.3, 0.6, 1.0}), ValidationError);
    EXPECT_THROW(TimeChange({0.0, 1.0}, {0.0, 0.9}), ValidationError);
    EXPECT_THROW(TimeChange({0.0, 0.5, 1.0}, {0.0, 0.5, 0.5}), ValidationError);
    const TimeChange lam({0.0, 0.4, 1.0}, {0.0, 0.5, 1.0});
    EXPECT_DOUBLE_EQ(lam(0.4), 0.5);
    EXPECT_DOUBLE_EQ(lam(0.2), 0.25);
    EXPECT_DOUBLE_EQ(lam.inverse()(0.5), 0.4);
}

TEST(LogNorm, IdentityAndOneKnot) {
    EXPECT_EQ(log_norm(TimeChange::identity(1.0)), 0.0);
    const TimeChange lam({0.0, 0.4, 1.0}, {0.0, 0.5, 1.0});
    EXPECT_NEAR(log_norm(lam), std::log(1.25), 1e-15);
    EXPECT_NEAR(log_norm(lam), std::max(std::abs(std::log(0.5 / 0.4)), std::abs(std::log(0.5 / 0.6))), 1e-15);
}

TEST(LogNorm, CompositionBound) {
    Stream s(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = random_time_change(s), b = random_time_change(s);
        ASSERT_LE(log_norm(compose(a, b)), log_norm(a) + log_norm(b) + 1e-12);
        ASSERT_NEAR(log_norm(a.inverse()), log_norm(a), 1e-12);
    }
}

TEST(SupDistance, Examples) {
    const JumpPath x{1.0, {0.0}, {0.4}, {1.0}}, y{1.0, {0.0}, {0.5}, {1.0}};
    EXPECT_EQ(sup_distance(x, x), 0.0);
    EXPECT_EQ(sup_distance(x, y), 1.0);
}

TEST(D0, SelfAndConstantPaths) {
    Stream s(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_path(s);
        EXPECT_EQ(d0(x, x), 0.0);
    }
    const JumpPath a{1.0, {0.3}, {}, {}}, b{1.0, {-0.45}, {}, {}};
    EXPECT_NEAR(d0(a, b), 0.75, 1e-15);
}

TEST(D0, ShiftedUnitJumpMatchesBruteForce) {
    const JumpPath x{1.0, {0.0}, {0.4}, {1.0}}, y{1.0, {0.0}, {0.5}, {1.0}};
    // one-knot time changes (a -> b); x - y o lambda vanishes iff lambda(0.4) = 0.5
    double best = 1.0;  // identity
    const int n = 2000;
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j) {
            const double a = static_cast<double>(i) / n, b = static_cast<double>(j) / n;
            const double ln = std::max(std::abs(std::log(b / a)), std::abs(std::log((1.0 - b) / (1.0 - a))));
            // lambda(0.4) on the piecewise-linear map through (a, b)
            const double l04 = 0.4 <= a ? 0.4 * b / a : b + (0.4 - a) * (1.0 - b) / (1.0 - a);
            const double sup = std::abs(l04 - 0.5) < 1e-12 ? 0.0 : 1.0;
            best = std::min(best, std::max(ln, sup));
        }
    const double d = d0(x, y);
    EXPECT_NEAR(best, std::log(1.25), 1e-6);
    EXPECT_NEAR(d, best, 1e-6);
    EXPECT_NEAR(d, std::log(1.25), 1e-12);
}

TEST(D0, MetricAxiomsOnRandomTriples) {
    Stream s(2718);
    double worst_excess = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t dim = trial % 4 == 3 ? 2 : 1;
        const auto x = random_path(s, dim), y = random_path(s, dim), z = random_path(s, dim);
        const double xy = d0(x, y), yx = d0(y, x);
        ASSERT_NEAR(xy, yx, 1e-12);
        ASSERT_EQ(d0(x, x), 0.0);
        ASSERT_LE(xy, sup_distance(x, y));
        ASSERT_GE(xy, 0.0);
        worst_excess = std::max(worst_excess, xy - d0(x, z) - d0(z, y));
        if (xy == 0.0) {
            ASSERT_TRUE(same_structure(x, y));
        }
    }
    EXPECT_LE(worst_excess, 1e-9);
}

TEST(D0, ObjectiveOfReportedTimeChange) {
    Stream s(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = random_path(s), y = random_path(s);
        const auto r = d0_detail(x, y);
        ASSERT_NEAR(skorokhod_objective(x, y, r.time_change), r.distance, 1e-12);
        for (std::size_t i = 1; i < r.matching.size(); ++i) {
            ASSERT_LT(r.matching[i - 1].first, r.matching[i].first);
            ASSERT_LT(r.matching[i - 1].second, r.matching[i].second);
        }
    }
}

TEST(JumpPath, FromSamplesAndEvaluation) {
    const std::vector<double> t{0.0, 0.25, 0.5, 0.75, 1.0};
    const std::vector<double> v{1.0, 1.0, 2.0, 2.0, -1.0};
    const auto p = JumpPath::from_samples(t, v, 1);
    EXPECT_EQ(p.jumps(), 2u);
    EXPECT_EQ(p.value(0.49)[0], 1.0);
    EXPECT_EQ(p.value(0.5)[0], 2.0);
    EXPECT_EQ(p.value(1.0)[0], -1.0);
    JumpPath bad{1.0, {0.0}, {0.5, 0.5}, {1.0, 2.0}};
    EXPECT_THROW(bad.validate(), ValidationError);
}
