#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ywlab {

/// Sum by recursive halving. The association order depends only on the
/// length, which keeps ensemble reductions reproducible.
double pairwise_sum(std::span<const double> xs);

/// Plain left-to-right accumulation.
double sequential_sum(std::span<const double> xs);

struct SampleMoments {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< unbiased
    double sd() const;
    /// Standard error of the mean.
    double se() const;
};

SampleMoments moments(std::span<const double> xs);

/// Pearson correlation; 0 when either sample is constant.
double correlation(std::span<const double> xs, std::span<const double> ys);

struct GoodnessOfFit {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

/// Chi-square goodness of fit of nonnegative integer counts against
/// Poisson(mean). Cells are merged from the tails until each expected count
/// is at least `min_expected`.
GoodnessOfFit chi_square_poisson(std::span<const std::uint64_t> counts, double mean,
                                 double min_expected = 5.0);

/// Two-sample chi-square homogeneity test on integer counts, cells merged so
/// that every pooled expected count is at least `min_expected`.
GoodnessOfFit chi_square_two_sample(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b,
                                    double min_expected = 5.0);

struct KsResult {
    double distance = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
/// distribution and the usual small-sample correction of the argument.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_q(double lambda);

/// Runs body(i) for i in [0, n) on up to `threads` workers using a static
/// block partition. Each index is visited exactly once; callers write results
/// by index so the outcome does not depend on the thread count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

/// Nodes and weights of a composite Gauss-Legendre rule on [a, b].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels);

}  // namespace ywlab
