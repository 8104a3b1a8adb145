#include "ywlab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "ywlab/errors.hpp"

namespace ywlab {

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) return sequential_sum(xs);
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double sequential_sum(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

double SampleMoments::sd() const { return std::sqrt(variance); }

double SampleMoments::se() const { return n == 0 ? 0.0 : std::sqrt(variance / static_cast<double>(n)); }

SampleMoments moments(std::span<const double> xs) {
    SampleMoments m;
    m.n = xs.size();
    if (m.n == 0) return m;
    m.mean = pairwise_sum(xs) / static_cast<double>(m.n);
    if (m.n < 2) return m;
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - m.mean;
        sq[i] = d * d;
    }
    m.variance = pairwise_sum(sq) / static_cast<double>(m.n - 1);
    return m;
}

double correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw IncompatibleError("correlation: sample sizes differ");
    const auto mx = moments(xs);
    const auto my = moments(ys);
    if (mx.n < 2 || mx.variance <= 0.0 || my.variance <= 0.0) return 0.0;
    std::vector<double> prod(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) prod[i] = (xs[i] - mx.mean) * (ys[i] - my.mean);
    const double cov = pairwise_sum(prod) / static_cast<double>(mx.n - 1);
    return cov / (mx.sd() * my.sd());
}

namespace {

// Groups consecutive integer values into cells whose expected count is at
// least min_expected; returns the upper value (inclusive) of each cell.
std::vector<std::uint64_t> merge_cells(const std::vector<double>& expected_by_value,
                                       double min_expected) {
    std::vector<std::uint64_t> upper;
    double acc = 0.0;
    for (std::size_t v = 0; v < expected_by_value.size(); ++v) {
        acc += expected_by_value[v];
        if (acc >= min_expected) {
            upper.push_back(v);
            acc = 0.0;
        }
    }
    const std::uint64_t last = expected_by_value.empty() ? 0 : expected_by_value.size() - 1;
    if (upper.empty())
        upper.push_back(last);
    else
        upper.back() = last;  // an underfull tail folds into the last cell
    return upper;
}

std::size_t cell_of(std::uint64_t value, const std::vector<std::uint64_t>& upper) {
    for (std::size_t c = 0; c < upper.size(); ++c)
        if (value <= upper[c]) return c;
    return upper.size() - 1;
}

double chi2_sf(double stat, std::size_t dof) {
    if (dof == 0) return 1.0;
    boost::math::chi_squared_distribution<double> dist(static_cast<double>(dof));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

GoodnessOfFit chi_square_poisson(std::span<const std::uint64_t> counts, double mean,
                                 double min_expected) {
    GoodnessOfFit out;
    const double n = static_cast<double>(counts.size());
    if (counts.empty()) return out;
    if (mean <= 0.0) {
        // Poisson(0) is the point mass at 0.
        const bool all_zero = std::all_of(counts.begin(), counts.end(), [](auto c) { return c == 0; });
        out.p_value = all_zero ? 1.0 : 0.0;
        out.statistic = all_zero ? 0.0 : std::numeric_limits<double>::infinity();
        return out;
    }
    const std::uint64_t max_seen = *std::max_element(counts.begin(), counts.end());
    boost::math::poisson_distribution<double> pois(mean);
    const auto hi = std::max<std::uint64_t>(
        max_seen, static_cast<std::uint64_t>(boost::math::quantile(boost::math::complement(pois, 1e-12))));
    std::vector<double> expected(hi + 1);
    for (std::uint64_t v = 0; v <= hi; ++v) expected[v] = n * boost::math::pdf(pois, static_cast<double>(v));
    // upper tail mass beyond hi goes into the last value
    expected[hi] += n * boost::math::cdf(boost::math::complement(pois, static_cast<double>(hi)));

    const auto upper = merge_cells(expected, min_expected);
    std::vector<double> obs(upper.size(), 0.0), exp_cells(upper.size(), 0.0);
    for (auto c : counts) obs[cell_of(c, upper)] += 1.0;
    for (std::size_t v = 0; v < expected.size(); ++v) exp_cells[cell_of(v, upper)] += expected[v];
    double stat = 0.0;
    for (std::size_t c = 0; c < upper.size(); ++c) {
        const double d = obs[c] - exp_cells[c];
        stat += d * d / exp_cells[c];
    }
    out.statistic = stat;
    out.dof = upper.size() > 1 ? upper.size() - 1 : 0;
    out.p_value = chi2_sf(stat, out.dof);
    return out;
}

GoodnessOfFit chi_square_two_sample(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                    double min_expected) {
    GoodnessOfFit out;
    if (a.empty() || b.empty()) return out;
    std::uint64_t hi = 0;
    for (auto v : a) hi = std::max(hi, v);
    for (auto v : b) hi = std::max(hi, v);
    std::vector<double> ca(hi + 1, 0.0), cb(hi + 1, 0.0);
    for (auto v : a) ca[v] += 1.0;
    for (auto v : b) cb[v] += 1.0;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double frac = std::min(na, nb) / (na + nb);
    std::vector<double> pooled(hi + 1);
    for (std::size_t v = 0; v <= hi; ++v) pooled[v] = (ca[v] + cb[v]) * frac;
    const auto upper = merge_cells(pooled, min_expected);
    std::vector<double> oa(upper.size(), 0.0), ob(upper.size(), 0.0);
    for (std::size_t v = 0; v <= hi; ++v) {
        oa[cell_of(v, upper)] += ca[v];
        ob[cell_of(v, upper)] += cb[v];
    }
    double stat = 0.0;
    for (std::size_t c = 0; c < upper.size(); ++c) {
        const double tot = oa[c] + ob[c];
        if (tot == 0.0) continue;
        const double ea = tot * na / (na + nb);
        const double eb = tot * nb / (na + nb);
        stat += (oa[c] - ea) * (oa[c] - ea) / ea + (ob[c] - eb) * (ob[c] - eb) / eb;
    }
    out.statistic = stat;
    out.dof = upper.size() > 1 ? upper.size() - 1 : 0;
    out.p_value = chi2_sf(stat, out.dof);
    return out;
}

double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    // The alternating series converges slowly for small lambda; use the
    // theta-function form there.
    if (lambda < 1.18) {
        const double y = std::exp(-1.233700550136169827 / (lambda * lambda));  // pi^2/8
        double s = 0.0;
        for (int k = 1; k < 200; k += 2) {
            const double term = std::pow(y, static_cast<double>(k * k));
            s += term;
            if (term < 1e-17) break;
        }
        const double cdf = 2.5066282746310002 / lambda * s;  // sqrt(2 pi)
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double s = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        s += sign * term;
        if (term < 1e-17) break;
        sign = -sign;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    KsResult out;
    if (a.empty() || b.empty()) return out;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    out.distance = d;
    const double ne = std::sqrt(na * nb / (na + nb));
    out.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
    return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels) {
    using gauss = boost::math::quadrature::gauss<double, 8>;
    QuadratureRule rule;
    if (panels == 0 || !(b > a)) return rule;
    const auto& absc = gauss::abscissa();
    const auto& wts = gauss::weights();
    const double h = (b - a) / static_cast<double>(panels);
    rule.nodes.reserve(panels * 8);
    rule.weights.reserve(panels * 8);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * h;
        const double half = 0.5 * h;
        // Boost stores the nonnegative abscissae of the symmetric rule.
        for (std::size_t i = 0; i < absc.size(); ++i) {
            if (absc[i] == 0.0) {
                rule.nodes.push_back(mid);
                rule.weights.push_back(wts[i] * half);
                continue;
            }
            rule.nodes.push_back(mid - half * absc[i]);
            rule.weights.push_back(wts[i] * half);
            rule.nodes.push_back(mid + half * absc[i]);
            rule.weights.push_back(wts[i] * half);
        }
    }
    return rule;
}

}  // namespace ywlab
