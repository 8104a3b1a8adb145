#include "ywlab/yw_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <thread>

#include "ywlab/bundle_io.hpp"
#include "ywlab/errors.hpp"
#include "ywlab/numeric.hpp"
#include "ywlab/skorokhod.hpp"

namespace ywlab {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

namespace {

bool same_options(const SolverOptions& a, const SolverOptions& b) {
    return a.stepping == b.stepping && a.summation == b.summation && a.anticipating == b.anticipating &&
           a.ambient_rng == b.ambient_rng;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

double max_abs_difference(const SolutionPath& a, const SolutionPath& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

double max_abs(const SolutionPath& a) {
    double worst = 0.0;
    for (double v : a.values) worst = std::max(worst, std::abs(v));
    return worst;
}

}  // namespace

bool identical_paths(const SolutionPath& a, const SolutionPath& b) {
    return a.dim == b.dim && same_bits(a.times, b.times) && same_bits(a.values, b.values) &&
           same_bits(a.jump_times, b.jump_times);
}

PathwiseReport pathwise_uniqueness_test(const Coefficients& coeffs, const GalerkinSpace& space,
                                        const NoiseBundle& bundle, const SolverOptions& v1, const SolverOptions& v2,
                                        double tolerance) {
    const TimeGrid grid{bundle.wiener.grid};
    const SolutionPath a = solve(coeffs, space, bundle, grid, v1);
    const SolutionPath b = solve(coeffs, space, bundle, grid, v2);
    PathwiseReport r;
    r.tolerance = same_options(v1, v2) ? 1e-12 : tolerance;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double sq = 0.0;
        for (std::size_t c = 0; c < a.dim; ++c) sq += std::pow(a.at(i)[c] - b.at(i)[c], 2);
        r.max_distance = std::max(r.max_distance, std::sqrt(sq));
    }
    r.d0 = d0(a.as_jump_path(), b.as_jump_path());
    r.pass = r.max_distance <= r.tolerance && r.d0 <= r.tolerance;
    return r;
}

PathwiseReport pathwise_uniqueness_test(const Coefficients& coeffs, const GalerkinSpace& space,
                                        const NoiseBundle& bundle1, const NoiseBundle& bundle2,
                                        const SolverOptions& v1, const SolverOptions& v2, double tolerance) {
    if (!bit_equal(bundle1, bundle2)) throw ConfigError("pathwise uniqueness needs one bundle for both solutions");
    return pathwise_uniqueness_test(coeffs, space, bundle1, v1, v2, tolerance);
}

StrongReport strong_solution_check(const Coefficients& coeffs, const GalerkinSpace& space, const NoiseBundle& bundle,
                                   const SolverOptions& options) {
    const TimeGrid grid{bundle.wiener.grid};
    const SolutionPath first = solve(coeffs, space, bundle, grid, options);
    const std::vector<std::uint8_t> bytes = serialize(bundle);

    SolutionPath second;
    std::exception_ptr failure;
    std::thread fresh([&] {
        try {
            NoiseBundle decoded;
            try {
                decoded = deserialize(bytes);
            } catch (const DecodeError& e) {
                throw InfrastructureError(std::string("bundle round trip failed: ") + e.what());
            }
            if (!bit_equal(decoded, bundle)) throw InfrastructureError("bundle round trip changed the bundle");
            second = solve(coeffs, space, decoded, TimeGrid{decoded.wiener.grid}, options);
        } catch (...) {
            failure = std::current_exception();
        }
    });
    fresh.join();
    if (failure) std::rethrow_exception(failure);

    StrongReport r;
    r.bytes = bytes.size();
    r.pass = identical_paths(first, second);
    return r;
}

// ---------------------------------------------------------------------------

CompatibilityReport compatibility_test(const System& system, const NoiseConfig& noise, const EnsembleSettings& ensemble,
                                       double cut) {
    if (!system.coefficients || !system.space) throw ConfigError("compatibility test needs a system");
    const TimeGrid& grid = noise.grid;
    const std::size_t idx = grid.require_index(cut);
    const std::size_t N = ensemble.size;
    CompatibilityReport r;
    r.samples = N;
    r.cut = grid.times[idx];
    r.threshold = N > 0 ? 4.0 / std::sqrt(static_cast<double>(N)) : 0.0;
    if (N < kMinStatisticalSamples) r.verdict = Verdict::inconclusive;
    if (idx == grid.steps()) return r;  // no future noise after T

    const std::size_t d = system.space->dim;
    std::vector<std::size_t> coords{0};
    if (d > 1) coords.push_back(1);
    if (d > 2) coords.push_back(d - 1);
    const std::size_t K = noise.wiener_modes;
    const std::size_t layers = noise.n_max == 0 ? noise.intensity.layers.size() : noise.n_max;
    const std::size_t P = coords.size(), F = 2 * K + layers;

    NoiseConfig cfg = noise;
    cfg.family = ensemble.family;
    std::vector<double> past(N * P), future(N * F);
    parallel_for(N, ensemble.threads, [&](std::size_t i) {
        const NoiseBundle bundle = simulate_bundle(cfg, ensemble.master_seed, i);
        const SolutionPath U = solve(*system.coefficients, *system.space, bundle, grid, system.options);
        for (std::size_t p = 0; p < P; ++p) past[i * P + p] = U.at(idx)[coords[p]];
        const NoiseView fut = split_at(bundle, r.cut).second;
        double* row = &future[i * F];
        for (std::size_t k = 0; k < K; ++k) {
            row[k] = fut.wiener.increment(1, k);
            double total = 0.0;
            for (std::size_t c = 1; c <= fut.wiener.steps(); ++c) total += fut.wiener.increment(c, k);
            row[K + k] = total;
        }
        for (std::size_t n = 0; n < layers; ++n) row[2 * K + n] = 0.0;
        for (const PrmAtom& atom : fut.prm.atoms) row[2 * K + atom.layer - 1] += 1.0;
    });

    std::vector<double> xs(N), ys(N);
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t i = 0; i < N; ++i) xs[i] = past[i * P + p];
        for (std::size_t f = 0; f < F; ++f) {
            for (std::size_t i = 0; i < N; ++i) ys[i] = future[i * F + f];
            CorrelationEntry e;
            e.past = "U_" + std::to_string(coords[p] + 1) + "(t)";
            if (f < K) {
                e.future = "dbeta_" + std::to_string(f + 1) + " first cell";
            } else if (f < 2 * K) {
                e.future = "dbeta_" + std::to_string(f - K + 1) + " total";
            } else {
                e.future = "atoms layer " + std::to_string(f - 2 * K + 1);
            }
            e.correlation = correlation(xs, ys);
            r.max_abs = std::max(r.max_abs, std::abs(e.correlation));
            r.entries.push_back(std::move(e));
        }
    }
    if (r.verdict != Verdict::inconclusive) r.verdict = r.max_abs < r.threshold ? Verdict::pass : Verdict::fail;
    return r;
}

// ---------------------------------------------------------------------------

std::vector<Statistic> default_statistics(const GalerkinSpace& space, const TimeGrid& grid) {
    const double T = grid.horizon();
    std::vector<std::size_t> coords{0};
    if (space.dim > 1) coords.push_back(1);
    if (space.dim > 2) coords.push_back(space.dim - 1);
    std::vector<Statistic> stats;
    const std::pair<const char*, double> times[] = {{"T/4", 0.25 * T}, {"T/2", 0.5 * T}, {"T", T}};
    for (const auto& [label, t] : times) {
        // nearest grid time at or before t
        const auto it = std::upper_bound(grid.times.begin(), grid.times.end(), t * (1.0 + 1e-12));
        const std::size_t idx = static_cast<std::size_t>(it - grid.times.begin()) - 1;
        for (std::size_t k : coords)
            stats.push_back({"U_" + std::to_string(k + 1) + "(" + label + ")",
                             [idx, k](const SolutionPath& U) { return U.at(idx)[k]; }});
    }
    stats.push_back({"sup_t |U|_H", [space](const SolutionPath& U) {
                         double m = 0.0;
                         for (std::size_t i = 0; i < U.size(); ++i) m = std::max(m, space.norm_h(U.at(i)));
                         return m;
                     }});
    stats.push_back({"int |U|_H^2", [space](const SolutionPath& U) {
                         double s = 0.0;
                         for (std::size_t i = 1; i < U.size(); ++i)
                             s += std::pow(space.norm_h(U.at(i - 1)), 2) * (U.times[i] - U.times[i - 1]);
                         return s;
                     }});
    return stats;
}

void reverse_marks(NoiseBundle& bundle) {
    auto& prm = bundle.prm;
    const std::size_t n = prm.size(), dim = prm.dimension;
    for (std::size_t i = 0; i < n / 2; ++i) {
        std::swap_ranges(prm.marks.begin() + static_cast<std::ptrdiff_t>(i * dim),
                         prm.marks.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim),
                         prm.marks.begin() + static_cast<std::ptrdiff_t>((n - 1 - i) * dim));
        std::swap(prm.atoms[i].layer, prm.atoms[n - 1 - i].layer);
    }
}

namespace {

struct EnsembleRun {
    std::vector<SolutionPath> paths;
    std::vector<std::vector<double>> values;  ///< per statistic
    std::vector<double> sup_norm;
};

EnsembleRun run_ensemble(const Ensemble& e, const std::vector<Statistic>& statistics) {
    if (!e.system.coefficients || !e.system.space) throw ConfigError("ensemble without a system");
    const std::size_t N = e.settings.size;
    NoiseConfig cfg = e.noise;
    cfg.family = e.settings.family;
    EnsembleRun run;
    run.paths.resize(N);
    parallel_for(N, e.settings.threads, [&](std::size_t i) {
        NoiseBundle bundle = simulate_bundle(cfg, e.settings.master_seed, i);
        if (e.relabel) e.relabel(bundle);
        run.paths[i] = solve(*e.system.coefficients, *e.system.space, bundle, cfg.grid, e.system.options);
    });
    run.values.assign(statistics.size(), std::vector<double>(N));
    run.sup_norm.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t s = 0; s < statistics.size(); ++s) run.values[s][i] = statistics[s].value(run.paths[i]);
        double m = 0.0;
        for (std::size_t t = 0; t < run.paths[i].size(); ++t) m = std::max(m, e.system.space->norm_h(run.paths[i].at(t)));
        run.sup_norm[i] = m;
    }
    return run;
}

std::size_t quantile_index(const std::vector<double>& xs, double q) {
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    return order[static_cast<std::size_t>(q * static_cast<double>(order.size() - 1))];
}

}  // namespace

LawComparisonReport law_compare(const Ensemble& a, const Ensemble& b, const std::vector<Statistic>& statistics,
                                double alpha, bool skorokhod_summary) {
    if (a.settings.size != b.settings.size) throw ConfigError("law comparison needs ensembles of equal size");
    if (a.settings.master_seed == b.settings.master_seed && a.settings.family == b.settings.family)
        throw ConfigError("law comparison needs ensembles on disjoint substream families");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (statistics.empty()) throw ConfigError("law comparison needs at least one statistic");

    const EnsembleRun ra = run_ensemble(a, statistics);
    const EnsembleRun rb = run_ensemble(b, statistics);

    LawComparisonReport r;
    r.alpha = alpha;
    r.corrected_alpha = alpha / static_cast<double>(statistics.size());
    for (std::size_t s = 0; s < statistics.size(); ++s) {
        const KsResult ks = ks_two_sample(ra.values[s], rb.values[s]);
        StatisticComparison c;
        c.name = statistics[s].name;
        c.n_a = ra.values[s].size();
        c.n_b = rb.values[s].size();
        c.distance = ks.distance;
        c.p_value = ks.p_value;
        c.reject = ks.p_value < r.corrected_alpha;
        r.reject = r.reject || c.reject;
        r.statistics.push_back(std::move(c));
    }
    if (skorokhod_summary && a.settings.size > 0) {
        for (double q : {0.25, 0.5, 0.75}) {
            const SolutionPath& pa = ra.paths[quantile_index(ra.sup_norm, q)];
            const SolutionPath& pb = rb.paths[quantile_index(rb.sup_norm, q)];
            r.skorokhod_quantiles.push_back(q);
            r.skorokhod_distances.push_back(d0(pa.as_jump_path(), pb.as_jump_path()));
        }
    }
    if (a.settings.size < kMinStatisticalSamples) {
        r.verdict = Verdict::inconclusive;
    } else {
        r.verdict = r.reject ? Verdict::fail : Verdict::pass;
    }
    return r;
}

// ---------------------------------------------------------------------------

TransferReport transfer_check(const Coefficients& coeffs, const GalerkinSpace& space, const IntensityMeasure& nu,
                              const NoiseBundle& bundle, const Relabeling& relabeling, const SolverOptions& options) {
    const TimeGrid grid{bundle.wiener.grid};
    const SolutionPath U = solve(coeffs, space, bundle, grid, options);
    NoiseBundle other = bundle;
    TransferReport r;
    switch (relabeling.kind) {
        case Relabeling::Kind::identity: {
            r.tolerance = 0.0;
            r.pass = identical_paths(U, solve(coeffs, space, other, grid, options));
            r.max_deviation = r.pass ? 0.0 : max_abs_difference(U, solve(coeffs, space, other, grid, options));
            return r;
        }
        case Relabeling::Kind::sign_flip: {
            if (!nu.symmetric) throw ConfigError("sign flips preserve the law only for a symmetric intensity");
            if (nu.id != bundle.prm.intensity_id) throw ConfigError("bundle was drawn from another intensity");
            if (!coeffs.additive_jump || !coeffs.linear_dynamics)
                throw ConfigError("sign-flip transfer needs additive jumps and linear dynamics");
            for (std::size_t i = 0; i < other.prm.size(); ++i) other.prm.marks[i * other.prm.dimension] *= -1.0;
            NoiseBundle quiet = bundle;
            quiet.prm.atoms.clear();
            quiet.prm.marks.clear();
            const SolutionPath V = solve(coeffs, space, other, grid, options);
            const SolutionPath U0 = solve(coeffs, space, quiet, grid, options);
            for (std::size_t i = 0; i < U.values.size(); ++i)
                r.max_deviation = std::max(r.max_deviation, std::abs(U.values[i] + V.values[i] - 2.0 * U0.values[i]));
            r.tolerance = 1e-10 * (1.0 + max_abs(U) + max_abs(V));
            r.pass = r.max_deviation <= r.tolerance;
            return r;
        }
        case Relabeling::Kind::mode_swap: {
            const std::size_t K = other.wiener.modes;
            if (relabeling.mode_a >= K || relabeling.mode_b >= K) throw ConfigError("mode swap beyond the Wiener modes");
            if (!coeffs.exchangeable_modes && relabeling.mode_a != relabeling.mode_b)
                throw ConfigError("mode swaps preserve the solution law only for exchangeable diffusion");
            for (std::size_t i = 0; i < other.wiener.steps(); ++i)
                std::swap(other.wiener.increments[i * K + relabeling.mode_a],
                          other.wiener.increments[i * K + relabeling.mode_b]);
            const SolutionPath V = solve(coeffs, space, other, grid, options);
            r.max_deviation = max_abs_difference(U, V);
            r.tolerance = 1e-12 * (1.0 + max_abs(U));
            r.pass = r.max_deviation <= r.tolerance;
            return r;
        }
    }
    throw ConfigError("relabeling is not in the registry");
}

}  // namespace ywlab
