#include "ywlab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "ywlab/config.hpp"
#include "ywlab/errors.hpp"
#include "ywlab/measure_core.hpp"
#include "ywlab/numeric.hpp"
#include "ywlab/presets.hpp"
#include "ywlab/skorokhod.hpp"
#include "ywlab/stoch_integral.hpp"

namespace ywlab {

namespace {

void power_guard(SuiteReport& r, std::size_t samples) {
    if (samples < kMinStatisticalSamples) {
        r.inconclusive = true;
        r.notes.push_back("sample count " + std::to_string(samples) + " is below " +
                          std::to_string(kMinStatisticalSamples) + "; verdict withheld");
    }
}

/// A box U x (t0, t1] of marks and times.
struct Box {
    std::string name;
    std::vector<bool> layers;  ///< member layers (0-based)
    int sign = 0;              ///< 0 any, +1 positive amplitude, -1 negative
    double t0 = 0.0, t1 = 1.0;

    bool contains(const PrmRealization& eta, std::size_t i) const {
        const double t = eta.atoms[i].time;
        if (!(t > t0 && t <= t1) || !layers[eta.atoms[i].layer - 1]) return false;
        const double a = eta.mark(i)[0];
        return sign == 0 || (sign > 0 ? a > 0.0 : a < 0.0);
    }

    double mean(const IntensityMeasure& nu) const {
        double rate = 0.0;
        for (std::size_t n = 0; n < nu.layers.size(); ++n) {
            if (!layers[n]) continue;
            const MarkQuadrature& q = nu.layers[n].law.amplitude_quadrature();
            double prob = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) {
                const double a = q.marks[i];
                if (sign == 0 || (sign > 0 ? a > 0.0 : a < 0.0)) prob += q.weights[i];
            }
            rate += nu.layers[n].mass * prob;
        }
        return rate * (t1 - t0);
    }

    bool disjoint(const Box& o) const {
        if (t1 <= o.t0 || o.t1 <= t0) return true;
        if (sign * o.sign < 0) return true;
        for (std::size_t n = 0; n < layers.size(); ++n)
            if (layers[n] && o.layers[n]) return false;
        return true;
    }
};

std::vector<Box> standard_boxes(std::size_t L) {
    std::vector<bool> all(L, true), first(L, false), last(L, false);
    first[0] = true;
    last[L - 1] = true;
    return {{"B1 all x (0,0.5]", all, 0, 0.0, 0.5},
            {"B2 layer 1 x (0.5,1]", first, 0, 0.5, 1.0},
            {"B3 positive x (0.2,0.7]", all, +1, 0.2, 0.7},
            {"B4 last layer x (0,1]", last, 0, 0.0, 1.0},
            {"B5 negative x (0.1,0.4]", all, -1, 0.1, 0.4}};
}

}  // namespace

SuiteReport prm_law_suite(const SuiteSettings& s) {
    SuiteReport r;
    r.name = "prm";
    power_guard(r, s.samples);
    const std::size_t N = s.samples;
    const double threshold = 4.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(N, 1)));
    const std::string presets[] = {"finite3", "two_layer", "alpha_half"};
    for (std::size_t p = 0; p < 3; ++p) {
        const auto nu = intensity_preset(presets[p], {});
        const std::size_t L = nu->layers.size();
        const std::vector<Box> boxes = standard_boxes(L);
        std::vector<std::uint64_t> counts(N * boxes.size(), 0);
        parallel_for(N, s.threads, [&](std::size_t i) {
            const StreamKey key{s.seed, 100 + p, StreamTag::monte_carlo, i, 0};
            const PrmRealization eta = simulate_prm(*nu, L, 1.0, key);
            for (std::size_t a = 0; a < eta.size(); ++a)
                for (std::size_t b = 0; b < boxes.size(); ++b)
                    if (boxes[b].contains(eta, a)) ++counts[i * boxes.size() + b];
        });
        std::vector<std::vector<double>> as_real(boxes.size(), std::vector<double>(N));
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            std::vector<std::uint64_t> column(N);
            for (std::size_t i = 0; i < N; ++i) {
                column[i] = counts[i * boxes.size() + b];
                as_real[b][i] = static_cast<double>(column[i]);
            }
            const double mean = boxes[b].mean(*nu);
            const GoodnessOfFit gof = chi_square_poisson(column, mean);
            r.add(nu->id + " chi-square p " + boxes[b].name + " (mean " + exact(mean) + ")", gof.p_value, 0.0, 0.001,
                  gof.p_value > 0.001);
        }
        for (std::size_t b = 0; b < boxes.size(); ++b)
            for (std::size_t c = b + 1; c < boxes.size(); ++c) {
                if (!boxes[b].disjoint(boxes[c])) continue;
                const double rho = correlation(as_real[b], as_real[c]);
                r.add(nu->id + " corr " + boxes[b].name.substr(0, 2) + "," + boxes[c].name.substr(0, 2), rho, 0.0,
                      threshold, std::abs(rho) < threshold);
            }
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

CountingMeasure random_measure(const IntensityMeasure& nu, Stream& stream) {
    CountingMeasure mu;
    mu.ladder_id = nu.id;
    mu.ladder_size = nu.layers.size();
    mu.dimension = nu.dimension;
    const auto atoms = static_cast<std::size_t>(stream.uniform() * 5.0);
    std::vector<double> z(nu.dimension);
    for (std::size_t a = 0; a < atoms; ++a) {
        const std::size_t layer = 1 + static_cast<std::size_t>(stream.uniform() * static_cast<double>(nu.layers.size()));
        nu.layers[layer - 1].law.sample(stream, z);
        mu.add(z, layer);
    }
    return mu;
}

}  // namespace

SuiteReport ds_suite(const SuiteSettings& s) {
    SuiteReport r;
    r.name = "d_S";
    power_guard(r, s.samples);
    for (const char* preset : {"two_layer", "alpha_half"}) {
        const auto nu = intensity_preset(preset, {});
        const SeparatingFamily family = default_separating_family(nu->dimension);
        Stream stream(StreamKey{s.seed, 200, StreamTag::monte_carlo, 0, 0});
        double sym = 0.0, self = 0.0, triangle = 0.0, negative = 0.0;
        for (std::size_t i = 0; i < s.samples; ++i) {
            const CountingMeasure a = random_measure(*nu, stream);
            const CountingMeasure b = random_measure(*nu, stream);
            const CountingMeasure c = random_measure(*nu, stream);
            const double ab = d_S(a, b, family), ba = d_S(b, a, family), bc = d_S(b, c, family),
                         ac = d_S(a, c, family);
            sym = std::max(sym, std::abs(ab - ba));
            self = std::max(self, d_S(a, a, family));
            triangle = std::max(triangle, ac - ab - bc);
            negative = std::max(negative, -std::min({ab, bc, ac}));
        }
        const std::string id = nu->id;
        r.add(id + " max |d(a,b) - d(b,a)|", sym, 0.0, 1e-12, sym <= 1e-12);
        r.add(id + " max d(a,a)", self, 0.0, 0.0, self == 0.0);
        r.add(id + " max triangle excess", triangle, 0.0, 1e-9, triangle <= 1e-9);
        r.add(id + " max negativity", negative, 0.0, 0.0, negative <= 0.0);
    }

    // two Dirac masses in a one-layer ladder with a single test function
    const auto nu = intensity_preset("finite3", {});
    SeparatingFamily f;
    f.functions.push_back([](Mark z) { return std::tanh(z[0]); });
    f.weights.push_back(0.5);
    CountingMeasure m1, m2;
    m1.ladder_id = m2.ladder_id = nu->id;
    const double a = 1.0, b = -1.0;
    m1.add(std::span<const double>(&a, 1), 1);
    m2.add(std::span<const double>(&b, 1), 1);
    const auto g = [](double x) { return x / (1.0 + x); };
    const double hand = 0.5 * g(0.5 * g(std::abs(std::tanh(a) - std::tanh(b))));
    const double got = d_S(m1, m2, f);
    r.add("two-Dirac d_S vs hand value " + exact(hand), got, 0.0, 1e-12, std::abs(got - hand) <= 1e-12);
    return r;
}

// ---------------------------------------------------------------------------

SuiteReport integral_suite(const SuiteSettings& s) {
    SuiteReport r;
    r.name = "integral";
    power_guard(r, s.samples);
    const std::size_t N = std::max<std::size_t>(s.samples, 2);
    const double sqrtN = std::sqrt(static_cast<double>(N));

    // martingale means at five times
    {
        const double times[] = {0.2, 0.4, 0.6, 0.8, 1.0};
        struct Case {
            std::string label;
            std::shared_ptr<const IntensityMeasure> nu;
            StepProcess xi;
        };
        Case cases[] = {{"a + a^2 on two_layer", intensity_preset("two_layer"), StepProcess::amplitude_polynomial(1.0, 0, 1, 1)},
                        {"a on finite_asym", intensity_preset("finite_asym"), StepProcess::amplitude_polynomial(1.0, 0, 1, 0)}};
        for (std::size_t c = 0; c < 2; ++c) {
            const Case& cs = cases[c];
            const Compensator comp = compensator(cs.xi, *cs.nu, cs.nu->layers.size());
            std::vector<std::vector<double>> values(5, std::vector<double>(N));
            parallel_for(N, s.threads, [&](std::size_t i) {
                const StreamKey key{s.seed, 300 + c, StreamTag::monte_carlo, i, 0};
                const PrmRealization eta = simulate_prm(*cs.nu, cs.nu->layers.size(), 1.0, key);
                const auto path = integrate_prm_step_on(cs.xi, comp, eta, times);
                for (std::size_t t = 0; t < 5; ++t) values[t][i] = path[t][0];
            });
            for (std::size_t t = 0; t < 5; ++t) {
                const SampleMoments m = moments(values[t]);
                const double tol = 4.0 * m.sd() / sqrtN;
                r.add("mean of \\int " + cs.label + " at t=" + exact(times[t]), m.mean, m.se(), tol,
                      std::abs(m.mean) < tol);
            }
        }
    }

    // p = 2 isometry for three integrands
    {
        const auto spacetime = intensity_preset("alpha_half_spacetime");
        StepProcess smooth = StepProcess::single(1.0, 1, [](Mark z, std::span<double> out) {
            out[0] = z[0] * std::sin(z[1]);
        });
        struct Case {
            std::string label;
            std::shared_ptr<const IntensityMeasure> nu;
            StepProcess xi;
        };
        Case cases[] = {{"a on two_layer", intensity_preset("two_layer"), StepProcess::amplitude_polynomial(1.0, 0, 1, 0)},
                        {"0.5 + a + a^2 on finite_asym", intensity_preset("finite_asym"),
                         StepProcess::amplitude_polynomial(1.0, 0.5, 1, 1)},
                        {"a sin(x) on alpha_half_spacetime", spacetime, smooth}};
        for (std::size_t c = 0; c < 3; ++c) {
            const ContinuityReport rep =
                continuity_bound_report(cases[c].xi, *cases[c].nu, 2.0, N, {s.seed, 310 + c, s.threads});
            const double tol = 5.0 * rep.ratio_se;
            r.add("isometry ratio \\int " + cases[c].label, rep.ratio, rep.ratio_se, tol,
                  std::abs(rep.ratio - 1.0) < tol);
        }
    }

    // Wiener isometry for a deterministic integrand
    {
        const TimeGrid grid = TimeGrid::uniform(1.0, 32);
        const std::size_t K = 2;
        std::vector<double> sig(32 * K);
        double exact_second = 0.0;
        for (std::size_t i = 0; i < 32; ++i)
            for (std::size_t k = 0; k < K; ++k) {
                sig[i * K + k] = std::cos(grid.times[i]) / static_cast<double>(k + 1);
                exact_second += sig[i * K + k] * sig[i * K + k] * (grid.times[i + 1] - grid.times[i]);
            }
        std::vector<double> squares(N);
        parallel_for(N, s.threads, [&](std::size_t i) {
            const WienerPath w = simulate_wiener(K, grid, {s.seed, 320, StreamTag::wiener, i, 0});
            squares[i] = std::pow(integrate_wiener(sig, w, 1.0), 2);
        });
        const SampleMoments m = moments(squares);
        const double tol = 4.0 * m.sd() / sqrtN;
        r.add("E(\\int sigma dW)^2 - \\int |sigma|^2 dt", m.mean - exact_second, m.se(), tol,
              std::abs(m.mean - exact_second) < tol);
    }

    // characteristic function of L(1)
    {
        const auto nu = intensity_preset("two_layer");
        std::vector<double> L1(N);
        parallel_for(N, s.threads, [&](std::size_t i) {
            const PrmRealization eta =
                simulate_prm(*nu, nu->layers.size(), 1.0, {s.seed, 330, StreamTag::monte_carlo, i, 0});
            L1[i] = levy_from_prm(eta, *nu, 1.0);
        });
        LevyTriplet tr{{0.0}, {0.0}, nu.get()};
        double worst = 0.0;
        for (int j = 1; j <= 10; ++j) {
            const double u = 0.25 * j;
            std::vector<double> re(N), im(N);
            for (std::size_t i = 0; i < N; ++i) {
                re[i] = std::cos(u * L1[i]);
                im[i] = std::sin(u * L1[i]);
            }
            const std::complex<double> emp(pairwise_sum(re) / static_cast<double>(N),
                                           pairwise_sum(im) / static_cast<double>(N));
            const double x[] = {u};
            worst = std::max(worst, std::abs(emp - characteristic_function(tr, x, 1.0)));
        }
        const double tol = 5.0 / sqrtN;
        r.add("sup_u |empirical cf of L(1) - Levy-Khinchine|", worst, 0.0, tol, worst < tol);
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

double sup_h_error(const SolutionPath& a, const SolutionPath& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double sq = 0.0;
        for (std::size_t c = 0; c < a.dim; ++c) sq += std::pow(a.at(i)[c] - b.at(i)[c], 2);
        worst = std::max(worst, std::sqrt(sq));
    }
    return worst;
}

}  // namespace

SuiteReport spde_suite(const SuiteSettings& s) {
    SuiteReport r;
    r.name = "spde";
    power_guard(r, s.samples);

    struct Variant {
        std::string preset;
        std::string stepping;
        std::string summation;
    };
    const Variant variants[] = {{"zero", "explicit", "sequential"},
                                {"heat", "explicit", "sequential"},
                                {"heat", "semi_implicit", "sequential"},
                                {"heat", "explicit", "pairwise"},
                                {"heat_jump", "explicit", "sequential"},
                                {"porous_medium", "explicit", "sequential"},
                                {"multiplicative_sigma", "explicit", "sequential"},
                                {"identity", "explicit", "sequential"}};
    for (const Variant& v : variants) {
        RunConfig cfg = preset_config(v.preset);
        cfg.stepping = v.stepping;
        cfg.summation = v.summation;
        cfg.seed = s.seed;
        const Model m = build_model(cfg);
        double worst = 0.0;
        for (std::size_t path = 0; path < 8; ++path) {
            const NoiseBundle bundle = simulate_bundle(m.noise, s.seed, path);
            const SolutionPath U = solve(m.coefficients, m.space, bundle, m.noise.grid, m.options);
            worst = std::max(worst, max_gamma_residual(U, bundle, m.coefficients, m.space, m.options));
        }
        r.add("max |Gamma residual| " + v.preset + " " + v.stepping + " " + v.summation, worst, 0.0, 1e-10,
              worst < 1e-10);
    }

    // heat + additive jumps against the mild solution on dyadic grids
    {
        RunConfig cfg = preset_config("heat_jump");
        const std::size_t levels[] = {32, 64, 128, 256};
        const std::size_t bundles = 32;
        std::vector<double> errors;
        for (std::size_t M : levels) {
            cfg.steps = M;
            const Model m = build_model(cfg);
            std::vector<double> errs(bundles);
            parallel_for(bundles, s.threads, [&](std::size_t b) {
                const NoiseBundle bundle = simulate_bundle(m.noise, s.seed, b);
                const SolutionPath U = solve(m.coefficients, m.space, bundle, m.noise.grid, m.options);
                const SolutionPath X = mild_heat_oracle(m.space, bundle.prm, *m.intensity, m.noise.grid, m.embedding);
                errs[b] = sup_h_error(U, X);
            });
            const SampleMoments mm = moments(errs);
            errors.push_back(mm.mean);
            r.add("mean sup-grid error vs mild oracle, M=" + std::to_string(M), mm.mean, mm.se(), 0.0, true);
        }
        for (std::size_t i = 1; i < errors.size(); ++i) {
            const double ratio = errors[i - 1] / errors[i];
            r.add("error ratio M=" + std::to_string(levels[i - 1]) + " -> " + std::to_string(levels[i]), ratio, 0.0,
                  0.5, std::abs(ratio - 2.0) <= 0.5);
        }
    }

    // finiteness of the integrals in the weak formulation on the heat example
    {
        const RunConfig cfg = preset_config("heat");
        const Model m = build_model(cfg);
        const NoiseBundle bundle = simulate_bundle(m.noise, s.seed, 0);
        const SolutionPath U = solve(m.coefficients, m.space, bundle, m.noise.grid, m.options);
        const FinitenessReport f =
            finiteness_check(U, m.coefficients, *m.intensity, m.space, 2.0, m.intensity->layers.size());
        r.add("finiteness integrals (heat)", f.finite ? 1.0 : 0.0, 0.0, 0.0, f.finite);
        double worst = 0.0;
        for (std::size_t k = 0; k < m.space.dim; ++k)
            for (std::size_t n = 0; n < f.layers; ++n) {
                const double total = f.small_mass[k * f.layers + n] + f.large_mass[k * f.layers + n];
                const double expect = m.intensity->layers[n].mass * m.noise.grid.horizon();
                worst = std::max(worst, std::abs(total - expect) / expect);
            }
        r.add("small/large jump mass partition defect", worst, 0.0, 1e-12, worst <= 1e-12);
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

JumpPath random_path(Stream& stream) {
    JumpPath p;
    p.horizon = 1.0;
    p.initial = {2.0 * stream.uniform() - 1.0};
    const auto jumps = static_cast<std::size_t>(stream.uniform() * 5.0);
    std::vector<double> times;
    for (std::size_t j = 0; j < jumps; ++j) times.push_back(stream.uniform_open_closed());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (double t : times) {
        const double v = 2.0 * stream.uniform() - 1.0;
        p.add_jump(t, std::span<const double>(&v, 1));
    }
    return p;
}

/// min over one-knot time changes (s, tau) on a 0.01 grid of
/// max(|log slope|, sup_t |x(t) - y(lambda(t))|), the sup sampled on a fine grid.
double brute_force_one_knot(const JumpPath& x, const JumpPath& y) {
    double best = std::numeric_limits<double>::infinity();
    for (int si = 1; si < 100; ++si)
        for (int ti = 1; ti < 100; ++ti) {
            const double s = si / 100.0, tau = ti / 100.0;
            const double ln = std::max(std::abs(std::log(tau / s)), std::abs(std::log((1.0 - tau) / (1.0 - s))));
            if (ln >= best) continue;
            double sup = 0.0;
            for (int k = 0; k <= 20000 && sup < best; ++k) {
                const double t = k / 20000.0;
                const double lt = t <= s ? t * tau / s : tau + (t - s) * (1.0 - tau) / (1.0 - s);
                sup = std::max(sup, std::abs(x.value(t)[0] - y.value(lt)[0]));
            }
            best = std::min(best, std::max(ln, sup));
        }
    return best;
}

}  // namespace

SuiteReport skorokhod_suite(const SuiteSettings& s) {
    SuiteReport r;
    r.name = "skorokhod";
    power_guard(r, s.samples);
    Stream stream(StreamKey{s.seed, 400, StreamTag::monte_carlo, 0, 0});
    double sym = 0.0, self = 0.0, triangle = 0.0, above_sup = 0.0;
    std::size_t indiscernible_failures = 0;
    for (std::size_t i = 0; i < s.samples; ++i) {
        const JumpPath a = random_path(stream), b = random_path(stream), c = random_path(stream);
        const double ab = d0(a, b), ba = d0(b, a), bc = d0(b, c), ac = d0(a, c);
        sym = std::max(sym, std::abs(ab - ba));
        self = std::max(self, d0(a, a));
        triangle = std::max(triangle, ac - ab - bc);
        above_sup = std::max({above_sup, ab - sup_distance(a, b), bc - sup_distance(b, c), ac - sup_distance(a, c)});
        for (const auto& [x, y, d] : {std::tuple{&a, &b, ab}, std::tuple{&b, &c, bc}, std::tuple{&a, &c, ac}})
            if (d == 0.0 && (x->initial != y->initial || x->jump_times != y->jump_times ||
                             x->jump_values != y->jump_values))
                ++indiscernible_failures;
    }
    r.add("max |d0(a,b) - d0(b,a)|", sym, 0.0, 1e-12, sym <= 1e-12);
    r.add("max d0(a,a)", self, 0.0, 0.0, self == 0.0);
    r.add("max triangle excess", triangle, 0.0, 1e-9, triangle <= 1e-9);
    r.add("max d0 - sup_distance", above_sup, 0.0, 0.0, above_sup <= 0.0);
    r.add("d0 = 0 with different paths", static_cast<double>(indiscernible_failures), 0.0, 0.0,
          indiscernible_failures == 0);

    JumpPath x, y;
    x.horizon = y.horizon = 1.0;
    x.initial = y.initial = {0.0};
    const double one = 1.0;
    x.add_jump(0.4, std::span<const double>(&one, 1));
    y.add_jump(0.5, std::span<const double>(&one, 1));
    const double oracle = brute_force_one_knot(x, y);
    const double got = d0(x, y);
    r.add("d0 of unit jumps at 0.4 and 0.5 vs grid oracle " + exact(oracle), got, 0.0, 1e-6,
          std::abs(got - oracle) <= 1e-6);
    return r;
}

}  // namespace ywlab
