#include "ywlab/spde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>

#include "ywlab/errors.hpp"
#include "ywlab/numeric.hpp"

namespace ywlab {

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double euclid(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

void Coefficients::validate(const GalerkinSpace& space, std::size_t mark_dim) const {
    if (!drift || !diffusion || !jump) throw ValidationError("coefficients " + name + " are incomplete");
    if (!stiff_diagonal.empty() && stiff_diagonal.size() != space.dim)
        throw ValidationError("stiff diagonal does not match the space");
    const std::size_t d = space.dim;
    std::vector<double> out_b(d), out_s(d * std::max<std::size_t>(modes, 1)), out_c(d), mark(mark_dim, 0.0);
    Stream probe(0x5eedULL);
    for (int trial = 0; trial < 16; ++trial) {
        const double scale = trial < 8 ? 0.1 * (trial + 1) : 2.0 * (trial - 7);
        std::vector<double> u(d);
        for (double& x : u) x = scale * probe.normal();
        const double size = euclid(u);
        mark[0] = probe.sign() * probe.uniform_open_closed();
        for (std::size_t c = 1; c < mark_dim; ++c) mark[c] = space.length * probe.uniform();
        drift(0.0, u, out_b);
        diffusion(0.0, u, out_s);
        jump(0.0, mark, u, out_c);
        if (!all_finite(out_b) || !all_finite(out_s) || !all_finite(out_c))
            throw ValidationError("coefficients " + name + " returned a non-finite value");
        const auto bound = [&](double exponent) { return growth.constant * (1.0 + std::pow(size, exponent)); };
        if (euclid(out_b) > bound(growth.drift_exponent) || euclid(out_s) > bound(growth.diffusion_exponent) ||
            euclid(out_c) > bound(growth.jump_exponent))
            throw ValidationError("coefficients " + name + " exceed their declared growth");
    }
}

CompensatorFn quadrature_compensator(JumpFn jump, std::shared_ptr<const IntensityMeasure> nu,
                                     bool linear_in_amplitude, std::size_t dim) {
    return [jump = std::move(jump), nu = std::move(nu), linear_in_amplitude, dim](
               double t, std::span<const double> u, std::size_t layers, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        std::vector<double> buf(dim), mark;
        for (std::size_t n = 0; n < layers; ++n) {
            const LayerSpec& layer = nu->layers[n];
            if (layer.mass == 0.0) continue;
            if (linear_in_amplitude) {
                const double m1 = layer.law.mean_amplitude();
                if (m1 == 0.0 || layer.law.symmetric()) continue;
                const MarkQuadrature& loc = layer.law.location_quadrature();
                mark.assign(layer.law.dimension(), 0.0);
                for (std::size_t i = 0; i < loc.size(); ++i) {
                    mark[0] = 1.0;
                    const Mark x = loc.mark(i);
                    for (std::size_t c = 0; c < layer.law.location_dims(); ++c) mark[1 + c] = x[c];
                    jump(t, mark, u, buf);
                    for (std::size_t c = 0; c < dim; ++c) out[c] += layer.mass * m1 * loc.weights[i] * buf[c];
                }
            } else {
                const MarkQuadrature& q = layer.law.quadrature();
                for (std::size_t i = 0; i < q.size(); ++i) {
                    jump(t, q.mark(i), u, buf);
                    for (std::size_t c = 0; c < dim; ++c) out[c] += layer.mass * q.weights[i] * buf[c];
                }
            }
        }
    };
}

JumpPath SolutionPath::as_jump_path() const { return JumpPath::from_samples(times, values, dim); }

// ---------------------------------------------------------------------------

namespace {

std::mutex ambient_mutex;

double ambient_draw() {
    static std::mt19937_64 engine{std::random_device{}()};
    static std::normal_distribution<double> normal;
    std::lock_guard lock(ambient_mutex);
    return normal(engine);
}

/// Accumulates the increment of one grid cell.
class Stepper {
public:
    Stepper(const Coefficients& coeffs, const GalerkinSpace& space, const NoiseBundle& bundle,
            const SolverOptions& options)
        : coeffs_(coeffs), space_(space), bundle_(bundle), options_(options), d_(space.dim), K_(coeffs.modes),
          b_(d_), s_(d_ * std::max<std::size_t>(K_, 1)), c_(d_), comp_(d_), terms_(d_) {
        space.validate();
        if (!coeffs.drift || !coeffs.diffusion || !coeffs.jump)
            throw ValidationError("coefficients " + coeffs.name + " are incomplete");
        if (bundle.initial.size() != d_) throw ValidationError("initial condition does not match the space");
        if (K_ > bundle.wiener.modes) throw ValidationError("coefficients read more Wiener modes than the bundle has");
        if (!coeffs.stiff_diagonal.empty() && coeffs.stiff_diagonal.size() != d_)
            throw ValidationError("stiff diagonal does not match the space");
        if (options.stepping == Stepping::semi_implicit && coeffs.stiff_diagonal.empty())
            throw ValidationError("semi-implicit stepping needs a stiff diagonal");
        const auto& times = bundle.wiener.grid;
        cell_end_.assign(times.size(), 0);
        std::size_t a = 0;
        for (std::size_t i = 1; i < times.size(); ++i) {
            while (a < bundle.prm.size() && bundle.prm.atoms[a].time <= times[i]) ++a;
            cell_end_[i] = a;
        }
        if (a != bundle.prm.size()) throw ValidationError("atoms beyond the grid horizon");
    }

    std::size_t steps() const { return bundle_.wiener.steps(); }
    bool semi_implicit() const { return options_.stepping == Stepping::semi_implicit; }

    /// Increment of cell i from state u; `jumped` collects the times of atoms
    /// with a nonzero effect.
    void increment(std::size_t i, std::span<const double> u, std::span<double> inc, std::vector<double>* jumped) {
        const auto& times = bundle_.wiener.grid;
        const double t0 = times[i - 1], dt = times[i] - t0;
        for (auto& t : terms_) t.clear();

        coeffs_.drift(t0, u, b_);
        for (std::size_t c = 0; c < d_; ++c) {
            double rate = b_[c];
            if (semi_implicit()) rate += coeffs_.stiff_diagonal[c] * u[c];
            terms_[c].push_back(rate * dt);
        }

        if (!coeffs_.zero_diffusion && K_ > 0) {
            coeffs_.diffusion(t0, u, s_);
            const std::size_t cell = options_.anticipating ? i + 1 : i;
            for (std::size_t k = 0; k < K_; ++k) {
                const double db = cell <= steps() ? bundle_.wiener.increment(cell, k) : 0.0;
                for (std::size_t c = 0; c < d_; ++c) terms_[c].push_back(s_[c * K_ + k] * db);
            }
        }

        if (!coeffs_.zero_jump) {
            for (std::size_t a = cell_end_[i - 1]; a < cell_end_[i]; ++a) {
                coeffs_.jump(t0, bundle_.prm.mark(a), u, c_);
                bool moved = false;
                for (std::size_t c = 0; c < d_; ++c) {
                    terms_[c].push_back(c_[c]);
                    moved = moved || c_[c] != 0.0;
                }
                if (moved && jumped) jumped->push_back(bundle_.prm.atoms[a].time);
            }
            if (coeffs_.jump_compensator) {
                coeffs_.jump_compensator(t0, u, bundle_.prm.layers_simulated, comp_);
                for (std::size_t c = 0; c < d_; ++c) terms_[c].push_back(-dt * comp_[c]);
            }
        }

        if (options_.ambient_rng)
            for (std::size_t c = 0; c < d_; ++c) terms_[c].push_back(1e-9 * ambient_draw());

        for (std::size_t c = 0; c < d_; ++c)
            inc[c] = options_.summation == Summation::pairwise ? pairwise_sum(terms_[c]) : sequential_sum(terms_[c]);
    }

    /// Next state from the previous one and the increment.
    void advance(std::size_t i, std::span<const double> u, std::span<const double> inc, std::span<double> next) const {
        const double dt = bundle_.wiener.grid[i] - bundle_.wiener.grid[i - 1];
        for (std::size_t c = 0; c < d_; ++c) {
            next[c] = u[c] + inc[c];
            if (semi_implicit()) next[c] /= 1.0 + coeffs_.stiff_diagonal[c] * dt;
        }
    }

private:
    const Coefficients& coeffs_;
    const GalerkinSpace& space_;
    const NoiseBundle& bundle_;
    const SolverOptions& options_;
    std::size_t d_, K_;
    std::vector<std::size_t> cell_end_;
    std::vector<double> b_, s_, c_, comp_;
    std::vector<std::vector<double>> terms_;
};

void check_grid(const NoiseBundle& bundle, const TimeGrid& grid) {
    grid.validate();
    if (grid.times != bundle.wiener.grid) throw ValidationError("bundle and solver grids differ");
    if (bundle.prm.horizon != grid.horizon()) throw ValidationError("bundle horizon does not match the grid");
}

}  // namespace

SolutionPath solve(const Coefficients& coeffs, const GalerkinSpace& space, const NoiseBundle& bundle,
                   const TimeGrid& grid, const SolverOptions& options) {
    check_grid(bundle, grid);
    Stepper stepper(coeffs, space, bundle, options);
    const std::size_t d = space.dim;
    SolutionPath U;
    U.times = grid.times;
    U.dim = d;
    U.values.resize(grid.times.size() * d);
    std::copy(bundle.initial.begin(), bundle.initial.end(), U.values.begin());
    std::vector<double> inc(d);
    for (std::size_t i = 1; i <= stepper.steps(); ++i) {
        stepper.increment(i, U.at(i - 1), inc, &U.jump_times);
        stepper.advance(i, U.at(i - 1), inc, U.at(i));
        if (!all_finite(U.at(i)))
            throw DivergenceError("state left the finite range at t = " + std::to_string(grid.times[i]),
                                  grid.times[i]);
    }
    return U;
}

namespace {

std::vector<double> residuals_at(const SolutionPath& U, const NoiseBundle& bundle, const Coefficients& coeffs,
                                 const GalerkinSpace& space, std::size_t idx, const SolverOptions& options) {
    if (U.dim != space.dim || U.times != bundle.wiener.grid)
        throw ValidationError("solution path does not match the bundle");
    Stepper stepper(coeffs, space, bundle, options);
    const std::size_t d = space.dim;
    std::vector<double> acc(bundle.initial.begin(), bundle.initial.end()), inc(d);
    for (std::size_t i = 1; i <= idx; ++i) {
        stepper.increment(i, U.at(i - 1), inc, nullptr);
        const double dt = U.times[i] - U.times[i - 1];
        for (std::size_t c = 0; c < d; ++c) {
            acc[c] += inc[c];
            if (stepper.semi_implicit()) acc[c] -= coeffs.stiff_diagonal[c] * dt * U.at(i)[c];
        }
    }
    for (std::size_t c = 0; c < d; ++c) acc[c] -= U.at(idx)[c];
    return acc;
}

}  // namespace

double gamma_residual(const SolutionPath& U, const NoiseBundle& bundle, const Coefficients& coeffs,
                      const GalerkinSpace& space, std::size_t k, double t, const SolverOptions& options) {
    if (k >= space.dim) throw RangeError("basis index beyond the Galerkin dimension");
    const std::size_t idx = TimeGrid{U.times}.require_index(t);
    return residuals_at(U, bundle, coeffs, space, idx, options)[k];
}

double max_gamma_residual(const SolutionPath& U, const NoiseBundle& bundle, const Coefficients& coeffs,
                          const GalerkinSpace& space, const SolverOptions& options) {
    if (U.dim != space.dim || U.times != bundle.wiener.grid)
        throw ValidationError("solution path does not match the bundle");
    Stepper stepper(coeffs, space, bundle, options);
    const std::size_t d = space.dim;
    std::vector<double> acc(bundle.initial.begin(), bundle.initial.end()), inc(d);
    double worst = 0.0;
    for (std::size_t c = 0; c < d; ++c) worst = std::max(worst, std::abs(acc[c] - U.at(0)[c]));
    for (std::size_t i = 1; i < U.size(); ++i) {
        stepper.increment(i, U.at(i - 1), inc, nullptr);
        const double dt = U.times[i] - U.times[i - 1];
        for (std::size_t c = 0; c < d; ++c) {
            acc[c] += inc[c];
            if (stepper.semi_implicit()) acc[c] -= coeffs.stiff_diagonal[c] * dt * U.at(i)[c];
            worst = std::max(worst, std::abs(acc[c] - U.at(i)[c]));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------

SolutionPath mild_heat_oracle(const GalerkinSpace& space, const PrmRealization& prm, const IntensityMeasure& nu,
                              const TimeGrid& grid, const EmbeddingFn& embedding) {
    grid.validate();
    space.validate();
    if (prm.intensity_id != nu.id) throw IncompatibleError("realization was drawn from a different intensity");
    const std::size_t d = space.dim;
    std::vector<double> drift(d, 0.0), buf(d);
    for (std::size_t n = 0; n < prm.layers_simulated; ++n) {
        const LayerSpec& layer = nu.layers[n];
        if (layer.mass == 0.0 || layer.law.symmetric()) continue;
        if (nu.infinite_activity)
            throw UnsupportedError("mild oracle needs a symmetric or finite intensity");
        const MarkQuadrature& q = layer.law.quadrature();
        for (std::size_t i = 0; i < q.size(); ++i) {
            embedding(q.mark(i), buf);
            for (std::size_t c = 0; c < d; ++c) drift[c] += layer.mass * q.weights[i] * buf[c];
        }
    }
    std::vector<double> jumps(prm.size() * d);
    for (std::size_t a = 0; a < prm.size(); ++a) embedding(prm.mark(a), std::span<double>(jumps).subspan(a * d, d));

    SolutionPath out;
    out.times = grid.times;
    out.dim = d;
    out.values.assign(grid.times.size() * d, 0.0);
    for (std::size_t a = 0; a < prm.size(); ++a) out.jump_times.push_back(prm.atoms[a].time);
    for (std::size_t m = 0; m < grid.times.size(); ++m) {
        const double t = grid.times[m];
        auto row = out.at(m);
        for (std::size_t a = 0; a < prm.size() && prm.atoms[a].time <= t; ++a)
            for (std::size_t c = 0; c < d; ++c)
                row[c] += std::exp(-space.eigenvalues[c] * (t - prm.atoms[a].time)) * jumps[a * d + c];
        for (std::size_t c = 0; c < d; ++c)
            row[c] -= -std::expm1(-space.eigenvalues[c] * t) / space.eigenvalues[c] * drift[c];
    }
    return out;
}

// ---------------------------------------------------------------------------

FinitenessReport finiteness_check(const SolutionPath& U, const Coefficients& coeffs, const IntensityMeasure& nu,
                                  const GalerkinSpace& space, double p, std::size_t layers) {
    const std::size_t d = space.dim;
    if (U.dim != d) throw ValidationError("solution path does not match the space");
    if (layers > nu.layers.size()) throw RangeError("layer cutoff beyond the ladder");
    FinitenessReport r;
    r.layers = layers;
    r.small_mass.assign(d * layers, 0.0);
    r.large_mass.assign(d * layers, 0.0);
    std::vector<double> drift_l1(d, 0.0), diff_l2(d, 0.0), small(d, 0.0), large(d, 0.0);
    const std::size_t K = coeffs.modes;
    std::vector<double> b(d), s(d * std::max<std::size_t>(K, 1)), c(d);
    for (std::size_t i = 0; i < U.size(); ++i)
        if (!all_finite(U.at(i))) {
            r.flagged.push_back("state at t = " + std::to_string(U.times[i]));
            break;
        }
    for (std::size_t i = 1; i < U.size(); ++i) {
        const double t0 = U.times[i - 1], dt = U.times[i] - t0;
        const auto u = U.at(i - 1);
        coeffs.drift(t0, u, b);
        for (std::size_t k = 0; k < d; ++k) drift_l1[k] += std::abs(b[k]) * dt;
        if (K > 0) {
            coeffs.diffusion(t0, u, s);
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t m = 0; m < K; ++m) diff_l2[k] += s[k * K + m] * s[k * K + m] * dt;
        }
        for (std::size_t n = 0; n < layers; ++n) {
            const LayerSpec& layer = nu.layers[n];
            const MarkQuadrature& q = layer.law.quadrature();
            for (std::size_t j = 0; j < q.size(); ++j) {
                coeffs.jump(t0, q.mark(j), u, c);
                const double w = layer.mass * q.weights[j] * dt;
                for (std::size_t k = 0; k < d; ++k) {
                    const double v = std::abs(c[k]);
                    if (v < 1.0) {
                        small[k] += w * std::pow(v, p);
                        r.small_mass[k * layers + n] += w;
                    } else {
                        large[k] += w * v;
                        r.large_mass[k * layers + n] += w;
                    }
                }
            }
        }
    }
    const auto max_of = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::isfinite(x) ? std::max(m, x) : x;
        return m;
    };
    r.drift_l1 = max_of(drift_l1);
    r.diffusion_l2 = max_of(diff_l2);
    r.small_jump_p = max_of(small);
    r.large_jump_1 = max_of(large);
    const std::pair<const char*, double> parts[] = {{"drift", r.drift_l1},
                                                    {"diffusion", r.diffusion_l2},
                                                    {"small jumps", r.small_jump_p},
                                                    {"large jumps", r.large_jump_1}};
    for (const auto& [label, value] : parts)
        if (!std::isfinite(value)) r.flagged.emplace_back(label);
    r.finite = r.flagged.empty();
    return r;
}

// ---------------------------------------------------------------------------

ThetaVerdict theta_check(std::span<const SolutionPath> ensemble, const RegularityRegistry& registry) {
    ThetaVerdict v;
    for (const Theta0& th : registry.theta0) {
        std::vector<double> values;
        values.reserve(ensemble.size());
        for (const SolutionPath& U : ensemble) values.push_back(th.value(U));
        const double mean = values.empty() ? 0.0 : pairwise_sum(values) / static_cast<double>(values.size());
        v.theta0_means.push_back(mean);
        if (!(mean <= registry.budget)) v.violations.push_back(th.name);
    }
    for (const Theta1& th : registry.theta1)
        for (const SolutionPath& U : ensemble)
            if (!th.admissible(U)) {
                v.violations.push_back(th.name);
                break;
            }
    v.member = v.violations.empty();
    return v;
}

Theta0 theta_l2_v(const GalerkinSpace& space) {
    return {"l2_v_norm_squared", [space](const SolutionPath& U) {
                double total = 0.0;
                for (std::size_t i = 1; i < U.size(); ++i) {
                    const double n = space.norm_v(U.at(i - 1));
                    total += n * n * (U.times[i] - U.times[i - 1]);
                }
                return total;
            }};
}

Theta1 theta_nonnegative(const GalerkinSpace& space) {
    return {"nonnegative", [space](const SolutionPath& U) {
                std::vector<double> nodal(space.dim);
                for (std::size_t i = 0; i < U.size(); ++i) {
                    space.to_nodal(U.at(i), nodal);
                    for (double x : nodal)
                        if (x < 0.0) return false;
                }
                return true;
            }};
}

}  // namespace ywlab
