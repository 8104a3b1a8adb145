#include "ywlab/presets.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "ywlab/errors.hpp"

namespace ywlab {

namespace {

LayerSpec layer(std::size_t index, double mass, MarkLaw law, std::string sampler) {
    return LayerSpec{index, mass, std::move(law), std::move(sampler)};
}

double power_exp_mass(double lo, double hi) {
    const double upper_hi = std::isinf(hi) ? 0.0 : boost::math::tgamma(0.5, hi);
    return 2.0 * (boost::math::tgamma(0.5, lo) - upper_hi);
}

std::shared_ptr<IntensityMeasure> alpha_half(const IntensityOptions& o, bool spacetime) {
    if (o.layers == 0) throw ConfigError("alpha_half needs at least one layer");
    auto nu = std::make_shared<IntensityMeasure>();
    nu->id = std::string(spacetime ? "alpha_half_spacetime:" : "alpha_half:") + std::to_string(o.layers);
    nu->dimension = spacetime ? 2 : 1;
    nu->symmetric = true;
    nu->infinite_activity = true;
    for (std::size_t n = 1; n <= o.layers; ++n) {
        const double lo = 1.0 / static_cast<double>(n);
        const double hi = n == 1 ? std::numeric_limits<double>::infinity() : 1.0 / static_cast<double>(n - 1);
        double mass = power_exp_mass(lo, hi);
        if (spacetime) mass *= o.location_extent;
        MarkLaw law(PowerExpMagnitude{0.5, lo, hi, true}, spacetime ? 1 : 0, o.location_extent, o.resolution);
        nu->layers.push_back(layer(n, mass, std::move(law), "power_exp"));
    }
    return nu;
}

}  // namespace

std::shared_ptr<const IntensityMeasure> intensity_preset(const std::string& name, const IntensityOptions& o) {
    std::shared_ptr<IntensityMeasure> nu;
    if (name == "finite3") {
        nu = std::make_shared<IntensityMeasure>();
        nu->id = "finite3";
        nu->layers.push_back(layer(1, 3.0, MarkLaw(DiscreteAmplitude{{-1.0, 1.0}, {0.5, 0.5}}), "discrete"));
    } else if (name == "two_layer") {
        nu = std::make_shared<IntensityMeasure>();
        nu->id = "two_layer";
        nu->layers.push_back(layer(1, 1.0, MarkLaw(UniformMagnitude{1.0, 2.0, true}, 0, 1.0, o.resolution), "uniform"));
        nu->layers.push_back(layer(2, 2.0, MarkLaw(UniformMagnitude{0.25, 1.0, true}, 0, 1.0, o.resolution), "uniform"));
    } else if (name == "alpha_half") {
        nu = alpha_half(o, false);
    } else if (name == "alpha_half_spacetime") {
        nu = alpha_half(o, true);
    } else if (name == "finite_asym") {
        nu = std::make_shared<IntensityMeasure>();
        nu->id = "finite_asym";
        nu->symmetric = false;
        nu->layers.push_back(layer(1, 2.0, MarkLaw(DiscreteAmplitude{{1.0}, {1.0}}), "discrete"));
    } else {
        throw ConfigError("unknown intensity preset '" + name + "'");
    }
    nu->validate();
    return nu;
}

std::vector<std::string> intensity_preset_names() {
    return {"finite3", "two_layer", "alpha_half", "alpha_half_spacetime", "finite_asym"};
}

EmbeddingFn make_embedding(const JumpEmbedding& e, const GalerkinSpace& space, std::size_t mark_dim) {
    const std::size_t d = space.dim;
    if (e.kind == JumpEmbedding::Kind::direct) {
        return [d, mark_dim, scale = e.scale](Mark z, std::span<double> out) {
            for (std::size_t k = 0; k < d; ++k) out[k] = k < mark_dim ? scale * z[k] : 0.0;
        };
    }
    std::vector<double> weights(d);
    for (std::size_t k = 0; k < d; ++k) weights[k] = e.scale * std::pow(1.0 + space.eigenvalues[k], -e.smoothing);
    if (mark_dim >= 2) {
        return [weights, space](Mark z, std::span<double> out) {
            for (std::size_t k = 0; k < weights.size(); ++k) out[k] = z[0] * weights[k] * space.basis(k, z[1]);
        };
    }
    return [weights](Mark z, std::span<double> out) {
        for (std::size_t k = 0; k < weights.size(); ++k) out[k] = z[0] * weights[k];
    };
}

Coefficients coefficient_preset(const std::string& name, const GalerkinSpace& space,
                                std::shared_ptr<const IntensityMeasure> nu, const CoefficientOptions& o) {
    if (!nu) throw ConfigError("coefficient presets need an intensity");
    const std::size_t d = space.dim;
    const std::vector<double> mu = space.eigenvalues;
    Coefficients c;
    c.name = name;
    c.modes = o.modes;

    const auto heat_drift = [mu](double, std::span<const double> u, std::span<double> out) {
        for (std::size_t k = 0; k < mu.size(); ++k) out[k] = -mu[k] * u[k];
    };
    const auto no_drift = [](double, std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    const auto no_diffusion = [](double, std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    const auto no_jump = [](double, Mark, std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    const EmbeddingFn embed = make_embedding(o.embedding, space, nu->dimension);
    const auto additive_jump = [embed](double, Mark z, std::span<const double>, std::span<double> out) {
        embed(z, out);
    };
    const double max_mu = mu.back();

    if (name == "zero") {
        c.modes = 0;
        c.drift = no_drift;
        c.diffusion = no_diffusion;
        c.jump = no_jump;
        c.zero_diffusion = c.zero_jump = true;
        c.additive_jump = true;
        c.growth = {0.0, 0.0, 0.0, 1.0};
        return c;
    }
    if (name == "identity") {
        c.modes = 0;
        c.drift = no_drift;
        c.diffusion = no_diffusion;
        c.zero_diffusion = true;
        c.jump = additive_jump;
        c.additive_jump = true;
        c.linear_dynamics = true;
        c.jump_compensator = quadrature_compensator(c.jump, nu, true, d);
        c.growth = {0.0, 0.0, 0.0, 10.0 * (1.0 + std::abs(o.embedding.scale))};
        return c;
    }
    if (name == "heat") {
        const std::size_t K = o.modes;
        c.drift = heat_drift;
        c.stiff_diagonal = mu;
        c.diffusion = [K, d, s = o.sigma_scale](double, std::span<const double>, std::span<double> out) {
            std::fill(out.begin(), out.end(), 0.0);
            for (std::size_t k = 0; k < std::min(K, d); ++k) out[k * K + k] = s;
        };
        c.zero_diffusion = o.sigma_scale == 0.0 || K == 0;
        c.jump = additive_jump;
        c.additive_jump = true;
        c.linear_dynamics = true;
        c.jump_compensator = quadrature_compensator(c.jump, nu, true, d);
        c.growth = {1.0, 0.0, 0.0, 10.0 * (1.0 + max_mu + std::abs(o.sigma_scale) + std::abs(o.embedding.scale))};
        return c;
    }
    if (name == "multiplicative_sigma") {
        const std::size_t K = o.modes;
        c.drift = heat_drift;
        c.stiff_diagonal = mu;
        c.diffusion = [K, d, g = o.gamma](double, std::span<const double> u, std::span<double> out) {
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t k = 0; k < K; ++k) out[i * K + k] = g * u[i];
        };
        c.zero_diffusion = o.gamma == 0.0 || K == 0;
        c.exchangeable_modes = true;
        c.jump = additive_jump;
        c.additive_jump = true;
        c.jump_compensator = quadrature_compensator(c.jump, nu, true, d);
        c.growth = {1.0, 1.0, 0.0, 10.0 * (1.0 + max_mu + std::abs(o.gamma) * std::sqrt(double(K)) +
                                           std::abs(o.embedding.scale))};
        return c;
    }
    if (name == "porous_medium") {
        if (!(o.p_exp >= 2.0)) throw ConfigError("porous_medium needs p >= 2");
        const std::size_t K = o.modes;
        c.drift = [space, p = o.p_exp](double, std::span<const double> u, std::span<double> out) {
            const auto b = porous_medium_b(u, p, space);
            std::copy(b.begin(), b.end(), out.begin());
        };
        c.diffusion = [K, d, g = o.gamma](double, std::span<const double> u, std::span<double> out) {
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t k = 0; k < K; ++k) out[i * K + k] = g * u[i];
        };
        c.zero_diffusion = o.gamma == 0.0 || K == 0;
        c.exchangeable_modes = true;
        JumpEmbedding smooth = o.embedding;
        smooth.kind = JumpEmbedding::Kind::smoothed;
        smooth.smoothing = 2.5;
        const EmbeddingFn field = make_embedding(smooth, space, nu->dimension);
        c.jump = [field, space, d](double, Mark z, std::span<const double> u, std::span<double> out) {
            std::vector<double> f(d);
            field(z, f);
            space.product(u, f, out);
        };
        c.jump_compensator = quadrature_compensator(c.jump, nu, true, d);
        // |b(u)| grows like mu_d |u|^{p-1} up to the collocation constant
        c.growth = {o.p_exp - 1.0, 1.0, 1.0,
                    10.0 * (1.0 + max_mu) * std::pow(static_cast<double>(d + 1), o.p_exp) *
                        (1.0 + std::abs(o.gamma) * std::sqrt(double(K)) + std::abs(o.embedding.scale))};
        return c;
    }
    throw ConfigError("unknown coefficient preset '" + name + "'");
}

std::vector<std::string> coefficient_preset_names() {
    return {"zero", "heat", "porous_medium", "multiplicative_sigma", "identity"};
}

}  // namespace ywlab
