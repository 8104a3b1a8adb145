#include "ywlab/galerkin.hpp"

#include <cmath>
#include <numbers>

#include "ywlab/errors.hpp"

namespace ywlab {

GalerkinSpace GalerkinSpace::dirichlet(std::size_t dim, double length) {
    if (dim == 0) throw ValidationError("Galerkin dimension must be positive");
    if (!(length > 0.0) || !std::isfinite(length)) throw ValidationError("domain length must be positive");
    GalerkinSpace s;
    s.dim = dim;
    s.length = length;
    for (std::size_t k = 1; k <= dim; ++k) {
        const double mu = std::pow(static_cast<double>(k) * std::numbers::pi / length, 2);
        s.eigenvalues.push_back(mu);
        s.v_weights.push_back(mu);
        s.h_weights.push_back(1.0);
        s.dual_weights.push_back(1.0 / mu);
    }
    s.sines_.resize(dim * dim);
    for (std::size_t j = 1; j <= dim; ++j)
        for (std::size_t k = 1; k <= dim; ++k)
            s.sines_[(j - 1) * dim + (k - 1)] =
                std::sin(std::numbers::pi * static_cast<double>(k * j) / static_cast<double>(dim + 1));
    s.validate();
    return s;
}

void GalerkinSpace::validate() const {
    if (dim == 0) throw ValidationError("Galerkin dimension must be positive");
    if (eigenvalues.size() != dim || v_weights.size() != dim || h_weights.size() != dim ||
        dual_weights.size() != dim || sines_.size() != dim * dim)
        throw ValidationError("Galerkin space data do not match its dimension");
    for (std::size_t k = 0; k < dim; ++k) {
        if (!(eigenvalues[k] > 0.0)) throw ValidationError("eigenvalues must be positive");
        if (k > 0 && eigenvalues[k] < eigenvalues[k - 1]) throw ValidationError("eigenvalues must be nondecreasing");
    }
}

namespace {
double weighted(std::span<const double> u, const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += w[k] * u[k] * u[k];
    return std::sqrt(s);
}
}  // namespace

double GalerkinSpace::norm_v(std::span<const double> u) const { return weighted(u, v_weights); }
double GalerkinSpace::norm_h(std::span<const double> u) const { return weighted(u, h_weights); }
double GalerkinSpace::norm_dual(std::span<const double> u) const { return weighted(u, dual_weights); }

double GalerkinSpace::basis(std::size_t k, double x) const {
    return std::sqrt(2.0 / length) * std::sin(static_cast<double>(k + 1) * std::numbers::pi * x / length);
}

std::vector<double> GalerkinSpace::collocation_points() const {
    std::vector<double> xs(dim);
    for (std::size_t j = 0; j < dim; ++j) xs[j] = static_cast<double>(j + 1) * length / static_cast<double>(dim + 1);
    return xs;
}

void GalerkinSpace::to_nodal(std::span<const double> coeffs, std::span<double> nodal) const {
    const double s = std::sqrt(2.0 / length);
    for (std::size_t j = 0; j < dim; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < dim; ++k) acc += sines_[j * dim + k] * coeffs[k];
        nodal[j] = s * acc;
    }
}

void GalerkinSpace::from_nodal(std::span<const double> nodal, std::span<double> coeffs) const {
    const double scale = 2.0 / (std::sqrt(2.0 / length) * static_cast<double>(dim + 1));
    for (std::size_t k = 0; k < dim; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) acc += sines_[j * dim + k] * nodal[j];
        coeffs[k] = scale * acc;
    }
}

void GalerkinSpace::product(std::span<const double> a, std::span<const double> b, std::span<double> out) const {
    std::vector<double> na(dim), nb(dim);
    to_nodal(a, na);
    to_nodal(b, nb);
    for (std::size_t j = 0; j < dim; ++j) na[j] *= nb[j];
    from_nodal(na, out);
}

EmbeddingConstants embedding_constants(const GalerkinSpace& space) {
    space.validate();
    EmbeddingConstants c;
    for (std::size_t k = 0; k < space.dim; ++k)
        c.c1 = std::max(c.c1, std::sqrt(space.dual_weights[k] / space.h_weights[k]));
    double ratio = 0.0;
    for (std::size_t k = 0; k < space.dim; ++k)
        ratio = std::max(ratio, std::sqrt(space.h_weights[k] / space.v_weights[k]));
    c.c2 = c.c1 * ratio;
    return c;
}

std::vector<double> porous_medium_b(std::span<const double> u, double p_exp, const GalerkinSpace& space) {
    if (!(p_exp >= 2.0)) throw ValidationError("porous medium exponent must be at least 2");
    if (u.size() != space.dim) throw ValidationError("state dimension does not match the space");
    std::vector<double> nodal(space.dim), out(space.dim);
    space.to_nodal(u, nodal);
    for (double& w : nodal) w = p_exp == 2.0 ? w : std::copysign(std::pow(std::abs(w), p_exp - 1.0), w);
    space.from_nodal(nodal, out);
    for (std::size_t k = 0; k < space.dim; ++k) out[k] *= -space.eigenvalues[k];
    return out;
}

double monotonicity_pairing(std::span<const double> drift, std::span<const double> state, const GalerkinSpace& space) {
    double s = 0.0;
    for (std::size_t k = 0; k < space.dim; ++k) s += drift[k] * state[k] / space.eigenvalues[k];
    return s;
}

}  // namespace ywlab
