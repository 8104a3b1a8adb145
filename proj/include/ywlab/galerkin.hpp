#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ywlab {

/// Spectral truncation of the Dirichlet Laplacian on (0, L): basis
/// phi_k(x) = sqrt(2/L) sin(k pi x / L) with eigenvalues mu_k = (k pi / L)^2.
/// V, H and V' are weighted l^2 norms on the coefficients with weights
/// mu_k, 1 and 1/mu_k.
struct GalerkinSpace {
    std::size_t dim = 0;
    double length = 0.0;
    std::vector<double> eigenvalues;
    std::vector<double> v_weights;
    std::vector<double> h_weights;
    std::vector<double> dual_weights;

    static GalerkinSpace dirichlet(std::size_t dim, double length);

    /// Throws ValidationError for an empty or inconsistent space.
    void validate() const;

    double norm_v(std::span<const double> u) const;
    double norm_h(std::span<const double> u) const;
    double norm_dual(std::span<const double> u) const;

    /// Basis function k (0-based, so phi_{k+1}) at x.
    double basis(std::size_t k, double x) const;
    /// Interior collocation points x_j = j L / (d + 1), j = 1..d.
    std::vector<double> collocation_points() const;
    /// Coefficients to values at the collocation points.
    void to_nodal(std::span<const double> coeffs, std::span<double> nodal) const;
    /// Exact inverse of to_nodal via discrete sine orthogonality.
    void from_nodal(std::span<const double> nodal, std::span<double> coeffs) const;
    /// Coefficients of the collocation product of two fields.
    void product(std::span<const double> a, std::span<const double> b, std::span<double> out) const;

private:
    std::vector<double> sines_;  ///< sin(k pi j / (d + 1)), row j, column k
};

/// Constants c1, c2 with |e|_{V'} <= c1 |e|_H <= c2 |e|_V on every basis vector.
struct EmbeddingConstants {
    double c1 = 0.0;
    double c2 = 0.0;
};

EmbeddingConstants embedding_constants(const GalerkinSpace& space);

/// Delta(|u|^{p-2} u) computed pseudo-spectrally.
std::vector<double> porous_medium_b(std::span<const double> u, double p_exp, const GalerkinSpace& space);

/// Pairing of a drift value with a state difference in the realization of
/// V' x V used by the monotonicity probe: sum_k a_k b_k / mu_k.
double monotonicity_pairing(std::span<const double> drift, std::span<const double> state, const GalerkinSpace& space);

}  // namespace ywlab
