#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ywlab/galerkin.hpp"
#include "ywlab/measure_core.hpp"
#include "ywlab/noise.hpp"
#include "ywlab/skorokhod.hpp"

namespace ywlab {

using DriftFn = std::function<void(double t, std::span<const double> u, std::span<double> out)>;
/// out is d x K row-major: out[i * K + k] = <sigma(t, u)[h_k], phi_i>.
using DiffusionFn = std::function<void(double t, std::span<const double> u, std::span<double> out)>;
using JumpFn = std::function<void(double t, Mark z, std::span<const double> u, std::span<double> out)>;
/// \int_{layers 1..n} c(t, z, u) nu(dz).
using CompensatorFn =
    std::function<void(double t, std::span<const double> u, std::size_t layers, std::span<double> out)>;

/// Declared growth |b(u)| <= C (1 + |u|^drift), and likewise for sigma and c.
struct GrowthBounds {
    double drift_exponent = 1.0;
    double diffusion_exponent = 1.0;
    double jump_exponent = 1.0;
    double constant = 10.0;
};

/// Coefficients b, sigma and c of the equation in spectral coordinates.
struct Coefficients {
    std::string name;
    std::size_t modes = 0;  ///< Wiener modes read by sigma
    DriftFn drift;
    DiffusionFn diffusion;
    JumpFn jump;
    CompensatorFn jump_compensator;
    /// Nonnegative lambda_k such that b(u) + lambda u is the nonstiff part;
    /// empty when the drift has no linear diagonal part.
    std::vector<double> stiff_diagonal;
    GrowthBounds growth;
    bool additive_jump = false;  ///< c does not depend on u
    bool linear_dynamics = false;  ///< b and sigma are affine in u
    bool exchangeable_modes = false;  ///< sigma(u)[h_k] is the same for every k
    bool zero_diffusion = false;
    bool zero_jump = false;

    /// Finite outputs within the declared growth on a probe set of states.
    /// Throws ValidationError otherwise.
    void validate(const GalerkinSpace& space, std::size_t mark_dim) const;
};

/// Compensator obtained from the layer quadrature of nu. For c linear in the
/// amplitude only the location quadrature is used, and symmetric layers
/// contribute nothing.
CompensatorFn quadrature_compensator(JumpFn jump, std::shared_ptr<const IntensityMeasure> nu,
                                     bool linear_in_amplitude, std::size_t dim);

struct SolutionPath {
    std::vector<double> times;
    std::size_t dim = 0;
    std::vector<double> values;      ///< row-major, one row per grid time
    std::vector<double> jump_times;  ///< atom times at which the state jumped

    std::size_t size() const { return times.size(); }
    std::span<const double> at(std::size_t i) const { return {values.data() + i * dim, dim}; }
    std::span<double> at(std::size_t i) { return {values.data() + i * dim, dim}; }
    /// Step path through the grid values.
    JumpPath as_jump_path() const;
};

enum class Stepping { explicit_euler, semi_implicit };
enum class Summation { sequential, pairwise };

struct SolverOptions {
    Stepping stepping = Stepping::explicit_euler;
    Summation summation = Summation::sequential;
    /// Negative control: sigma in cell i is multiplied by the increment of
    /// cell i + 1, so the state anticipates the noise.
    bool anticipating = false;
    /// Negative control: a process-global generator seeded from the operating
    /// system perturbs every step, so the solution is no function of the bundle.
    bool ambient_rng = false;
};

/// Euler-Maruyama step per grid cell with all coefficients evaluated at the
/// left endpoint and atoms applied in the cell containing their time.
/// Throws DivergenceError when the state stops being finite.
SolutionPath solve(const Coefficients& coeffs, const GalerkinSpace& space, const NoiseBundle& bundle,
                   const TimeGrid& grid, const SolverOptions& options = {});

/// Gamma_{phi_k, t}(U, bundle) with the integrals discretized exactly as in
/// solve; k is 0-based.
double gamma_residual(const SolutionPath& U, const NoiseBundle& bundle, const Coefficients& coeffs,
                      const GalerkinSpace& space, std::size_t k, double t, const SolverOptions& options = {});

/// Largest |gamma_residual| over all basis vectors and grid times.
double max_gamma_residual(const SolutionPath& U, const NoiseBundle& bundle, const Coefficients& coeffs,
                          const GalerkinSpace& space, const SolverOptions& options = {});

/// Maps a mark into coefficient space for additive jump noise.
using EmbeddingFn = std::function<void(Mark z, std::span<double> out)>;

/// Exact heat-semigroup solution xi_k(t) = sum_{t_i <= t} e^{-mu_k (t - t_i)} J(z_i)_k
/// minus the compensator drift (1 - e^{-mu_k t}) / mu_k * \int J dnu.
/// Throws UnsupportedError for an asymmetric infinite-activity intensity.
SolutionPath mild_heat_oracle(const GalerkinSpace& space, const PrmRealization& prm, const IntensityMeasure& nu,
                              const TimeGrid& grid, const EmbeddingFn& embedding);

struct FinitenessReport {
    /// Maxima over basis vectors of the four integrals.
    double drift_l1 = 0.0;
    double diffusion_l2 = 0.0;
    double small_jump_p = 0.0;
    double large_jump_1 = 0.0;
    /// Time-integrated nu-mass of {|<c, phi_k>| < 1} and its complement,
    /// indexed [k * layers + n].
    std::vector<double> small_mass;
    std::vector<double> large_mass;
    std::size_t layers = 0;
    bool finite = true;
    std::vector<std::string> flagged;
};

FinitenessReport finiteness_check(const SolutionPath& U, const Coefficients& coeffs, const IntensityMeasure& nu,
                                  const GalerkinSpace& space, double p, std::size_t layers);

struct Theta0 {
    std::string name;
    std::function<double(const SolutionPath&)> value;
};

struct Theta1 {
    std::string name;
    /// true means theta_1 = 0 (the path is admissible); false means infinity.
    std::function<bool(const SolutionPath&)> admissible;
};

struct RegularityRegistry {
    std::vector<Theta0> theta0;
    std::vector<Theta1> theta1;
    double budget = 0.0;  ///< R
};

struct ThetaVerdict {
    bool member = true;
    std::vector<double> theta0_means;
    std::vector<std::string> violations;
};

ThetaVerdict theta_check(std::span<const SolutionPath> ensemble, const RegularityRegistry& registry);

/// \int_0^T |U(s)|_V^2 ds by the left-point rule.
Theta0 theta_l2_v(const GalerkinSpace& space);
/// Nodal values at the collocation points stay nonnegative.
Theta1 theta_nonnegative(const GalerkinSpace& space);

}  // namespace ywlab
