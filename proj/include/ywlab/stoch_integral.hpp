#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ywlab/measure_core.hpp"
#include "ywlab/noise.hpp"
#include "ywlab/skorokhod.hpp"

namespace ywlab {

/// One piece xi_j of a step integrand: a map from marks to values.
struct StepPiece {
    std::function<void(Mark, std::span<double>)> value;
    /// Set when the piece is the scalar c0 + c1 a + c2 a^2 in the amplitude a;
    /// its compensator then comes from the layer moments.
    std::optional<std::array<double, 3>> amplitude_polynomial;
    /// The piece ignores the mark.
    bool mark_independent = false;
};

/// xi(z, s) = xi_j(z) for s in (t_{j-1}, t_j].
struct StepProcess {
    std::vector<double> partition;  ///< 0 = t_0 < ... < t_l = T
    std::size_t value_dim = 1;
    std::vector<StepPiece> pieces;
    double p = 2.0;  ///< declared integrability exponent

    std::size_t size() const { return pieces.size(); }
    double horizon() const { return partition.back(); }
    /// j (0-based) with s in (t_j, t_{j+1}]; s = 0 belongs to the first piece.
    std::size_t piece_index(double s) const;
    void validate() const;

    /// Scalar integrand c0 + c1 a + c2 a^2 on one piece.
    static StepProcess amplitude_polynomial(double horizon, double c0, double c1, double c2);
    /// Arbitrary mark function on one piece.
    static StepProcess single(double horizon, std::size_t value_dim, std::function<void(Mark, std::span<double>)> f);
};

/// Per piece, the vector \int xi_j dnu over the instantiated layers.
struct Compensator {
    std::size_t value_dim = 1;
    std::vector<double> rates;            ///< piece-major
    std::vector<double> standard_errors;  ///< nonzero only for Monte Carlo layers
};

/// Throws IntegrabilityError unless every layer integral of |xi_j|^p is finite.
Compensator compensator(const StepProcess& xi, const IntensityMeasure& nu, std::size_t layers);

/// sum_{atoms s_i <= t} xi(z_i, s_i) - sum_j |(t_{j-1}, t_j] cap (0, t]| \int xi_j dnu.
std::vector<double> integrate_prm_step(const StepProcess& xi, const PrmRealization& eta, const IntensityMeasure& nu,
                                       double t);

/// Same integral evaluated at every grid time, with one compensator table.
std::vector<std::vector<double>> integrate_prm_step_on(const StepProcess& xi, const PrmRealization& eta,
                                                       const IntensityMeasure& nu, std::span<const double> times);

/// As above with a compensator table computed once for many realizations.
std::vector<std::vector<double>> integrate_prm_step_on(const StepProcess& xi, const Compensator& comp,
                                                       const PrmRealization& eta, std::span<const double> times);

/// Jump times of t -> integral with the jump sizes (atoms at one time are
/// aggregated; zero jumps are dropped).
std::vector<std::pair<double, std::vector<double>>> integral_jumps(const StepProcess& xi, const PrmRealization& eta);

/// sum_k sum_{t_i <= t} sig(i-1, k) (beta_k(t_i) - beta_k(t_{i-1})); sig is
/// row-major over (cell, mode) with the path's mode count.
double integrate_wiener(std::span<const double> sig, const WienerPath& w, double t);

/// L(t) = \int_0^t \int a eta~(dz, ds) for the amplitude a of the marks.
double levy_from_prm(const PrmRealization& eta, const IntensityMeasure& nu, double t);

struct ContinuityReport {
    double lhs = 0.0;     ///< Monte Carlo E|I(T)|^p
    double lhs_se = 0.0;  ///< its standard error
    double rhs = 0.0;     ///< E \int\int |xi|^p dnu dr
    double ratio = 1.0;   ///< lhs / rhs, 1 when both vanish
    double ratio_se = 0.0;
    std::size_t samples = 0;
};

struct MonteCarloSettings {
    std::uint64_t seed = 1;
    std::uint64_t family = 0;
    unsigned threads = 1;
};

/// Empirical check of E|\int\int xi deta~|^p <= C E\int\int |xi|^p dnu dr over
/// all layers of nu.
ContinuityReport continuity_bound_report(const StepProcess& xi, const IntensityMeasure& nu, double p,
                                         std::size_t samples, const MonteCarloSettings& mc = {});

/// Levy triplet (Q, m, nu); Q is row-major dimension x dimension.
struct LevyTriplet {
    std::vector<double> m;
    std::vector<double> Q;
    const IntensityMeasure* nu = nullptr;  ///< no jumps when null

    std::size_t dimension() const { return m.size(); }
    /// Throws ValidationError unless Q is symmetric and positive semidefinite
    /// to within 1e-12.
    void validate() const;
};

/// exp(i<m,x>t - <Qx,x>t/2 - t \int (1 - e^{i<y,x>} + 1_{|y|<1} i<y,x>) nu(dy)).
std::complex<double> characteristic_function(const LevyTriplet& tr, std::span<const double> x, double t);

/// Predictable dyadic projection: value x(t_{j-1}) on (t_{j-1}, t_j] with
/// width T 2^-k. The pieces ignore the mark.
StepProcess haar_projection(const JumpPath& path, unsigned k);

/// L^2([0, T]) distance between a jump path and a mark-independent step process.
double l2_distance(const JumpPath& path, const StepProcess& projection);

}  // namespace ywlab
