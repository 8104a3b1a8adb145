#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ywlab/rng.hpp"

namespace ywlab {

/// A point of the mark space: a real vector of the measure's dimension.
using Mark = std::span<const double>;

// ---------------------------------------------------------------------------
// Amplitude laws. Every mark carries a real amplitude in its first
// coordinate; the "size" |z| of a mark used by moment and integrability
// conditions is the absolute amplitude.

/// Finitely many amplitude values.
struct DiscreteAmplitude {
    std::vector<double> values;
    std::vector<double> probabilities;
};

/// |a| uniform on (lo, hi], sign +/- with equal probability when symmetric.
struct UniformMagnitude {
    double lo = 0.0;
    double hi = 1.0;
    bool symmetric = true;
};

/// |a| with density proportional to r^(-alpha) exp(-r) on (lo, hi]; hi may be
/// +infinity. Restriction of nu_0(dz) = |z|^(-alpha) e^(-|z|) dz to a layer.
struct PowerExpMagnitude {
    double alpha = 0.5;
    double lo = 1.0;
    double hi = 2.0;
    bool symmetric = true;
};

/// Amplitude available only through a sampler. Moments and integrals are
/// estimated by Monte Carlo.
struct SampledAmplitude {
    std::string name;
    std::function<double(Stream&)> draw;
    double lo = 0.0;  ///< declared support of |a|
    double hi = 1.0;
    bool symmetric = false;
};

using AmplitudeLaw = std::variant<DiscreteAmplitude, UniformMagnitude, PowerExpMagnitude, SampledAmplitude>;

/// Controls the deterministic per-layer quadrature.
struct QuadratureResolution {
    double amplitude_panel_width = 0.25;
    std::size_t min_amplitude_panels = 4;
    std::size_t location_panels = 8;
    double tail_cutoff = 50.0;  ///< unbounded layers are integrated up to lo + tail_cutoff
    std::size_t monte_carlo_samples = 100000;
};

/// Weighted mark nodes whose weights sum to one (a discretized probability law).
struct MarkQuadrature {
    std::size_t dimension = 1;
    std::vector<double> marks;  ///< row-major, size() * dimension
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    Mark mark(std::size_t i) const { return {marks.data() + i * dimension, dimension}; }
};

/// Normalized law of the marks within one layer: amplitude, followed by
/// `location_dims` coordinates uniform on (0, location_extent).
class MarkLaw {
public:
    explicit MarkLaw(AmplitudeLaw amplitude, std::size_t location_dims = 0, double location_extent = 1.0,
                     QuadratureResolution resolution = {});

    std::size_t dimension() const { return 1 + location_dims_; }
    std::size_t location_dims() const { return location_dims_; }
    double location_extent() const { return location_extent_; }
    const AmplitudeLaw& amplitude() const { return amplitude_; }

    void sample(Stream& stream, std::span<double> out) const;
    double sample_amplitude(Stream& stream) const;

    /// E|a|^p.
    double abs_moment(double p) const;
    /// E[a].
    double mean_amplitude() const;
    bool symmetric() const;
    /// Sampler-only laws have no exact moments.
    bool exact_moments() const;

    /// Support of |a|: (size_lo, size_hi].
    double size_lo() const;
    double size_hi() const;

    /// Quadrature over the amplitude only.
    const MarkQuadrature& amplitude_quadrature() const { return *amplitude_nodes_; }
    /// Quadrature over the location only (one node of weight 1 if no location).
    const MarkQuadrature& location_quadrature() const { return *location_nodes_; }
    /// Tensor-product quadrature over full marks.
    const MarkQuadrature& quadrature() const { return *nodes_; }

private:
    AmplitudeLaw amplitude_;
    std::size_t location_dims_;
    double location_extent_;
    std::shared_ptr<const MarkQuadrature> amplitude_nodes_;
    std::shared_ptr<const MarkQuadrature> location_nodes_;
    std::shared_ptr<const MarkQuadrature> nodes_;
    double sampled_mean_ = 0.0;
    double sampled_abs1_ = 0.0;
    double sampled_abs2_ = 0.0;
};

/// One disjoint layer L_n = S_n \ S_{n-1} of the intensity ladder.
struct LayerSpec {
    std::size_t index = 1;
    double mass = 0.0;  ///< nu(L_n), jumps per unit time
    MarkLaw law;
    std::string sampler_id;

    /// Membership predicate of the layer (size within (lo, hi]).
    bool contains(Mark z) const;
    /// \int_{L_n} |z|^p nu(dz).
    double moment(double p) const { return mass * law.abs_moment(p); }
    /// \int_{L_n} f dnu by the layer quadrature.
    double integrate(const std::function<double(Mark)>& f) const;
};

/// Sigma-finite intensity measure presented as a ladder of finite layers.
struct IntensityMeasure {
    std::string id;
    std::size_t dimension = 1;
    bool symmetric = true;
    /// The ladder truncates a measure of infinite total mass.
    bool infinite_activity = false;
    std::vector<LayerSpec> layers;

    std::size_t layer_count() const { return layers.size(); }
    /// Throws ConfigError when the ladder is inconsistent.
    void validate() const;
};

/// nu(S_n): total mass of layers 1..n. Throws RangeError unless 1 <= n <= layer count.
double cumulative_mass(const IntensityMeasure& nu, std::size_t n);

struct LevyIntegrability {
    double value = 0.0;  ///< \int 1 ^ |z|^p nu(dz) over the ladder
    std::vector<double> layer_contributions;
    /// The last layer contributes at most tail_tolerance * value.
    bool cauchy_tail = true;
};

/// \int (1 ^ |z|^p) nu(dz) summed layer by layer.
LevyIntegrability levy_integrability(const IntensityMeasure& nu, double p, double tail_tolerance = 0.05);

struct SymmetryCheck {
    bool pass = true;
    std::vector<double> layer_means;
    std::vector<double> layer_bounds;  ///< 4 sd / sqrt(N)
};

/// Draws N marks per layer and checks the amplitude mean against zero.
SymmetryCheck check_symmetry(const IntensityMeasure& nu, std::size_t draws, std::uint64_t seed);

// ---------------------------------------------------------------------------

/// Finite counting measure on a layered mark space.
struct CountingMeasure {
    std::string ladder_id;
    std::size_t ladder_size = 1;
    std::size_t dimension = 1;
    std::vector<double> marks;  ///< row-major atoms
    std::vector<std::size_t> layers;

    std::size_t size() const { return layers.size(); }
    Mark mark(std::size_t i) const { return {marks.data() + i * dimension, dimension}; }
    void add(Mark z, std::size_t layer);
};

/// True when every atom lies in its declared layer of nu.
bool atoms_in_layers(const CountingMeasure& mu, const IntensityMeasure& nu);

/// Bounded test functions with summable weights.
struct SeparatingFamily {
    std::vector<std::function<double(Mark)>> functions;
    std::vector<double> weights;

    std::size_t size() const { return functions.size(); }
    /// weights positive and the tail beyond the family is below tolerance
    bool summable(double tolerance) const;
    /// |f| <= 1 on every supplied point.
    bool bounded_on(const CountingMeasure& points) const;
};

/// x -> tanh(<x, e_n>) over a fixed pseudo-random direction set with
/// weights 2^-n, n = 1..terms.
SeparatingFamily default_separating_family(std::size_t dimension, std::size_t terms = 32);

/// Sub-measure of atoms in layers 1..n.
CountingMeasure restrict(const CountingMeasure& mu, std::size_t n);

/// Two-level metric on counting measures over the ladder, both sums
/// truncated at `terms`.
double d_S(const CountingMeasure& mu1, const CountingMeasure& mu2, const SeparatingFamily& family,
           std::size_t terms = 32);

}  // namespace ywlab
