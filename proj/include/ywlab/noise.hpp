#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ywlab/measure_core.hpp"
#include "ywlab/rng.hpp"

namespace ywlab {

/// Strictly increasing times 0 = t_0 < ... < t_M = T.
struct TimeGrid {
    std::vector<double> times;

    static TimeGrid uniform(double horizon, std::size_t steps);

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
    /// Throws ValidationError unless the grid starts at 0 and increases strictly.
    void validate() const;
    /// Index of a grid time; tolerates a relative mismatch of 1e-12 * T.
    std::optional<std::size_t> index_of(double t) const;
    /// Like index_of but throws ValidationError for off-grid times.
    std::size_t require_index(double t) const;
};

/// Per-mode Brownian increments; increments[(i-1) * modes + k] is
/// beta_k(t_i) - beta_k(t_{i-1}) for i = 1..M.
struct WienerPath {
    std::vector<double> grid;
    std::size_t modes = 0;
    std::vector<double> increments;

    std::size_t steps() const { return grid.empty() ? 0 : grid.size() - 1; }
    double increment(std::size_t i, std::size_t k) const { return increments[(i - 1) * modes + k]; }
    /// beta_k(t_i), accumulated from t_0.
    double value(std::size_t k, std::size_t i) const;
};

WienerPath simulate_wiener(std::size_t modes, const TimeGrid& grid, const StreamKey& key);

struct PrmAtom {
    double time = 0.0;
    std::size_t layer = 1;
    std::uint64_t seq = 0;  ///< insertion counter, breaks time ties
};

/// One realization of the Poisson random measure on (layers 1..n_max) x (0, T].
struct PrmRealization {
    double horizon = 0.0;
    std::string intensity_id;
    std::size_t dimension = 1;
    std::size_t layers_simulated = 0;
    std::vector<PrmAtom> atoms;  ///< sorted by (time, layer, seq)
    std::vector<double> marks;   ///< row-major, parallel to atoms
    /// T * \int_{discarded layers} 1 ^ |z|^2 dnu: variance scale of the
    /// truncated small jumps.
    double discarded_tail_bound = 0.0;

    std::size_t size() const { return atoms.size(); }
    Mark mark(std::size_t i) const { return {marks.data() + i * dimension, dimension}; }
};

PrmRealization simulate_prm(const IntensityMeasure& nu, std::size_t n_max, double horizon, const StreamKey& key);

/// N(t, U) = #{atoms with time <= t and mark in U}.
std::uint64_t count_process(const PrmRealization& eta, const std::function<bool(Mark)>& in_set, double t);

/// eta(U x (t0, t1]).
std::uint64_t count_in_box(const PrmRealization& eta, const std::function<bool(Mark)>& in_set, double t0, double t1);

/// The atoms of eta viewed as a counting measure on the layered mark space.
CountingMeasure marks_as_counting_measure(const PrmRealization& eta, const IntensityMeasure& nu);

/// Gaussian law of the initial Galerkin coefficients (sd = 0 gives a point mass).
struct InitialLaw {
    std::vector<double> mean;
    std::vector<double> sd;
};

struct StreamIds {
    std::uint64_t family = 0;
    std::uint64_t path = 0;
};

/// The input triple (W, eta, U_0) of one solution, with its provenance.
struct NoiseBundle {
    WienerPath wiener;
    PrmRealization prm;
    std::vector<double> initial;
    std::uint64_t master_seed = 0;
    StreamIds streams;
    std::uint64_t config_digest = 0;
};

/// Everything needed to re-simulate a bundle from (master seed, path index).
struct NoiseConfig {
    TimeGrid grid;
    std::size_t wiener_modes = 1;
    IntensityMeasure intensity;
    std::size_t n_max = 0;  ///< 0 means all layers
    InitialLaw initial;
    std::uint64_t family = 0;
    std::uint64_t config_digest = 0;
};

NoiseBundle simulate_bundle(const NoiseConfig& config, std::uint64_t master_seed, std::uint64_t path_index);

/// Bit-level equality of every field.
bool bit_equal(const NoiseBundle& a, const NoiseBundle& b);

/// The part of a bundle on [start, end]: Wiener increments of the cells in
/// the window, atoms with time in (start, end], and the initial condition for
/// the window starting at 0.
struct NoiseView {
    double start = 0.0;
    double end = 0.0;
    WienerPath wiener;
    PrmRealization prm;
    std::vector<double> initial;
    std::uint64_t master_seed = 0;
    StreamIds streams;
    std::uint64_t config_digest = 0;
};

/// Past (information up to t) and future (increments after t) views.
/// Throws ValidationError when t is not a grid time.
std::pair<NoiseView, NoiseView> split_at(const NoiseBundle& bundle, double t);

/// Inverse of split_at.
NoiseBundle merge(const NoiseView& past, const NoiseView& future);

}  // namespace ywlab
