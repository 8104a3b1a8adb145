#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ywlab/galerkin.hpp"
#include "ywlab/noise.hpp"
#include "ywlab/spde_solver.hpp"

namespace ywlab {

enum class Verdict { pass, fail, inconclusive };

const char* verdict_name(Verdict v);

/// Statistical verdicts need at least this many samples.
inline constexpr std::size_t kMinStatisticalSamples = 100;

/// A system: coefficients on a Galerkin space, solved with fixed options.
struct System {
    const Coefficients* coefficients = nullptr;
    const GalerkinSpace* space = nullptr;
    SolverOptions options{};
};

// ---------------------------------------------------------------------------

struct PathwiseReport {
    double max_distance = 0.0;  ///< max over grid times of |U1(t) - U2(t)|
    double d0 = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

/// Solves twice on one bundle. Identical variants must agree to 1e-12; variants
/// that differ only in implementation details must agree to `tolerance`.
PathwiseReport pathwise_uniqueness_test(const Coefficients& coeffs, const GalerkinSpace& space,
                                        const NoiseBundle& bundle, const SolverOptions& v1, const SolverOptions& v2,
                                        double tolerance = 1e-10);

/// As above for two bundles, which must be bit-identical (ConfigError otherwise).
PathwiseReport pathwise_uniqueness_test(const Coefficients& coeffs, const GalerkinSpace& space,
                                        const NoiseBundle& bundle1, const NoiseBundle& bundle2,
                                        const SolverOptions& v1, const SolverOptions& v2, double tolerance = 1e-10);

bool identical_paths(const SolutionPath& a, const SolutionPath& b);

struct StrongReport {
    bool pass = true;
    std::size_t bytes = 0;
};

/// Solves, serializes the bundle, decodes it on a fresh thread, solves again
/// there and compares the two paths bit for bit. Throws InfrastructureError
/// when the round trip itself fails.
StrongReport strong_solution_check(const Coefficients& coeffs, const GalerkinSpace& space, const NoiseBundle& bundle,
                                   const SolverOptions& options = {});

// ---------------------------------------------------------------------------

struct CorrelationEntry {
    std::string past;
    std::string future;
    double correlation = 0.0;
};

struct CompatibilityReport {
    std::size_t samples = 0;
    double cut = 0.0;
    double threshold = 0.0;  ///< 4 / sqrt(N)
    double max_abs = 0.0;
    std::vector<CorrelationEntry> entries;
    Verdict verdict = Verdict::pass;
};

struct EnsembleSettings {
    std::uint64_t master_seed = 1;
    std::uint64_t family = 0;
    std::size_t size = 0;
    unsigned threads = 1;
};

/// Correlations between statistics of U(t) and of the future noise after t
/// (first and total future increments per Wiener mode, future atom counts per
/// layer) over independent bundles.
CompatibilityReport compatibility_test(const System& system, const NoiseConfig& noise, const EnsembleSettings& ensemble,
                                       double cut);

// ---------------------------------------------------------------------------

struct Statistic {
    std::string name;
    std::function<double(const SolutionPath&)> value;
};

/// U_k(t) for t in {T/4, T/2, T} and k in {1, 2, d}, sup_t |U(t)|_H and
/// \int_0^T |U|_H^2 dt.
std::vector<Statistic> default_statistics(const GalerkinSpace& space, const TimeGrid& grid);

struct Ensemble {
    System system;
    NoiseConfig noise;
    EnsembleSettings settings;
    /// Optional law-preserving transformation applied to each bundle.
    std::function<void(NoiseBundle&)> relabel;
};

struct StatisticComparison {
    std::string name;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    double distance = 0.0;
    double p_value = 1.0;
    bool reject = false;
};

struct LawComparisonReport {
    std::vector<StatisticComparison> statistics;
    double alpha = 0.01;
    double corrected_alpha = 0.01;
    /// d0 between the paths of A and B at matching quantiles of the sup norm.
    std::vector<double> skorokhod_quantiles;
    std::vector<double> skorokhod_distances;
    bool reject = false;
    Verdict verdict = Verdict::pass;
};

/// Two-sample Kolmogorov-Smirnov comparison of every statistic with a
/// Bonferroni correction. Throws ConfigError for ensembles of different sizes
/// or sharing a substream family.
LawComparisonReport law_compare(const Ensemble& a, const Ensemble& b, const std::vector<Statistic>& statistics,
                                double alpha = 0.01, bool skorokhod_summary = true);

/// Reverses the order of the atom marks, keeping the atom times.
void reverse_marks(NoiseBundle& bundle);

// ---------------------------------------------------------------------------

struct Relabeling {
    enum class Kind { identity, sign_flip, mode_swap };
    Kind kind = Kind::identity;
    std::size_t mode_a = 0;
    std::size_t mode_b = 1;
};

struct TransferReport {
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

/// Solves on a bundle and on its relabeled copy and checks the pushforward
/// relation: identical paths for identity and mode swaps, and for sign flips
/// U + U' = 2 U_0 where U_0 is the solution without atoms. Throws ConfigError
/// when the relabeling does not preserve the law for this system.
TransferReport transfer_check(const Coefficients& coeffs, const GalerkinSpace& space, const IntensityMeasure& nu,
                              const NoiseBundle& bundle, const Relabeling& relabeling, const SolverOptions& options = {});

}  // namespace ywlab
