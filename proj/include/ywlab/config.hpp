#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ywlab/galerkin.hpp"
#include "ywlab/noise.hpp"
#include "ywlab/spde_solver.hpp"

namespace ywlab {

/// Fully resolved experiment configuration.
///
/// Config files use an INI grammar: `[section]` headers followed by
/// `key = value` lines, `;` or `#` comments. Every key is typed; unknown
/// sections, unknown keys and malformed values are errors. The keys are
///
///   [run]          preset (string), seed (u64), family (u64), paths (count),
///                  samples (count), ensemble (count), ensemble_b (count, 0 = ensemble),
///                  compat_samples (count), cut (fraction of T), alpha (real)
///   [space]        dim (count), length (real)
///   [coefficients] preset, modes, sigma_scale, gamma, p_exp, embedding (direct|smoothed),
///                  smoothing, jump_scale
///   [intensity]    preset, layers (alpha_half ladder size), cutoff (0 = all layers)
///   [grid]         horizon (real), steps (count)
///   [initial]      mean (comma list, one value is broadcast), sd (real)
///   [solver]       stepping (explicit|semi_implicit), summation (sequential|pairwise),
///                  variant (standard|anticipating|ambient_rng)
struct RunConfig {
    std::string preset = "heat";
    std::uint64_t seed = 1;
    std::uint64_t family = 0;
    std::size_t paths = 1;
    std::size_t samples = 10000;
    std::size_t ensemble = 200;
    std::size_t ensemble_b = 0;
    std::size_t compat_samples = 1000;
    double cut = 0.5;
    double alpha = 0.01;

    std::size_t dim = 4;
    double length = 3.141592653589793;

    std::string coefficients = "heat";
    std::size_t modes = 2;
    double sigma_scale = 1.0;
    double gamma = 0.5;
    double p_exp = 3.0;
    std::string embedding = "smoothed";
    double smoothing = 0.0;
    double jump_scale = 1.0;

    std::string intensity = "two_layer";
    std::size_t layers = 3;
    std::size_t cutoff = 0;

    double horizon = 1.0;
    std::size_t steps = 32;

    std::vector<double> initial_mean{1.0};
    double initial_sd = 0.0;

    std::string stepping = "explicit";
    std::string summation = "sequential";
    std::string variant = "standard";
};

/// Defaults of a named run preset: zero, heat, heat_jump, porous_medium,
/// multiplicative_sigma, identity. Throws ConfigError for unknown names.
RunConfig preset_config(const std::string& name);
std::vector<std::string> run_preset_names();

/// Applies every key of an INI file. Throws ConfigError.
void load_config_file(RunConfig& config, const std::string& path);
/// Applies one `section.key=value` assignment. Throws ConfigError.
void apply_override(RunConfig& config, const std::string& assignment);

/// `section.key=value` lines in a fixed order with exact number formatting.
std::string canonical_text(const RunConfig& config);
/// FNV-1a of the canonical text.
std::uint64_t config_digest(const RunConfig& config);
std::string digest_hex(std::uint64_t digest);

/// Everything a run needs, built from a configuration.
struct Model {
    GalerkinSpace space;
    std::shared_ptr<const IntensityMeasure> intensity;
    Coefficients coefficients;
    NoiseConfig noise;
    SolverOptions options;
    EmbeddingFn embedding;
    std::uint64_t digest = 0;
};

/// Throws ConfigError for inconsistent settings.
Model build_model(const RunConfig& config);

}  // namespace ywlab
