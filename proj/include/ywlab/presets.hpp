#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "ywlab/galerkin.hpp"
#include "ywlab/measure_core.hpp"
#include "ywlab/spde_solver.hpp"

namespace ywlab {

struct IntensityOptions {
    std::size_t layers = 3;  ///< ladder size of the alpha_half presets
    double location_extent = 3.141592653589793;
    QuadratureResolution resolution{};
};

/// Named intensities:
///   finite3               amplitudes +/-1, total mass 3
///   two_layer             +/-U(1,2] with mass 1 and +/-U(1/4,1] with mass 2
///   alpha_half            |z|^{-1/2} e^{-|z|} dz on S_n = {|z| > 1/n}
///   alpha_half_spacetime  alpha_half x uniform location on (0, L)
///   finite_asym           amplitude +1 with mass 2
/// Throws ConfigError for an unknown name.
std::shared_ptr<const IntensityMeasure> intensity_preset(const std::string& name, const IntensityOptions& options = {});
std::vector<std::string> intensity_preset_names();

/// How an additive jump enters the coefficients.
struct JumpEmbedding {
    enum class Kind { direct, smoothed };
    Kind kind = Kind::smoothed;
    /// smoothed: a (1 + mu_k)^{-smoothing} phi_k(x), or a (1 + mu_k)^{-smoothing}
    /// without a location coordinate.
    double smoothing = 0.0;
    double scale = 1.0;
};

EmbeddingFn make_embedding(const JumpEmbedding& embedding, const GalerkinSpace& space, std::size_t mark_dim);

struct CoefficientOptions {
    std::size_t modes = 2;
    double sigma_scale = 1.0;  ///< additive noise amplitude (heat)
    double gamma = 0.5;        ///< multiplicative noise strength
    double p_exp = 3.0;        ///< porous medium exponent
    JumpEmbedding embedding{};
};

/// Named coefficient sets:
///   zero                 b = sigma = c = 0
///   heat                 b = Delta u, additive sigma, additive jumps
///   porous_medium        b = Delta(|u|^{p-2} u), sigma(u)[h] = gamma u h,
///                        c(z, u) = u (I - Delta)^{-5/2} z
///   multiplicative_sigma b = Delta u, sigma(u)[h_k] = gamma u for every mode,
///                        additive jumps
///   identity             b = sigma = 0, c(z) = J(z)
/// Throws ConfigError for an unknown name.
Coefficients coefficient_preset(const std::string& name, const GalerkinSpace& space,
                                std::shared_ptr<const IntensityMeasure> nu, const CoefficientOptions& options = {});
std::vector<std::string> coefficient_preset_names();

}  // namespace ywlab
