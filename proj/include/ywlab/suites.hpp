#pragma once

#include <cstddef>
#include <cstdint>

#include "ywlab/report.hpp"

namespace ywlab {

struct SuiteSettings {
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

/// Poisson laws of box counts for finite3, two_layer and alpha_half (3 layers)
/// and correlations of disjoint boxes.
SuiteReport prm_law_suite(const SuiteSettings& settings);

/// Metric axioms of d_S on random counting measures and a two-Dirac example.
SuiteReport ds_suite(const SuiteSettings& settings);

/// Martingale means, isometries and the characteristic function of L(1).
SuiteReport integral_suite(const SuiteSettings& settings);

/// Scheme consistency on every preset and convergence to the mild solution.
SuiteReport spde_suite(const SuiteSettings& settings);

/// Metric axioms of d0, the shifted-jump example and d0 <= sup distance.
SuiteReport skorokhod_suite(const SuiteSettings& settings);

}  // namespace ywlab
