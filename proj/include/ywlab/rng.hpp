#pragma once

#include <cstdint>
#include <random>

namespace ywlab {

/// Purpose tags separating the substreams of one master seed.
enum class StreamTag : std::uint64_t {
    wiener = 1,
    prm = 2,
    initial = 3,
    monte_carlo = 4,
    family = 5,
    quadrature = 6,
};

/// Identifies one independent random substream.
///
/// Substreams are keyed, not sequential: the generator for a key is derived
/// from the key alone, so a path can be re-simulated without replaying any
/// other path and the result does not depend on scheduling.
struct StreamKey {
    std::uint64_t master = 0;
    std::uint64_t family = 0;  ///< distinguishes independent ensembles
    StreamTag tag = StreamTag::wiener;
    std::uint64_t path = 0;
    std::uint64_t lane = 0;  ///< Wiener mode or PRM layer

    StreamKey with_lane(std::uint64_t l) const {
        StreamKey k = *this;
        k.lane = l;
        return k;
    }
    StreamKey with_tag(StreamTag t) const {
        StreamKey k = *this;
        k.tag = t;
        return k;
    }
    StreamKey with_path(std::uint64_t p) const {
        StreamKey k = *this;
        k.path = p;
        return k;
    }
};

/// SplitMix64 finalizer; used to hash stream keys into engine seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed derived from every field of the key.
std::uint64_t derive_seed(const StreamKey& key) noexcept;

/// A random substream. The distributions are Boost's, whose output is
/// specified by the algorithm rather than by the standard library vendor.
class Stream {
public:
    explicit Stream(const StreamKey& key);
    explicit Stream(std::uint64_t seed);

    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on (0, 1].
    double uniform_open_closed() { return 1.0 - uniform(); }
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    std::uint64_t poisson(double mean);
    /// +1 or -1 with equal probability.
    double sign() { return uniform() < 0.5 ? -1.0 : 1.0; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace ywlab
