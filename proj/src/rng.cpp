#include "ywlab/rng.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace ywlab {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(const StreamKey& key) noexcept {
    std::uint64_t h = mix64(key.master);
    h = mix64(h ^ key.family);
    h = mix64(h ^ static_cast<std::uint64_t>(key.tag));
    h = mix64(h ^ key.path);
    h = mix64(h ^ key.lane);
    return h;
}

Stream::Stream(const StreamKey& key) : engine_(derive_seed(key)) {}

Stream::Stream(std::uint64_t seed) : engine_(mix64(seed)) {}

double Stream::uniform() {
    boost::random::uniform_01<double> dist;
    return dist(engine_);
}

double Stream::normal() {
    boost::random::normal_distribution<double> dist(0.0, 1.0);
    return dist(engine_);
}

std::uint64_t Stream::poisson(double mean) {
    if (mean <= 0.0) return 0;
    boost::random::poisson_distribution<std::uint64_t, double> dist(mean);
    return dist(engine_);
}

}  // namespace ywlab
