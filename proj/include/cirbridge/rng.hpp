#pragma once

#include <boost/random/normal_distribution.hpp>
#include <cstdint>
#include <random>

namespace cirb {

/// SplitMix64 finalizer; decorrelates nearby integers before they seed an engine.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of substream (stream, lane) under a master seed. Pure function, so a
/// path's random numbers never depend on scheduling.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t lane = 0) {
    return splitmix64(splitmix64(splitmix64(master) ^ stream) + lane);
}

/// Per-path generator: a 64-bit Mersenne twister, standard normals from
/// Boost's ziggurat sampler and 53-bit uniforms.
class PathRng {
public:
    explicit PathRng(std::uint64_t seed) : engine_(seed) {}
    PathRng(std::uint64_t master, std::uint64_t stream, std::uint64_t lane = 0)
        : engine_(stream_seed(master, stream, lane)) {}

    double gaussian() { return normal_(engine_); }
    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::mt19937_64 &engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace cirb
