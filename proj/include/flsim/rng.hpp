#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace flsim {

// Stream tags so that every consumer of randomness inside an episode draws
// from its own substream. Paired runs of the same seed must see identical
// world and dynamics streams regardless of beam count.
enum class StreamTag : std::uint64_t {
    World = 1,
    Dynamics = 2,
    Ping = 3,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives a child seed from (master seed, episode index, stream tag).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t episode, StreamTag tag) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ splitmix64(episode));
    s = splitmix64(s ^ static_cast<std::uint64_t>(tag));
    return s;
}

/// mt19937_64 with fixed-algorithm variate generation. std::*_distribution is
// implementation-defined, so uniform/normal/exponential are generated here
// with explicit formulas to keep streams reproducible across toolchains.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    RandomStream(std::uint64_t master, std::uint64_t episode, StreamTag tag)
        : engine_(derive_seed(master, episode, tag)) {}

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; two engine draws per variate, no cached state.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double std) { return mean + std * normal(); }

    // Unit-mean exponential.
    double exponential() {
        double u = uniform();
        return -std::log1p(-u);
    }

    // Unit-mean Rayleigh: scale sigma = sqrt(2/pi) so E[R] = sigma*sqrt(pi/2) = 1.
    double rayleigh() {
        double u = uniform();
        return std::sqrt(2.0 / M_PI) * std::sqrt(-2.0 * std::log1p(-u));
    }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace flsim
