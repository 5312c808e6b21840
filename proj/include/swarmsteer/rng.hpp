#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "swarmsteer/vec.hpp"

namespace swarmsteer {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic random stream. The mt19937_64 sequence is pinned by the
// standard; the uniform/gaussian mappings below are ours, so identical seeds
// give identical draws on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Independent stream derived from (seed, stream_id).
    static Rng substream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (stream_id + 1));
        return Rng(splitmix64(s));
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller, cosine branch only.
    double normal(double mean, double sigma) {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace swarmsteer
