#pragma once

#include <cmath>
#include <cstdint>

namespace plap {

/// splitmix64 finalizer: a full-avalanche 64-bit mixer.
inline uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

/// Stateless counter-based stream: every draw is a pure function of
/// (master seed, particle id, context, draw index), so ensembles are
/// reproducible independent of evaluation order and worker count.
/// Contexts 0..2^62 are substep indices; kInitContext seeds the initial
/// sampling draws.
struct CounterRng {
    uint64_t master = 0;
    static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    static constexpr uint64_t kInitContext = 0xC000000000000000ULL;

    uint64_t word(uint64_t pid, uint64_t ctx, uint64_t draw) const {
        uint64_t h = master + kGamma;
        h = mix64(h ^ (kGamma * (pid + 1)));
        h = mix64(h ^ (kGamma * (ctx + 1)));
        h = mix64(h ^ (kGamma * (draw + 1)));
        return h;
    }

    /// uniform in the open interval (0, 1)
    double uniform(uint64_t pid, uint64_t ctx, uint64_t draw) const {
        return (static_cast<double>(word(pid, ctx, draw) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// two independent standard normals (Box-Muller)
    void normal_pair(uint64_t pid, uint64_t ctx, double& z0, double& z1) const {
        const double u1 = uniform(pid, ctx, 0);
        const double u2 = uniform(pid, ctx, 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        z0 = r * std::cos(a);
        z1 = r * std::sin(a);
    }
};

}  // namespace plap
