#pragma once

#include <cstdint>
#include <initializer_list>

namespace parcelca {

/// SplitMix64 generator. Small state, full 64-bit output, passes the usual
/// statistical batteries. Streams for parallel work are derived by hashing a
/// (seed, path...) tuple so results never depend on scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]. Never returns 0.
    double next_open_closed() { return 1.0 - next_double(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection sampling keeps the distribution exact.
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h *= 0xFF51AFD7ED558CCDull;
    h ^= h >> 33;
    return h;
}

/// Derives an independent stream from a master seed and a path of indices,
/// e.g. derive_rng(seed, {iteration, cell_index}).
inline Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = hash_mix(0x2545F4914F6CDD1Dull, seed);
    for (std::uint64_t v : path) h = hash_mix(h, v);
    return Rng(h);
}

} // namespace parcelca
