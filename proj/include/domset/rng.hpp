#pragma once

#include <cstdint>

namespace domset {

// Deterministic PRNG used for every random choice in the library so that
// datasets, splits and parameter initialization are bit-reproducible across
// platforms. Engines are the published reference algorithms:
//
//   splitmix64   (Steele, Lea, Flood; constants 0x9E3779B97F4A7C15,
//                 0xBF58476D1CE4E5B9, 0x94D049BB133111EB)
//   xoshiro256** (Blackman, Vigna; scrambler s[1]*5 rotl 7 *9, shift 17,
//                 rotations 45)
//
// Floating-point and bounded-integer mappings are defined here rather than
// taken from <random>, whose distributions are not portable across standard
// library implementations.

constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer applied to an arbitrary 64-bit value.
inline std::uint64_t mix64(std::uint64_t z) {
    z += kGolden64;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent child seed from a base seed and a lane index.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t lane) {
    return mix64(base + kGolden64 * (lane + 1));
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += kGolden64);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : state_) word = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound); unbiased via rejection sampling.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform integer in the inclusive range [lo, hi].
    int next_int(int lo, int hi) {
        return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace domset
