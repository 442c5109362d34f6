// Seedable, splittable PRNG used for all randomized sampling.
//
// Algorithm: xoshiro256** (Blackman/Vigna), state seeded from splitmix64.
// Substreams are derived as substream_seed(seed, k), so a sampling job cut
// into fixed-size chunks produces identical draws at any parallelism width.
#pragma once

#include <cstdint>

namespace twa {

struct SplitMix64 {
    uint64_t state;

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

class Xoshiro256 {
public:
    using result_type = uint64_t;

    explicit Xoshiro256(uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& w : s_) w = sm.next();
    }

    static constexpr uint64_t min() { return 0; }
    static constexpr uint64_t max() { return ~0ull; }

    uint64_t operator()() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, bound), bias-free via rejection.
    uint64_t below(uint64_t bound) {
        const uint64_t threshold = -bound % bound;
        for (;;) {
            uint64_t r = (*this)();
            if (r >= threshold) return r % bound;
        }
    }

    bool coin() { return (*this)() >> 63; }

    // Uniform in [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
};

// Seed of substream k of a master seed; stable across platforms.
inline uint64_t substream_seed(uint64_t seed, uint64_t k) {
    SplitMix64 sm{seed ^ (0x9e3779b97f4a7c15ull * (k + 1))};
    return sm.next();
}

const char* const kRngName = "xoshiro256** (splitmix64 seeding)";

}  // namespace twa
