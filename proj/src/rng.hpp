// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace qsdc {

// Deterministic seeded random stream.
//
// std::mt19937_64 has a fully specified output sequence, but the standard
// <random> distributions do not, so every mapping from raw 64-bit output to
// a bounded value is implemented here by hand.  Two builds given the same
// seed therefore draw identical sequences, which is what makes run reports
// byte-for-byte reproducible.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).  Rejection sampling keeps the result exactly
    // uniform for every n, not just powers of two.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    int coin() { return static_cast<int>(uniform_below(2)); }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 gen_;
};

// SplitMix64 finalizer; used to derive well-separated child seeds from a base
// seed plus a stream tag or trial counter.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Child seed for stream `tag` of run seed `seed`.  Tags are small constants;
// trial seeds in sweeps use derive_seed(base, point_index) and then
// derive_seed(point_seed, run_index), as documented in the README.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix_seed(seed ^ mix_seed(tag + 0x51ed2701ab582d6fULL));
}

} // namespace qsdc
