#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace scrambling {

/// SplitMix64 finalizer. Used for all seed derivation so that alternate
/// implementations can reproduce the same streams.
constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// trial_seed = splitmix64(splitmix64(master_seed) ^ splitmix64(index + 1)).
constexpr uint64_t mix_seed(uint64_t master_seed, uint64_t index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 1));
}

/// Seedable, splittable source of randomness passed explicitly into every
/// stochastic operation. Backed by mt19937_64; bounded integers and doubles
/// are derived with fixed arithmetic so streams do not depend on the
/// standard library's distribution implementations.
class RandomSource {
   public:
    explicit RandomSource(uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    uint64_t seed() const { return seed_; }

    /// Independent child stream. Children with distinct indices never share
    /// state with the parent or with each other.
    RandomSource split(uint64_t index) const { return RandomSource(mix_seed(seed_, index)); }

    uint64_t next_u64() { return engine_(); }

    /// 32 random bits; each engine output is consumed as two halves.
    uint32_t next_u32() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const uint64_t r = engine_();
        spare_ = static_cast<uint32_t>(r >> 32);
        has_spare_ = true;
        return static_cast<uint32_t>(r);
    }

    /// Uniform integer in [0, bound) for bound < 2^32, from 32-bit draws.
    uint32_t uniform_below32(uint32_t bound) {
        uint64_t m = static_cast<uint64_t>(next_u32()) * bound;
        auto low = static_cast<uint32_t>(m);
        if (low < bound) {
            const uint32_t threshold = (0u - bound) % bound;
            while (low < threshold) {
                m = static_cast<uint64_t>(next_u32()) * bound;
                low = static_cast<uint32_t>(m);
            }
        }
        return static_cast<uint32_t>(m >> 32);
    }

    /// Uniform integer in [0, bound). Lemire's multiply-and-reject method.
    uint64_t uniform_below(uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto low = static_cast<uint64_t>(m);
        if (low < bound) {
            uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                low = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    template <typename T>
    void shuffle(std::span<T> values) {
        for (size_t i = values.size(); i > 1; --i) {
            const size_t j = i <= UINT32_MAX ? uniform_below32(static_cast<uint32_t>(i)) : uniform_below(i);
            std::swap(values[i - 1], values[j]);
        }
    }

   private:
    uint64_t seed_;
    std::mt19937_64 engine_;
    uint32_t spare_ = 0;
    bool has_spare_ = false;
};

}  // namespace scrambling
