#pragma once

// Deterministic randomness helpers. std::shuffle and the standard
// distributions are implementation-defined, so bounded draws and shuffles
// are spelled out here; every output is a pure function of the seed.

#include <cstdint>
#include <random>
#include <vector>

namespace authprof {

// splitmix64-style mixing for deriving independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, bound) without modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        for (;;) {
            const std::uint64_t v = engine_();
            if (v < limit) return v / (UINT64_MAX / bound);
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        if (items.size() < 2) return;
        for (std::size_t i = items.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(items[i], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace authprof
