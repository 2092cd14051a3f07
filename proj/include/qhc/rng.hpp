#pragma once

#include <cstdint>
#include <random>

namespace qhc::rng {

// SplitMix64 step; used to derive independent per-realization seeds from
// (seed_base, index) without coordination between streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed_base, std::uint64_t index) {
    std::uint64_t s = seed_base;
    std::uint64_t a = splitmix64(s);
    s = a ^ (index * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
    splitmix64(s);
    return splitmix64(s);
}

// mt19937_64 is fully specified by the standard, so sequences are
// bit-identical across platforms. Doubles are built from the top 53 bits
// rather than std::uniform_real_distribution (whose mapping is
// implementation-defined).
class Stream {
public:
    explicit Stream(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

private:
    std::mt19937_64 gen_;
};

} // namespace qhc::rng
