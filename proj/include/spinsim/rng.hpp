#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace spinsim::rng {

// SplitMix64 finalizer, used to whiten sub-seed keys.
constexpr std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t combine(std::uint64_t seed, std::uint64_t key) {
    return mix(seed ^ (mix(key) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

// Key for a double-valued setting (detuning angle, a_z, ...). Streams are
// keyed on the value's bit pattern, not its grid index, so re-partitioning
// a sweep grid leaves every per-setting stream unchanged.
inline std::uint64_t doubleKey(double x) {
    return std::bit_cast<std::uint64_t>(x == 0.0 ? 0.0 : x); // canonicalize -0.0
}

// Derives an independent stream seed from a master seed and an ordered key
// list, e.g. (experiment tag, setting bits, device id).
inline std::uint64_t deriveSeed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t s = mix(master);
    for (std::uint64_t k : keys) {
        s = combine(s, k);
    }
    return s;
}

// Deterministic uniform stream. Doubles are built from raw mt19937_64 words
// rather than std::uniform_real_distribution so that sequences are
// bit-identical across standard libraries.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    // Uniform draw strictly inside (0,1).
    double uniform01() {
        ++draws_;
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t draws() const { return draws_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

} // namespace spinsim::rng
