#pragma once

#include <cstdint>
#include <random>

namespace qfiae::rng {

// splitmix64 step; used to derive independent seed streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic combination of a base seed with a stream index.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + (stream << 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b >> 17);
}

// mt19937_64 with explicit bit-to-double conversion. std::uniform_real_distribution
// is implementation-defined, so sampling through it would not be reproducible
// across standard libraries; this is.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform in [-half_range, half_range)
    double next_symmetric(double half_range) {
        return (2.0 * next_double() - 1.0) * half_range;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace qfiae::rng
