#pragma once

#include <cstdint>
#include <random>

namespace recast {

// Deterministic random source. mt19937_64 is fully pinned by the standard and
// the uniform/normal draws are built by hand, so identical seeds reproduce
// identical datasets across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {   // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double normal();

    int uniform_int(int lo, int hi);   // inclusive bounds

private:
    std::mt19937_64 gen_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Stateless noise keyed by (seed, a, b, c); used for revision noise so the
// value of one vintage cell never depends on generation order.
double hash_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

} // namespace recast
