#pragma once

#include <cstdint>

namespace snakedex {

// SplitMix64 (Steele/Lea/Flood's mixer, public-domain reference constants).
// Small enough to construct per Monte-Carlo sample, which is what makes the
// counter-based sampling scheme cheap: stream i is SplitMix64(derive_seed(seed, i)),
// so sample i draws the same numbers no matter which worker runs it.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64()
    {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1) with 53 random mantissa bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi]; the rounding of lo + (hi-lo)*u can land a hair
    // outside the interval, which downstream limit checks must never see.
    double uniform(double lo, double hi)
    {
        const double v = lo + (hi - lo) * next_double();
        return v < lo ? lo : (v > hi ? hi : v);
    }

    // Uniform integer in [0,n). Modulo bias is negligible for the small n used here.
    uint64_t below(uint64_t n) { return next_u64() % n; }

private:
    uint64_t state_;
};

// Decorrelates a derived stream from (seed, index). Two mixing rounds keep
// neighbouring indices statistically independent.
inline uint64_t derive_seed(uint64_t seed, uint64_t index)
{
    SplitMix64 g(seed);
    uint64_t base = g.next_u64();
    SplitMix64 h(base ^ (index * 0xD6E8FEB86659FD93ULL + 0x2545F4914F6CDD1DULL));
    return h.next_u64();
}

} // namespace snakedex
