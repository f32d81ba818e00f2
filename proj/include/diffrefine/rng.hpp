#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace diffrefine {

// Seedable random stream. All commands and training loops derive their
// streams from a single root seed via child(), so runs are reproducible
// and sub-streams are independent of draw order elsewhere.
//
// Doubles are built from raw mt19937_64 output and gaussians via
// Box-Muller, so sequences are bit-identical across platforms (the
// std <random> distributions make no such guarantee).
class Prng {
public:
    explicit Prng(std::uint64_t seed) : seed_(seed), gen_(mix(seed)) {}

    // Derives an independent stream; (seed, tag) -> child seed is a fixed map.
    Prng child(std::uint64_t tag) const {
        return Prng(mix(seed_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1))));
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [lo, hi] by rejection-free scaling (bias < 2^-53).
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform() * (hi - lo + 1));
    }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace diffrefine
