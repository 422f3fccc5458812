#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hs2s {

// Deterministic RNG wrapper. All float conversions are done by hand so that
// streams are bit-reproducible across standard libraries; std::*_distribution
// is implementation-defined and never used here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // One raw draw per call (reproducible sample counts); modulo bias is
    // negligible for the ranges used here.
    std::uint64_t uniform_int(std::uint64_t n) { return n <= 1 ? 0 : next_u64() % n; }

    // Box-Muller, both values consumed per pair.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    // Independent substream derived from the original seed, not the current
    // engine state, so forks are order-insensitive.
    Rng fork(std::uint64_t stream) const {
        std::uint64_t x = seed_ + 0x9E3779B97F4A7C15ull * (stream + 1);
        // splitmix64 finalizer
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ull;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBull;
        x ^= x >> 31;
        return Rng(x);
    }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace hs2s
