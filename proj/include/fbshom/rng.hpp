#ifndef FBSHOM_RNG_HPP
#define FBSHOM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace fbshom::rng {

/// SplitMix64 output function.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Small keyed generator: one independent stream per (seed, stream_id), so a
/// parallel run that hands out streams by event index reproduces the serial
/// output bit for bit regardless of scheduling.
class Stream {
  public:
    Stream(std::uint64_t seed, std::uint64_t stream_id)
        : state_(mix64(seed) ^ mix64(stream_id * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal (Box-Muller, pairs cached).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = u01(), u2 = u01();
        while (u1 <= 0.0) u1 = u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    /// Exponential with the given rate.
    double exponential(double rate) { return -std::log(1.0 - u01()) / rate; }

    /// Symmetric Laplace with density (1/2b) exp(-|x|/b).
    double laplace(double scale) {
        const double u = u01();
        return u < 0.5 ? scale * std::log(2.0 * std::max(u, 1e-300))
                       : -scale * std::log(2.0 * (1.0 - u));
    }

    /// Poisson count; exact inversion for small means, rounded normal
    /// approximation above (relative shape error < 1e-2/sqrt(mean)).
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 64.0) {
            const double l = std::exp(-mean);
            std::uint64_t k = 0;
            double p = u01();
            while (p > l) {
                ++k;
                p *= u01();
            }
            return k;
        }
        const double v = mean + std::sqrt(mean) * normal();
        return v <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(v));
    }

  private:
    std::uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

} // namespace fbshom::rng

#endif
