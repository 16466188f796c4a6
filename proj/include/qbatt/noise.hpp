#ifndef QBATT_NOISE_HPP
#define QBATT_NOISE_HPP

#include <cmath>
#include <cstdint>

namespace qbatt {

/// Counter-based Gaussian stream. Each draw is a pure function of
/// (seed, site, step, substep): the counters are mixed through two rounds of
/// splitmix64 into a pair of uniforms which is mapped by the Box-Muller
/// transform. This makes increments bit-identical for a given seed regardless
/// of execution order or thread count.
class NoiseStream {
  public:
    explicit NoiseStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// One N(0,1) variate for the given counters.
    double standard_normal(std::uint32_t site, std::uint64_t step, std::uint32_t substep = 0) const {
        std::uint64_t key = mix(seed_ ^ mix(static_cast<std::uint64_t>(site) << 32 | substep));
        std::uint64_t a = mix(key ^ mix(step));
        std::uint64_t b = mix(a);
        double u1 = to_unit_open(a);
        double u2 = to_unit_open(b);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Wiener increment dw ~ N(0, dt).
    double wiener(std::uint32_t site, std::uint64_t step, double dt,
                  std::uint32_t substep = 0) const {
        return std::sqrt(dt) * standard_normal(site, step, substep);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Map to (0, 1]: keeps log() finite.
    static double to_unit_open(std::uint64_t x) {
        return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
    }

    std::uint64_t seed_;
};

}  // namespace qbatt

#endif
