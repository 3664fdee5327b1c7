#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gspf {

/// Deterministic random stream. std::normal_distribution and friends are
/// implementation-defined, so all transforms are spelled out here to make the
/// simulator reproducible bit-for-bit from a seed on any standard library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (the paired value is discarded).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Uniform integer on {lo,...,hi} by masked rejection.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        std::uint64_t mask = span - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        std::uint64_t v;
        do {
            v = gen_() & mask;
        } while (v >= span);
        return lo + static_cast<int>(v);
    }

    /// Chi-squared with integer df as a sum of squared normals.
    double chi_squared(int df) {
        double s = 0.0;
        for (int i = 0; i < df; ++i) {
            const double z = normal();
            s += z * z;
        }
        return s;
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace gspf
