#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace randef {

// std::mt19937_64 output is fixed by the standard, but the std distributions
// are not. Everything seeded in this library draws through these helpers so
// that a seed reproduces the same result with any standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    bool coin() { return bits(1) != 0; }

    /// Top `width` bits of one engine output, 0 <= width <= 64.
    std::uint64_t bits(unsigned width) {
        const std::uint64_t raw = engine_();
        return width == 0 ? 0 : raw >> (64 - width);
    }

    /// Uniform integer in [0, n), n >= 1, by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) {
            return 0;
        }
        const unsigned width = static_cast<unsigned>(std::bit_width(n - 1));
        for (;;) {
            const std::uint64_t v = bits(width);
            if (v < n) {
                return v;
            }
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(bits(53)) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 == 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace randef
