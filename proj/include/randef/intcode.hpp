#pragma once

#include <bit>
#include <cstdint>
#include <cstdlib>

#include "randef/bitstring.hpp"
#include "randef/error.hpp"

namespace randef::intcode {

// Elias gamma: (bit_width(n) - 1) zeros, then n in binary. Defined for n >= 1.
// Length is 2*floor(log2 n) + 1 <= 2*log2(n) + 1.

constexpr unsigned gamma_length(std::uint64_t n) {
    if (n == 0) {
        throw Error(Errc::InvalidArgument, "gamma code is defined for n >= 1");
    }
    return 2 * static_cast<unsigned>(std::bit_width(n)) - 1;
}

inline void write_gamma(BitString& out, std::uint64_t n) {
    const unsigned width = static_cast<unsigned>(std::bit_width(n));
    if (n == 0) {
        throw Error(Errc::InvalidArgument, "gamma code is defined for n >= 1");
    }
    out.append(0, width - 1);
    out.append(n, width);
}

inline std::uint64_t read_gamma(BitReader& in) {
    unsigned zeros = 0;
    while (!in.read()) {
        if (++zeros > 63) {
            throw Error(Errc::MalformedBits, "gamma prefix too long");
        }
    }
    std::uint64_t v = 1;
    for (unsigned i = 0; i < zeros; ++i) {
        v = (v << 1) | (in.read() ? 1U : 0U);
    }
    return v;
}

// Signed deltas: "0" for zero (the unchanged flag); otherwise "1", a sign bit,
// then gamma(|d|).

constexpr unsigned signed_length(std::int64_t d) {
    if (d == 0) {
        return 1;
    }
    const auto magnitude = static_cast<std::uint64_t>(d < 0 ? -d : d);
    return 2 + gamma_length(magnitude);
}

inline void write_signed(BitString& out, std::int64_t d) {
    if (d == 0) {
        out.push_back(false);
        return;
    }
    out.push_back(true);
    out.push_back(d < 0);
    write_gamma(out, static_cast<std::uint64_t>(d < 0 ? -d : d));
}

inline std::int64_t read_signed(BitReader& in) {
    if (!in.read()) {
        return 0;
    }
    const bool negative = in.read();
    const auto magnitude = static_cast<std::int64_t>(read_gamma(in));
    return negative ? -magnitude : magnitude;
}

} // namespace randef::intcode
