#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "randef/error.hpp"

namespace randef {

/// An ordered sequence of bits. Bit 0 is the first bit written; hexadecimal
/// serialization packs bits most-significant first and zero-pads the tail.
class BitString {
public:
    BitString() = default;

    static BitString from_string(std::string_view text) {
        BitString out;
        out.bits_.reserve(text.size());
        for (char c : text) {
            if (c == '0' || c == '1') {
                out.bits_.push_back(c == '1');
            } else if (c != ' ' && c != '_') {
                throw Error(Errc::InvalidArgument,
                            std::string("bit string contains '") + c + "'");
            }
        }
        return out;
    }

    static BitString from_hex(std::string_view hex, std::size_t bit_len) {
        if (hex.size() != 2 * ((bit_len + 7) / 8)) {
            throw Error(Errc::MalformedBits, "hex length " + std::to_string(hex.size()) +
                                                 " does not match bit_len " + std::to_string(bit_len));
        }
        BitString out;
        out.bits_.reserve(bit_len);
        for (std::size_t i = 0; i < hex.size(); ++i) {
            const int nibble = hex_value(hex[i]);
            for (int b = 3; b >= 0; --b) {
                const bool bit = ((nibble >> b) & 1) != 0;
                if (out.bits_.size() < bit_len) {
                    out.bits_.push_back(bit);
                } else if (bit) {
                    throw Error(Errc::MalformedBits, "nonzero padding after bit_len");
                }
            }
        }
        return out;
    }

    void push_back(bool bit) { bits_.push_back(bit); }

    /// Appends the low `width` bits of `value`, most significant first.
    void append(std::uint64_t value, unsigned width) {
        for (unsigned i = width; i-- > 0;) {
            bits_.push_back(((value >> i) & 1U) != 0);
        }
    }

    void append(const BitString& other) {
        bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
    }

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    bool operator[](std::size_t i) const { return bits_[i]; }

    /// Reads `width` bits starting at `pos` as an unsigned integer.
    std::uint64_t value_at(std::size_t pos, unsigned width) const {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) {
            v = (v << 1) | (bits_[pos + i] ? 1U : 0U);
        }
        return v;
    }

    BitString slice(std::size_t pos, std::size_t len) const {
        BitString out;
        out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                         bits_.begin() + static_cast<std::ptrdiff_t>(pos + len));
        return out;
    }

    BitString repeated(std::size_t times) const {
        BitString out;
        out.bits_.reserve(bits_.size() * times);
        for (std::size_t i = 0; i < times; ++i) {
            out.append(*this);
        }
        return out;
    }

    /// Splits into consecutive k-bit blocks, each read as an integer symbol
    /// (so symbol order is lexicographic order of the block strings).
    std::vector<std::uint32_t> blocks(unsigned k) const {
        if (k == 0 || bits_.size() % k != 0) {
            throw Error(Errc::InvalidArgument, "length " + std::to_string(bits_.size()) +
                                                   " is not a multiple of block size " +
                                                   std::to_string(k));
        }
        std::vector<std::uint32_t> out;
        out.reserve(bits_.size() / k);
        for (std::size_t pos = 0; pos < bits_.size(); pos += k) {
            out.push_back(static_cast<std::uint32_t>(value_at(pos, k)));
        }
        return out;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (bool b : bits_) {
            s.push_back(b ? '1' : '0');
        }
        return s;
    }

    std::string to_hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s;
        const std::size_t nbytes = (bits_.size() + 7) / 8;
        s.reserve(2 * nbytes);
        for (std::size_t byte = 0; byte < nbytes; ++byte) {
            unsigned v = 0;
            for (std::size_t i = 0; i < 8; ++i) {
                const std::size_t pos = 8 * byte + i;
                v = (v << 1) | ((pos < bits_.size() && bits_[pos]) ? 1U : 0U);
            }
            s.push_back(digits[v >> 4]);
            s.push_back(digits[v & 0xF]);
        }
        return s;
    }

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    static int hex_value(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw Error(Errc::MalformedBits, std::string("invalid hex digit '") + c + "'");
    }

    std::vector<bool> bits_;
};

/// Sequential reader over a BitString.
class BitReader {
public:
    explicit BitReader(const BitString& bits) : bits_(&bits) {}

    bool at_end() const noexcept { return pos_ >= bits_->size(); }
    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bits_->size() - pos_; }

    bool read() {
        if (at_end()) {
            throw Error(Errc::MalformedBits, "unexpected end of bit string");
        }
        return (*bits_)[pos_++];
    }

    std::uint64_t read_bits(unsigned width) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) {
            v = (v << 1) | (read() ? 1U : 0U);
        }
        return v;
    }

private:
    const BitString* bits_;
    std::size_t pos_ = 0;
};

} // namespace randef
