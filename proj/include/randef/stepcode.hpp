#pragma once

// Step-size Huffman code for ordered number draws.
//
// A draw such as 10,32,33,35,39,45 becomes the step vector +10,+22,+1,+2,+4,+6
// (the first number is the first step). Each step is emitted as a codeword of
// a fixed complete prefix code; a step equal to its predecessor is always
// emitted as the REPEAT symbol instead. Codeword lengths:
//
//   depth 2: +1, REPEAT      depth 5: +5      depth 8: +9 .. +40
//   depth 3: +2, +3          depth 6: +6
//   depth 4: +4              depth 7: +7, +8
//
// Bit patterns are canonical: within each depth, leaves take the smallest
// free codewords in the order listed above.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "randef/bitstring.hpp"
#include "randef/error.hpp"

namespace randef::stepcode {

inline constexpr int kMaxStep = 40;
inline constexpr std::size_t kSymbolCount = kMaxStep + 1;

struct CodecParams {
    int pool_size = 45;
    int draw_count = 6;

    void validate() const {
        if (draw_count < 1 || pool_size < draw_count) {
            throw Error(Errc::InvalidArgument,
                        "codec params need 1 <= draw_count <= pool_size, got pool_size=" +
                            std::to_string(pool_size) + " draw_count=" + std::to_string(draw_count));
        }
    }
};

/// A code symbol: value 0 is REPEAT, 1..40 are literal steps.
struct Symbol {
    int value = 0;

    static constexpr Symbol repeat() { return Symbol{0}; }
    static constexpr Symbol step(int v) { return Symbol{v}; }

    constexpr bool is_repeat() const { return value == 0; }

    std::string name() const { return is_repeat() ? "REPEAT" : "+" + std::to_string(value); }

    friend constexpr auto operator<=>(Symbol, Symbol) = default;
};

struct Codeword {
    std::uint32_t bits = 0;
    unsigned length = 0;

    std::string to_string() const {
        std::string s(length, '0');
        for (unsigned i = 0; i < length; ++i) {
            if ((bits >> (length - 1 - i)) & 1U) {
                s[i] = '1';
            }
        }
        return s;
    }

    friend constexpr bool operator==(Codeword, Codeword) = default;
};

class Codebook {
public:
    static constexpr unsigned kMaxLength = 8;

    constexpr const Codeword& codeword(Symbol s) const { return words_[index(s)]; }
    constexpr unsigned length(Symbol s) const { return words_[index(s)].length; }

    /// Symbols in canonical order (by depth, then by listing order).
    constexpr std::span<const Symbol> symbols() const { return order_; }

    /// Sum of 2^(kMaxLength - length) over all codewords; the code is
    /// complete iff this equals 2^kMaxLength.
    constexpr std::uint64_t kraft_numerator() const {
        std::uint64_t total = 0;
        for (const auto& w : words_) {
            total += std::uint64_t{1} << (kMaxLength - w.length);
        }
        return total;
    }

    constexpr double kraft_sum() const {
        return static_cast<double>(kraft_numerator()) / static_cast<double>(1U << kMaxLength);
    }

    /// Reads one codeword using `next_bit()` as the bit source.
    template <class NextBit>
    constexpr Symbol decode_one(NextBit&& next_bit) const {
        std::uint32_t code = 0;
        for (unsigned len = 1; len <= kMaxLength; ++len) {
            code = (code << 1) | (next_bit() ? 1U : 0U);
            if (count_[len] != 0 && code >= first_code_[len] && code - first_code_[len] < count_[len]) {
                return order_[first_index_[len] + (code - first_code_[len])];
            }
        }
        // Unreachable for a complete code.
        throw Error(Errc::MalformedBits, "no codeword matches");
    }

    friend constexpr Codebook build_codebook();

private:
    static constexpr std::size_t index(Symbol s) {
        if (s.value < 0 || s.value > kMaxStep) {
            throw Error(Errc::InvalidSequence, "step +" + std::to_string(s.value) + " has no codeword");
        }
        return static_cast<std::size_t>(s.value);
    }

    std::array<Codeword, kSymbolCount> words_{};
    std::array<Symbol, kSymbolCount> order_{};
    std::array<std::uint32_t, kMaxLength + 1> first_code_{};
    std::array<std::uint32_t, kMaxLength + 1> count_{};
    std::array<std::uint32_t, kMaxLength + 1> first_index_{};
};

constexpr unsigned table_length(Symbol s) {
    switch (s.value) {
        case 0:
        case 1: return 2;
        case 2:
        case 3: return 3;
        case 4: return 4;
        case 5: return 5;
        case 6: return 6;
        case 7:
        case 8: return 7;
        default: return 8;
    }
}

constexpr Codebook build_codebook() {
    Codebook book;
    std::size_t n = 0;
    book.order_[n++] = Symbol::step(1);
    book.order_[n++] = Symbol::repeat();
    for (int v = 2; v <= kMaxStep; ++v) {
        book.order_[n++] = Symbol::step(v);
    }

    std::uint32_t code = 0;
    unsigned prev_len = table_length(book.order_[0]);
    for (std::size_t i = 0; i < n; ++i) {
        const Symbol s = book.order_[i];
        const unsigned len = table_length(s);
        code <<= (len - prev_len);
        prev_len = len;
        if (book.count_[len] == 0) {
            book.first_code_[len] = code;
            book.first_index_[len] = static_cast<std::uint32_t>(i);
        }
        ++book.count_[len];
        book.words_[Codebook::index(s)] = Codeword{code, len};
        ++code;
    }
    return book;
}

inline constexpr Codebook kCodebook = build_codebook();

// --- sequences --------------------------------------------------------------

/// Strictly increasing draw of `draw_count` numbers from [1, pool_size].
class LotterySequence {
public:
    LotterySequence() = default;

    /// Validates an already ordered sequence.
    static LotterySequence make(std::vector<int> numbers, const CodecParams& params = {}) {
        params.validate();
        if (static_cast<int>(numbers.size()) != params.draw_count) {
            throw Error(Errc::InvalidSequence, "expected " + std::to_string(params.draw_count) +
                                                   " numbers, got " + std::to_string(numbers.size()));
        }
        for (std::size_t i = 0; i < numbers.size(); ++i) {
            if (numbers[i] < 1 || numbers[i] > params.pool_size) {
                throw Error(Errc::InvalidSequence, "number " + std::to_string(numbers[i]) +
                                                       " outside [1, " + std::to_string(params.pool_size) + "]");
            }
            if (i > 0 && numbers[i] <= numbers[i - 1]) {
                throw Error(Errc::InvalidSequence, "sequence is not strictly increasing");
            }
        }
        LotterySequence seq;
        seq.numbers_ = std::move(numbers);
        return seq;
    }

    /// Accepts numbers in any order and sorts them, as lotteries publish
    /// numbers in draw order.
    static LotterySequence normalized(std::vector<int> numbers, const CodecParams& params = {}) {
        params.validate();
        std::sort(numbers.begin(), numbers.end());
        for (int v : numbers) {
            if (v < 1 || v > params.pool_size) {
                throw Error(Errc::OutOfRange,
                            std::to_string(v) + " outside [1, " + std::to_string(params.pool_size) + "]");
            }
        }
        if (std::adjacent_find(numbers.begin(), numbers.end()) != numbers.end()) {
            throw Error(Errc::DuplicateNumberInDraw, "number " +
                                                         std::to_string(*std::adjacent_find(numbers.begin(), numbers.end())) +
                                                         " appears twice");
        }
        return make(std::move(numbers), params);
    }

    /// Parses "45,1,10,32,39,33" (commas and/or whitespace) and normalizes.
    static LotterySequence parse(std::string_view text, const CodecParams& params = {}) {
        std::vector<int> numbers;
        std::string token;
        auto flush = [&] {
            if (token.empty()) {
                return;
            }
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size()) {
                throw Error(Errc::ParseError, "not an integer: '" + token + "'");
            }
            numbers.push_back(v);
            token.clear();
        };
        for (char c : text) {
            if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                flush();
            } else {
                token.push_back(c);
            }
        }
        flush();
        return normalized(std::move(numbers), params);
    }

    std::span<const int> numbers() const noexcept { return numbers_; }
    std::size_t size() const noexcept { return numbers_.size(); }
    int operator[](std::size_t i) const { return numbers_[i]; }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < numbers_.size(); ++i) {
            if (i > 0) {
                s += ',';
            }
            s += std::to_string(numbers_[i]);
        }
        return s;
    }

    friend auto operator<=>(const LotterySequence&, const LotterySequence&) = default;
    friend bool operator==(const LotterySequence&, const LotterySequence&) = default;

private:
    std::vector<int> numbers_;
};

struct StepVector {
    std::vector<int> steps;

    friend bool operator==(const StepVector&, const StepVector&) = default;
};

namespace detail {

inline void check_sequence(std::span<const int> numbers, const CodecParams& params) {
    params.validate();
    if (static_cast<int>(numbers.size()) != params.draw_count) {
        throw Error(Errc::InvalidSequence, "expected " + std::to_string(params.draw_count) + " numbers");
    }
    int prev = 0;
    for (int v : numbers) {
        if (v <= prev || v > params.pool_size) {
            throw Error(Errc::InvalidSequence, "numbers must be strictly increasing within [1, " +
                                                   std::to_string(params.pool_size) + "]");
        }
        prev = v;
    }
}

} // namespace detail

inline StepVector to_steps(std::span<const int> numbers, const CodecParams& params = {}) {
    detail::check_sequence(numbers, params);
    StepVector out;
    out.steps.reserve(numbers.size());
    int prev = 0;
    for (int v : numbers) {
        out.steps.push_back(v - prev);
        prev = v;
    }
    return out;
}

inline StepVector to_steps(const LotterySequence& seq, const CodecParams& params = {}) {
    return to_steps(seq.numbers(), params);
}

/// Code symbols for a step vector: a step equal to the previous one becomes
/// REPEAT; the first step is always literal.
inline std::vector<Symbol> to_symbols(const StepVector& steps) {
    std::vector<Symbol> out;
    out.reserve(steps.steps.size());
    for (std::size_t i = 0; i < steps.steps.size(); ++i) {
        const int step = steps.steps[i];
        if (i > 0 && step == steps.steps[i - 1]) {
            out.push_back(Symbol::repeat());
        } else if (step >= 1 && step <= kMaxStep) {
            out.push_back(Symbol::step(step));
        } else {
            throw Error(Errc::InvalidSequence, "step +" + std::to_string(step) + " exceeds the largest codeword +" +
                                                   std::to_string(kMaxStep));
        }
    }
    return out;
}

inline BitString encode(std::span<const int> numbers, const CodecParams& params = {}) {
    BitString out;
    for (Symbol s : to_symbols(to_steps(numbers, params))) {
        const Codeword& w = kCodebook.codeword(s);
        out.append(w.bits, w.length);
    }
    return out;
}

inline BitString encode(const LotterySequence& seq, const CodecParams& params = {}) {
    return encode(seq.numbers(), params);
}

/// Encoded length in bits without materializing the bit string. This is the
/// hot path for exhaustive enumeration.
inline int compressed_length(std::span<const int> numbers, const CodecParams& params = {}) {
    detail::check_sequence(numbers, params);
    int total = 0;
    int prev = 0;
    int prev_step = -1;
    for (int v : numbers) {
        const int step = v - prev;
        if (step == prev_step) {
            total += static_cast<int>(kCodebook.length(Symbol::repeat()));
        } else if (step > kMaxStep) {
            throw Error(Errc::InvalidSequence, "step +" + std::to_string(step) + " exceeds +" +
                                                   std::to_string(kMaxStep));
        } else {
            total += static_cast<int>(kCodebook.length(Symbol::step(step)));
        }
        prev_step = step;
        prev = v;
    }
    return total;
}

inline int compressed_length(const LotterySequence& seq, const CodecParams& params = {}) {
    return compressed_length(seq.numbers(), params);
}

inline LotterySequence decode(const BitString& bits, const CodecParams& params = {}) {
    params.validate();
    BitReader reader(bits);
    std::vector<int> numbers;
    numbers.reserve(static_cast<std::size_t>(params.draw_count));
    int prev_step = 0;
    int sum = 0;
    for (int i = 0; i < params.draw_count; ++i) {
        if (reader.at_end()) {
            throw Error(Errc::InvalidDecode, "bit string holds " + std::to_string(i) + " symbols, expected " +
                                                 std::to_string(params.draw_count));
        }
        const Symbol s = kCodebook.decode_one([&] { return reader.read(); });
        int step = s.value;
        if (s.is_repeat()) {
            if (i == 0) {
                throw Error(Errc::InvalidDecode, "REPEAT cannot be the first symbol");
            }
            step = prev_step;
        } else if (i > 0 && step == prev_step) {
            throw Error(Errc::InvalidDecode, "literal step equal to its predecessor must be coded as REPEAT");
        }
        sum += step;
        if (sum > params.pool_size) {
            throw Error(Errc::InvalidDecode, "steps sum past pool size " + std::to_string(params.pool_size));
        }
        numbers.push_back(sum);
        prev_step = step;
    }
    if (!reader.at_end()) {
        throw Error(Errc::InvalidDecode, std::to_string(reader.remaining()) + " trailing bits after " +
                                             std::to_string(params.draw_count) + " symbols");
    }
    return LotterySequence::make(std::move(numbers), params);
}

/// C(n, k) when it fits in 64 bits.
inline std::optional<std::uint64_t> binomial(int n, int k) {
    if (k < 0 || n < k) {
        return 0;
    }
    k = std::min(k, n - k);
    unsigned __int128 result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (result > UINT64_MAX) {
            return std::nullopt;
        }
    }
    return static_cast<std::uint64_t>(result);
}

/// Bits needed to index one unordered draw uniformly: log2 C(pool, draw).
inline double baseline_bits(const CodecParams& params = {}) {
    params.validate();
    if (auto exact = binomial(params.pool_size, params.draw_count)) {
        return std::log2(static_cast<double>(*exact));
    }
    double bits = 0.0;
    for (int i = 1; i <= params.draw_count; ++i) {
        bits += std::log2(static_cast<double>(params.pool_size - params.draw_count + i) / i);
    }
    return bits;
}

/// baseline_bits - compressed_length. Positive means the draw compresses
/// below an ideal uniform index; negative is code overhead.
inline double deficiency(std::span<const int> numbers, const CodecParams& params = {}) {
    return baseline_bits(params) - compressed_length(numbers, params);
}

inline double deficiency(const LotterySequence& seq, const CodecParams& params = {}) {
    return deficiency(seq.numbers(), params);
}

} // namespace randef::stepcode
