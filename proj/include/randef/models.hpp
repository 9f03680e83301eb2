#pragma once

// Computable models over fixed-length blocks and the description-length
// predicates built on them.
//
// Conditional complexity K(x|p) is not computable, so it is replaced by the
// shortest program among a small fixed suite of self-delimiting codes, each
// prefixed by an 8-bit selector byte:
//
//   selector 0        LITERAL      Shannon-Fano code of x under p
//   selector 1        RUN_LENGTH   gamma(#runs), then per run: block (k bits), gamma(run length)
//   selector 2..255   BLOCK_REPEAT x = s^l with s of j = selector-1 blocks: s (j*k bits), gamma(l)
//
// Every reported cost is therefore an upper bound on the true conditional
// complexity up to the selector overhead.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "randef/bitstring.hpp"
#include "randef/error.hpp"
#include "randef/intcode.hpp"
#include "randef/rng.hpp"

namespace randef::models {

inline constexpr unsigned kSelectorBits = 8;
inline constexpr unsigned kMaxBlockBits = 16;
inline constexpr unsigned kMaxPrecisionBits = 62;
inline constexpr std::size_t kMaxRepeatPeriod = 254;
inline constexpr double kDefaultSlack = 16.0;

/// Probability model over k-bit blocks with dyadic probabilities
/// weight / 2^q, extended multiplicatively to strings of blocks.
class QuantizedPMF {
public:
    QuantizedPMF() = default;

    static QuantizedPMF make(unsigned block_bits, unsigned precision_bits, std::vector<std::uint64_t> weights) {
        if (block_bits < 1 || block_bits > kMaxBlockBits) {
            throw Error(Errc::InvalidArgument, "block_bits must be in [1, " + std::to_string(kMaxBlockBits) + "]");
        }
        if (precision_bits < 1 || precision_bits > kMaxPrecisionBits) {
            throw Error(Errc::InvalidArgument,
                        "precision_bits must be in [1, " + std::to_string(kMaxPrecisionBits) + "]");
        }
        if (weights.size() != (std::size_t{1} << block_bits)) {
            throw Error(Errc::InvalidArgument, "expected " + std::to_string(std::size_t{1} << block_bits) +
                                                   " weights, got " + std::to_string(weights.size()));
        }
        std::uint64_t total = 0;
        for (auto w : weights) {
            total += w;
        }
        if (total != (std::uint64_t{1} << precision_bits)) {
            throw Error(Errc::InvalidArgument, "weights sum to " + std::to_string(total) + ", expected 2^" +
                                                   std::to_string(precision_bits));
        }
        QuantizedPMF p;
        p.k_ = block_bits;
        p.q_ = precision_bits;
        p.weights_ = std::move(weights);
        return p;
    }

    static QuantizedPMF uniform(unsigned block_bits, unsigned precision_bits) {
        if (precision_bits < block_bits) {
            throw Error(Errc::InvalidArgument, "uniform model needs precision_bits >= block_bits");
        }
        return make(block_bits, precision_bits,
                    std::vector<std::uint64_t>(std::size_t{1} << block_bits,
                                               std::uint64_t{1} << (precision_bits - block_bits)));
    }

    static QuantizedPMF point_mass(unsigned block_bits, unsigned precision_bits, std::uint32_t symbol) {
        std::vector<std::uint64_t> w(std::size_t{1} << block_bits, 0);
        if (symbol >= w.size()) {
            throw Error(Errc::InvalidArgument, "symbol out of range");
        }
        w[symbol] = std::uint64_t{1} << precision_bits;
        return make(block_bits, precision_bits, std::move(w));
    }

    unsigned block_bits() const noexcept { return k_; }
    unsigned precision_bits() const noexcept { return q_; }
    std::span<const std::uint64_t> weights() const noexcept { return weights_; }
    std::size_t symbol_count() const noexcept { return weights_.size(); }

    double probability(std::uint32_t symbol) const {
        return std::ldexp(static_cast<double>(weights_.at(symbol)), -static_cast<int>(q_));
    }

    /// -log2 p(symbol). Exact whenever the weight is a power of two.
    double symbol_bits(std::uint32_t symbol) const {
        const std::uint64_t w = weights_.at(symbol);
        if (w == 0) {
            throw Error(Errc::ZeroProbabilityBlock, "block " + std::to_string(symbol) + " has probability 0");
        }
        if (std::has_single_bit(w)) {
            return static_cast<double>(q_) - static_cast<double>(std::bit_width(w) - 1);
        }
        return static_cast<double>(q_) - std::log2(static_cast<double>(w));
    }

    std::size_t support_size() const noexcept {
        return static_cast<std::size_t>(std::count_if(weights_.begin(), weights_.end(), [](auto w) { return w > 0; }));
    }

    friend bool operator==(const QuantizedPMF&, const QuantizedPMF&) = default;

private:
    unsigned k_ = 1;
    unsigned q_ = 1;
    std::vector<std::uint64_t> weights_{1, 1};
};

/// A model together with its self-description length |p*|:
/// gamma(k) + gamma(q) + (2^k - 1) * q bits (the last weight is implied).
struct ModelDescription {
    QuantizedPMF model;
    double description_bits = 0.0;

    static double length_for(unsigned block_bits, unsigned precision_bits) {
        return intcode::gamma_length(block_bits) + intcode::gamma_length(precision_bits) +
               static_cast<double>((std::uint64_t{1} << block_bits) - 1) * precision_bits;
    }

    static ModelDescription describe(QuantizedPMF p) {
        const double bits = length_for(p.block_bits(), p.precision_bits());
        return ModelDescription{std::move(p), bits};
    }

    friend bool operator==(const ModelDescription&, const ModelDescription&) = default;
};

struct SurpriseThreshold {
    double bits;

    explicit SurpriseThreshold(double alpha) : bits(alpha) {
        if (!(alpha > 0.0)) {
            throw Error(Errc::InvalidArgument, "surprise threshold must be > 0");
        }
    }
};

enum class PatternCode { Literal, RunLength, BlockRepeat };

constexpr std::string_view to_string(PatternCode c) {
    switch (c) {
        case PatternCode::Literal: return "LITERAL";
        case PatternCode::RunLength: return "RUN_LENGTH";
        case PatternCode::BlockRepeat: return "BLOCK_REPEAT";
    }
    return "?";
}

struct ConditionalCostReport {
    std::string string_id;
    double shannon_fano_bits = 0.0;
    double best_pattern_bits = 0.0;
    PatternCode winning_code = PatternCode::Literal;

    double literal_bits = 0.0;
    double run_length_bits = 0.0;
    // +inf when x is not an exact repetition of at most kMaxRepeatPeriod blocks.
    double block_repeat_bits = std::numeric_limits<double>::infinity();
    std::size_t repeat_period_blocks = 0;
    std::size_t repeat_count = 0;
};

/// Draws `n_blocks` independent blocks from p by inverse CDF on q random bits.
inline BitString sample(const QuantizedPMF& p, std::size_t n_blocks, Rng& rng) {
    BitString x;
    const auto w = p.weights();
    for (std::size_t i = 0; i < n_blocks; ++i) {
        const std::uint64_t u = rng.bits(p.precision_bits());
        std::uint64_t acc = 0;
        std::uint32_t s = 0;
        while (s + 1 < w.size() && u >= acc + w[s]) {
            acc += w[s];
            ++s;
        }
        x.append(s, p.block_bits());
    }
    return x;
}

// --- block statistics -------------------------------------------------------

/// Model-independent facts about a string cut into k-bit blocks. Everything
/// the predicates need apart from the model's own Shannon-Fano length.
struct BlockProfile {
    unsigned k = 1;
    std::vector<std::uint32_t> blocks;
    std::vector<std::uint64_t> counts;  // per symbol, 2^k entries
    double run_length_bits = 0.0;
    double block_repeat_bits = std::numeric_limits<double>::infinity();
    std::size_t repeat_period_blocks = 0;
    std::size_t repeat_count = 0;

    std::size_t n_blocks() const noexcept { return blocks.size(); }
};

namespace detail {

inline std::string string_id(const BitString& x) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i = 0; i < x.size(); ++i) {
        h = (h ^ (x[i] ? 0x31U : 0x30U)) * 1099511628211ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string id = "n" + std::to_string(x.size()) + ":";
    for (int shift = 60; shift >= 0; shift -= 4) {
        id.push_back(digits[(h >> shift) & 0xF]);
    }
    return id;
}

inline void check_string(const BitString& x, unsigned k) {
    if (x.empty()) {
        throw Error(Errc::EmptyString, "event string is empty");
    }
    if (x.size() % k != 0) {
        throw Error(Errc::InvalidArgument, "event string length " + std::to_string(x.size()) +
                                               " is not a multiple of block size " + std::to_string(k));
    }
}

inline double log2_factorial(std::uint64_t n) { return std::lgamma(static_cast<double>(n) + 1.0) / std::numbers::ln2; }

} // namespace detail

inline BlockProfile profile(const BitString& x, unsigned k) {
    detail::check_string(x, k);
    BlockProfile prof;
    prof.k = k;
    prof.blocks = x.blocks(k);
    prof.counts.assign(std::size_t{1} << k, 0);
    for (auto b : prof.blocks) {
        ++prof.counts[b];
    }

    const auto& blocks = prof.blocks;
    const std::size_t n = blocks.size();

    std::uint64_t runs = 0;
    double rle = kSelectorBits;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && blocks[j] == blocks[i]) {
            ++j;
        }
        rle += k + intcode::gamma_length(j - i);
        ++runs;
        i = j;
    }
    prof.run_length_bits = rle + intcode::gamma_length(runs);

    for (std::size_t period = 1; period <= std::min(n, kMaxRepeatPeriod); ++period) {
        if (n % period != 0) {
            continue;
        }
        bool periodic = true;
        for (std::size_t i = period; i < n && periodic; ++i) {
            periodic = blocks[i] == blocks[i - period];
        }
        if (!periodic) {
            continue;
        }
        const double cost = kSelectorBits + static_cast<double>(period * k) + intcode::gamma_length(n / period);
        if (cost < prof.block_repeat_bits) {
            prof.block_repeat_bits = cost;
            prof.repeat_period_blocks = period;
            prof.repeat_count = n / period;
        }
    }
    return prof;
}

/// -log2 p(x) given block counts, summed in symbol order.
inline double shannon_fano_bits(const QuantizedPMF& p, std::span<const std::uint64_t> counts) {
    double bits = 0.0;
    for (std::uint32_t s = 0; s < counts.size(); ++s) {
        if (counts[s] != 0) {
            bits += static_cast<double>(counts[s]) * p.symbol_bits(s);
        }
    }
    return bits;
}

inline double shannon_fano_bits(const QuantizedPMF& p, const BitString& x) {
    detail::check_string(x, p.block_bits());
    std::vector<std::uint64_t> counts(p.symbol_count(), 0);
    for (auto b : x.blocks(p.block_bits())) {
        ++counts[b];
    }
    return shannon_fano_bits(p, counts);
}

inline ConditionalCostReport conditional_cost(const QuantizedPMF& p, const BitString& x) {
    const BlockProfile prof = profile(x, p.block_bits());
    ConditionalCostReport r;
    r.string_id = detail::string_id(x);
    r.shannon_fano_bits = shannon_fano_bits(p, prof.counts);
    r.literal_bits = r.shannon_fano_bits + kSelectorBits;
    r.run_length_bits = prof.run_length_bits;
    r.block_repeat_bits = prof.block_repeat_bits;
    r.repeat_period_blocks = prof.repeat_period_blocks;
    r.repeat_count = prof.repeat_count;

    r.best_pattern_bits = r.literal_bits;
    r.winning_code = PatternCode::Literal;
    if (r.run_length_bits < r.best_pattern_bits) {
        r.best_pattern_bits = r.run_length_bits;
        r.winning_code = PatternCode::RunLength;
    }
    if (r.block_repeat_bits < r.best_pattern_bits) {
        r.best_pattern_bits = r.block_repeat_bits;
        r.winning_code = PatternCode::BlockRepeat;
    }
    return r;
}

/// (p, alpha)-typical: best program length >= -log2 p(x) - alpha. The cost is
/// an upper bound on K(x|p), so `false` is a sound surprise verdict while
/// `true` is conservative.
inline bool is_typical(const QuantizedPMF& p, const BitString& x, SurpriseThreshold alpha) {
    const auto r = conditional_cost(p, x);
    return r.best_pattern_bits >= r.shannon_fano_bits - alpha.bits;
}

inline bool is_surprising(const QuantizedPMF& p, const BitString& x, SurpriseThreshold alpha) {
    return !is_typical(p, x, alpha);
}

// --- standalone description -------------------------------------------------

struct StandaloneCost {
    double uniform_pattern_bits = 0.0;  // best program under the uniform block model
    double enumerative_bits = 0.0;      // selector + block counts + index among arrangements
    double best_bits = 0.0;
};

/// Stand-in for the unconditional K(x): the better of the program suite under
/// the uniform k-block model and an enumerative code (each of the 2^k - 1
/// free block counts in log2(n+1) bits, then the index of x among all strings
/// with those counts).
inline StandaloneCost standalone_cost(const BlockProfile& prof) {
    StandaloneCost c;
    const double n = static_cast<double>(prof.n_blocks());
    const double uniform_literal = n * prof.k + kSelectorBits;
    c.uniform_pattern_bits = std::min({uniform_literal, prof.run_length_bits, prof.block_repeat_bits});

    double index_bits = detail::log2_factorial(prof.n_blocks());
    for (auto count : prof.counts) {
        index_bits -= detail::log2_factorial(count);
    }
    index_bits = std::max(index_bits, 0.0);
    c.enumerative_bits =
        kSelectorBits + static_cast<double>(prof.counts.size() - 1) * std::log2(n + 1.0) + index_bits;
    c.best_bits = std::min(c.uniform_pattern_bits, c.enumerative_bits);
    return c;
}

inline StandaloneCost standalone_cost(const BitString& x, unsigned k) { return standalone_cost(profile(x, k)); }

/// Two-part code length |p*| + (-log2 p(x)).
inline double two_part_bits(const ModelDescription& p, const BitString& x) {
    return p.description_bits + shannon_fano_bits(p.model, x);
}

/// p is optimal for x when the two-part code matches the standalone
/// description to within `slack_bits`.
inline bool is_optimal(const ModelDescription& p, const BitString& x, double slack_bits = kDefaultSlack) {
    const double standalone = standalone_cost(x, p.model.block_bits()).best_bits;
    return std::abs(standalone - two_part_bits(p, x)) <= slack_bits;
}

// --- model updates ----------------------------------------------------------

namespace detail {

inline void check_compatible(const ModelDescription& a, const ModelDescription& b) {
    if (a.model.block_bits() != b.model.block_bits() || a.model.precision_bits() != b.model.precision_bits()) {
        throw Error(Errc::IncompatibleModels,
                    "models differ in block_bits or precision_bits (k=" + std::to_string(a.model.block_bits()) +
                        "/" + std::to_string(b.model.block_bits()) + ", q=" +
                        std::to_string(a.model.precision_bits()) + "/" + std::to_string(b.model.precision_bits()) +
                        ")");
    }
}

} // namespace detail

/// Length of the delta program turning `from` into `to`: selector byte, then
/// per symbol the signed change of its weight ("0" when unchanged).
inline double model_update_cost(const ModelDescription& from, const ModelDescription& to) {
    detail::check_compatible(from, to);
    double bits = kSelectorBits;
    const auto a = from.model.weights();
    const auto b = to.model.weights();
    for (std::size_t s = 0; s < a.size(); ++s) {
        bits += intcode::signed_length(static_cast<std::int64_t>(b[s]) - static_cast<std::int64_t>(a[s]));
    }
    return bits;
}

inline BitString write_model_update(const ModelDescription& from, const ModelDescription& to) {
    detail::check_compatible(from, to);
    BitString out;
    out.append(0, kSelectorBits);
    const auto a = from.model.weights();
    const auto b = to.model.weights();
    for (std::size_t s = 0; s < a.size(); ++s) {
        intcode::write_signed(out, static_cast<std::int64_t>(b[s]) - static_cast<std::int64_t>(a[s]));
    }
    return out;
}

inline ModelDescription apply_model_update(const ModelDescription& from, const BitString& program) {
    BitReader in(program);
    in.read_bits(kSelectorBits);
    std::vector<std::uint64_t> w(from.model.weights().begin(), from.model.weights().end());
    for (auto& weight : w) {
        const std::int64_t next = static_cast<std::int64_t>(weight) + intcode::read_signed(in);
        if (next < 0) {
            throw Error(Errc::MalformedBits, "update drives a weight negative");
        }
        weight = static_cast<std::uint64_t>(next);
    }
    if (!in.at_end()) {
        throw Error(Errc::MalformedBits, "trailing bits in model update");
    }
    return ModelDescription::describe(
        QuantizedPMF::make(from.model.block_bits(), from.model.precision_bits(), std::move(w)));
}

inline double subjective_probability(double update_cost_bits) {
    if (!(update_cost_bits >= 0.0)) {
        throw Error(Errc::NegativeCost, "update cost must be >= 0");
    }
    return std::exp2(-update_cost_bits);
}

// --- pattern programs -------------------------------------------------------

/// Materializes the RUN_LENGTH or BLOCK_REPEAT program for x. Its length
/// equals the cost reported by conditional_cost for that code.
inline BitString write_pattern_program(PatternCode code, const BitString& x, unsigned k) {
    const BlockProfile prof = profile(x, k);
    BitString out;
    if (code == PatternCode::RunLength) {
        out.append(1, kSelectorBits);
        std::vector<std::pair<std::uint32_t, std::uint64_t>> runs;
        for (auto b : prof.blocks) {
            if (!runs.empty() && runs.back().first == b) {
                ++runs.back().second;
            } else {
                runs.emplace_back(b, 1);
            }
        }
        intcode::write_gamma(out, runs.size());
        for (auto [block, len] : runs) {
            out.append(block, k);
            intcode::write_gamma(out, len);
        }
        return out;
    }
    if (code == PatternCode::BlockRepeat) {
        if (prof.repeat_period_blocks == 0) {
            throw Error(Errc::InvalidArgument, "string is not a repetition of at most " +
                                                   std::to_string(kMaxRepeatPeriod) + " blocks");
        }
        out.append(prof.repeat_period_blocks + 1, kSelectorBits);
        for (std::size_t i = 0; i < prof.repeat_period_blocks; ++i) {
            out.append(prof.blocks[i], k);
        }
        intcode::write_gamma(out, prof.repeat_count);
        return out;
    }
    throw Error(Errc::InvalidArgument, "LITERAL programs are entropy-coded and not materialized");
}

inline BitString run_pattern_program(const BitString& program, unsigned k) {
    BitReader in(program);
    const auto selector = in.read_bits(kSelectorBits);
    BitString out;
    if (selector == 1) {
        const auto runs = intcode::read_gamma(in);
        for (std::uint64_t r = 0; r < runs; ++r) {
            const auto block = in.read_bits(k);
            const auto len = intcode::read_gamma(in);
            for (std::uint64_t i = 0; i < len; ++i) {
                out.append(block, k);
            }
        }
    } else if (selector >= 2) {
        const auto period = selector - 1;
        BitString unit;
        for (std::uint64_t i = 0; i < period; ++i) {
            unit.append(in.read_bits(k), k);
        }
        out = unit.repeated(intcode::read_gamma(in));
    } else {
        throw Error(Errc::InvalidArgument, "LITERAL programs are not executable here");
    }
    if (!in.at_end()) {
        throw Error(Errc::MalformedBits, "trailing bits in pattern program");
    }
    return out;
}

} // namespace randef::models
