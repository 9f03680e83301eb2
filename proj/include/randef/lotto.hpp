#pragma once

// Draw corpora, the exhaustive enumeration oracle, band-limited distractors
// and rank statistics.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "randef/error.hpp"
#include "randef/rng.hpp"
#include "randef/stepcode.hpp"

namespace randef::lotto {

using stepcode::CodecParams;
using stepcode::LotterySequence;

inline constexpr std::uint64_t kDefaultBudget = 100'000'000;

struct Draw {
    std::string date;
    LotterySequence sequence;
};

struct DrawCorpus {
    std::vector<Draw> draws;
};

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == sep) {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

inline std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

} // namespace detail

/// CSV with header `date,n1,...,nK`. Numbers may appear in draw order; each
/// row is sorted before validation. Errors name the 1-based file line.
inline DrawCorpus load_corpus(std::istream& in, const CodecParams& params = {}) {
    params.validate();
    std::string expected = "date";
    for (int i = 1; i <= params.draw_count; ++i) {
        expected += ",n" + std::to_string(i);
    }

    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    DrawCorpus corpus;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        if (!have_header) {
            std::string header;
            for (char c : line) {
                if (!std::isspace(static_cast<unsigned char>(c))) {
                    header.push_back(c);
                }
            }
            if (header != expected) {
                throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected header '" + expected + "'");
            }
            have_header = true;
            continue;
        }
        const auto fields = detail::split(line, ',');
        if (fields.size() != static_cast<std::size_t>(params.draw_count) + 1) {
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(params.draw_count + 1) + " fields, got " +
                                              std::to_string(fields.size()));
        }
        std::vector<int> numbers;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            const std::string f = detail::trim(fields[i]);
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(f, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (f.empty() || used != f.size()) {
                throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": not an integer: '" + f + "'");
            }
            numbers.push_back(v);
        }
        try {
            corpus.draws.push_back({detail::trim(fields[0]), LotterySequence::normalized(std::move(numbers), params)});
        } catch (const Error& e) {
            throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.detail());
        }
    }
    if (!have_header) {
        throw Error(Errc::ParseError, "missing header '" + expected + "'");
    }
    return corpus;
}

inline DrawCorpus load_corpus(const std::string& path, const CodecParams& params = {}) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::ParseError, "cannot open " + path);
    }
    return load_corpus(in, params);
}

/// Bit-length histogram with the usual summaries. Used both for corpora and
/// for the full sequence space.
struct LengthStats {
    std::uint64_t count = 0;
    double mean_bits = 0.0;
    int mode_bits = 0;  // smallest length on ties
    int min_bits = 0;
    int max_bits = 0;
    LotterySequence argmin_seq;  // lexicographically first at min_bits
    LotterySequence argmax_seq;  // lexicographically first at max_bits
    std::map<int, std::uint64_t> histogram;
};

using CorpusStats = LengthStats;

namespace detail {

// Accumulates lengths; the argmin/argmax candidates are resolved
// lexicographically so that merge order never matters.
struct Accumulator {
    std::map<int, std::uint64_t> histogram;
    std::uint64_t total_bits = 0;
    std::uint64_t count = 0;
    std::vector<int> argmin;
    std::vector<int> argmax;
    int min_bits = 0;
    int max_bits = 0;

    void add(std::span<const int> numbers, int bits) {
        ++histogram[bits];
        total_bits += static_cast<std::uint64_t>(bits);
        auto before = [&](const std::vector<int>& current) {
            return std::lexicographical_compare(numbers.begin(), numbers.end(), current.begin(), current.end());
        };
        if (count == 0 || bits < min_bits || (bits == min_bits && before(argmin))) {
            min_bits = bits;
            argmin.assign(numbers.begin(), numbers.end());
        }
        if (count == 0 || bits > max_bits || (bits == max_bits && before(argmax))) {
            max_bits = bits;
            argmax.assign(numbers.begin(), numbers.end());
        }
        ++count;
    }

    void merge(const Accumulator& o) {
        if (o.count == 0) {
            return;
        }
        for (const auto& [bits, n] : o.histogram) {
            histogram[bits] += n;
        }
        total_bits += o.total_bits;
        if (count == 0 || o.min_bits < min_bits || (o.min_bits == min_bits && o.argmin < argmin)) {
            min_bits = o.min_bits;
            argmin = o.argmin;
        }
        if (count == 0 || o.max_bits > max_bits || (o.max_bits == max_bits && o.argmax < argmax)) {
            max_bits = o.max_bits;
            argmax = o.argmax;
        }
        count += o.count;
    }

    LengthStats finish(const CodecParams& params) const {
        LengthStats s;
        s.count = count;
        s.histogram = histogram;
        s.mean_bits = static_cast<double>(total_bits) / static_cast<double>(count);
        s.min_bits = min_bits;
        s.max_bits = max_bits;
        s.argmin_seq = LotterySequence::make(argmin, params);
        s.argmax_seq = LotterySequence::make(argmax, params);
        std::uint64_t best = 0;
        for (const auto& [bits, n] : histogram) {
            if (n > best) {
                best = n;
                s.mode_bits = bits;
            }
        }
        return s;
    }
};

} // namespace detail

inline CorpusStats corpus_stats(const DrawCorpus& corpus, const CodecParams& params = {}) {
    if (corpus.draws.empty()) {
        throw Error(Errc::EmptyCorpus, "corpus has no draws");
    }
    detail::Accumulator acc;
    for (const auto& d : corpus.draws) {
        acc.add(d.sequence.numbers(), stepcode::compressed_length(d.sequence, params));
    }
    return acc.finish(params);
}

// --- exhaustive enumeration -------------------------------------------------

namespace detail {

inline void check_enumerable(const CodecParams& params, std::uint64_t budget) {
    params.validate();
    if (params.pool_size - params.draw_count + 1 > stepcode::kMaxStep) {
        throw Error(Errc::InvalidArgument, "pool_size - draw_count + 1 exceeds the largest step +" +
                                               std::to_string(stepcode::kMaxStep) + "; some draws have no code");
    }
    const auto total = stepcode::binomial(params.pool_size, params.draw_count);
    if (!total || *total > budget) {
        throw Error(Errc::BudgetExceeded, "C(" + std::to_string(params.pool_size) + ", " +
                                              std::to_string(params.draw_count) + ") exceeds budget " +
                                              std::to_string(budget));
    }
}

// Lexicographic walk over every draw whose first number is `first`.
template <class Visit>
void walk_from(const CodecParams& params, int first, Visit& visit) {
    const int k = params.draw_count;
    const int n = params.pool_size;
    std::vector<int> a(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        a[static_cast<std::size_t>(i)] = first + i;
    }
    while (true) {
        visit(std::span<const int>(a));
        int i = k - 1;
        while (i >= 1 && a[static_cast<std::size_t>(i)] == n - k + 1 + i) {
            --i;
        }
        if (i < 1) {
            return;
        }
        ++a[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) {
            a[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
}

} // namespace detail

/// Visits every valid draw exactly once, in lexicographic order, with its
/// encoded length. Returns the length statistics of the whole space.
inline LengthStats enumerate_all(const CodecParams& params,
                                 const std::function<void(std::span<const int>, int)>& visitor,
                                 std::uint64_t budget = kDefaultBudget) {
    detail::check_enumerable(params, budget);
    detail::Accumulator acc;
    auto visit = [&](std::span<const int> numbers) {
        const int bits = stepcode::compressed_length(numbers, params);
        acc.add(numbers, bits);
        if (visitor) {
            visitor(numbers, bits);
        }
    };
    for (int first = 1; first <= params.pool_size - params.draw_count + 1; ++first) {
        detail::walk_from(params, first, visit);
    }
    return acc.finish(params);
}

/// Same statistics as enumerate_all without a visitor, split by first number
/// across `threads` workers. Output does not depend on the thread count.
inline LengthStats enumerate_stats(const CodecParams& params, std::uint64_t budget = kDefaultBudget,
                                   unsigned threads = 0) {
    detail::check_enumerable(params, budget);
    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    const int firsts = params.pool_size - params.draw_count + 1;
    threads = std::min<unsigned>(threads, static_cast<unsigned>(firsts));

    std::vector<detail::Accumulator> parts(threads);
    auto work = [&](unsigned t) {
        auto visit = [&](std::span<const int> numbers) {
            parts[t].add(numbers, stepcode::compressed_length(numbers, params));
        };
        for (int first = 1 + static_cast<int>(t); first <= firsts; first += static_cast<int>(threads)) {
            detail::walk_from(params, first, visit);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(work, t);
        }
    }
    detail::Accumulator all;
    for (const auto& p : parts) {
        all.merge(p);
    }
    return all.finish(params);
}

// --- sampling ---------------------------------------------------------------

/// Uniform random draw (a quickpick).
inline LotterySequence quickpick(Rng& rng, const CodecParams& params = {}) {
    params.validate();
    std::vector<int> pool(static_cast<std::size_t>(params.pool_size));
    std::iota(pool.begin(), pool.end(), 1);
    for (int i = 0; i < params.draw_count; ++i) {
        const auto j = static_cast<std::size_t>(i) + rng.below(pool.size() - static_cast<std::size_t>(i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(params.draw_count));
    return LotterySequence::normalized(std::move(pool), params);
}

struct BitBand {
    int lo = 0;
    int hi = 0;

    static BitBand make(int lo, int hi) {
        if (lo < 0 || lo > hi) {
            throw Error(Errc::InvalidArgument, "band " + std::to_string(lo) + "-" + std::to_string(hi) +
                                                   " needs 0 <= lo <= hi");
        }
        return BitBand{lo, hi};
    }

    bool contains(int bits) const noexcept { return lo <= bits && bits <= hi; }
    std::string to_string() const { return std::to_string(lo) + "-" + std::to_string(hi); }
};

/// The four stimulus bands: 15-18, 19-22, 23-26 and 27-29 bits.
inline constexpr BitBand kStandardBands[] = {{15, 18}, {19, 22}, {23, 26}, {27, 29}};

/// "15-18,19-22" -> bands.
inline std::vector<BitBand> parse_bands(const std::string& text) {
    std::vector<BitBand> out;
    for (const auto& part : detail::split(text, ',')) {
        const auto ends = detail::split(detail::trim(part), '-');
        if (ends.size() != 2) {
            throw Error(Errc::ParseError, "band '" + part + "' is not lo-hi");
        }
        int v[2] = {0, 0};
        for (int i = 0; i < 2; ++i) {
            std::size_t used = 0;
            try {
                v[i] = std::stoi(ends[static_cast<std::size_t>(i)], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (ends[static_cast<std::size_t>(i)].empty() || used != ends[static_cast<std::size_t>(i)].size()) {
                throw Error(Errc::ParseError, "band '" + part + "' is not lo-hi");
            }
        }
        out.push_back(BitBand::make(v[0], v[1]));
    }
    return out;
}

/// Walks the code tree with fair coins for each of the draw's symbols, so a
/// given draw comes up with probability 2^-(its length). Walks that start
/// with REPEAT, spell a repeat as a literal, overrun the pool, or land outside
/// the band are thrown away.
inline LotterySequence generate_distractor(const BitBand& band, Rng& rng, std::uint64_t max_tries = 1'000'000,
                                           const CodecParams& params = {}) {
    params.validate();
    std::vector<int> numbers(static_cast<std::size_t>(params.draw_count));
    for (std::uint64_t t = 0; t < max_tries; ++t) {
        int bits = 0;
        int sum = 0;
        int prev_step = 0;
        bool ok = true;
        for (int i = 0; i < params.draw_count && ok; ++i) {
            const auto s = stepcode::kCodebook.decode_one([&] { return rng.coin(); });
            bits += static_cast<int>(stepcode::kCodebook.length(s));
            int step = s.value;
            if (s.is_repeat()) {
                ok = i > 0;
                step = prev_step;
            } else if (i > 0 && step == prev_step) {
                ok = false;
            }
            sum += step;
            ok = ok && sum <= params.pool_size;
            numbers[static_cast<std::size_t>(i)] = sum;
            prev_step = step;
        }
        if (ok && band.contains(bits)) {
            return LotterySequence::make(numbers, params);
        }
    }
    throw Error(Errc::BandUnsatisfiable, "no draw in band " + band.to_string() + " after " +
                                             std::to_string(max_tries) + " tries");
}

inline LotterySequence generate_distractor(const BitBand& band, std::uint64_t seed,
                                           std::uint64_t max_tries = 1'000'000, const CodecParams& params = {}) {
    Rng rng(seed);
    return generate_distractor(band, rng, max_tries, params);
}

// --- ranking ----------------------------------------------------------------

/// Pearson correlation; 0 when either side has no variance.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) {
        throw Error(Errc::InvalidArgument, "correlation needs two equal, non-empty samples");
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) {
        return 0.0;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// 1-based ranks, ties sharing the mean of their positions.
inline std::vector<double> midranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t m = i; m <= j; ++m) {
            r[order[m]] = mid;
        }
        i = j + 1;
    }
    return r;
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
    const auto rx = midranks(x);
    const auto ry = midranks(y);
    return pearson(rx, ry);
}

struct RankedItem {
    LotterySequence sequence;
    int compressed_bits = 0;
    int rank = 0;
};

struct RankingResult {
    std::vector<RankedItem> items;  // in rank order
    double pearson_r = 0.0;
    double spearman_rho = 0.0;
};

/// Rank 1 = longest code = most random-looking. Equal lengths go by
/// lexicographic sequence order.
inline RankingResult rank_candidates(std::span<const LotterySequence> candidates, const CodecParams& params = {}) {
    if (candidates.size() < 2) {
        throw Error(Errc::TooFewCandidates, "ranking needs at least 2 candidates, got " +
                                                std::to_string(candidates.size()));
    }
    RankingResult r;
    for (const auto& c : candidates) {
        r.items.push_back({c, stepcode::compressed_length(c, params), 0});
    }
    std::sort(r.items.begin(), r.items.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.compressed_bits != b.compressed_bits) {
            return a.compressed_bits > b.compressed_bits;
        }
        return a.sequence < b.sequence;
    });
    std::vector<double> ranks, bits;
    for (std::size_t i = 0; i < r.items.size(); ++i) {
        r.items[i].rank = static_cast<int>(i + 1);
        ranks.push_back(static_cast<double>(i + 1));
        bits.push_back(r.items[i].compressed_bits);
    }
    r.pearson_r = pearson(ranks, bits);
    r.spearman_rho = spearman(ranks, bits);
    return r;
}

// --- simulated panel --------------------------------------------------------

struct PanelConfig {
    std::size_t responders = 130;
    double noise_sd_bits = 1.5;
};

struct PanelResult {
    std::vector<double> mean_rank;  // per candidate, input order
    std::vector<double> bits;
    double pearson_r = 0.0;
    double spearman_rho = 0.0;
};

/// Simulated responders: each perceives a candidate's randomness as its code
/// length plus Gaussian noise and ranks candidates most-random first. A
/// stand-in for human judges, not a model of them.
inline PanelResult simulate_panel(std::span<const LotterySequence> candidates, Rng& rng,
                                  const PanelConfig& config = {}, const CodecParams& params = {}) {
    if (candidates.size() < 2) {
        throw Error(Errc::TooFewCandidates, "panel needs at least 2 candidates");
    }
    if (config.responders < 1 || !(config.noise_sd_bits >= 0)) {
        throw Error(Errc::InvalidArgument, "panel needs responders >= 1 and noise_sd >= 0");
    }
    const std::size_t m = candidates.size();
    PanelResult out;
    for (const auto& c : candidates) {
        out.bits.push_back(stepcode::compressed_length(c, params));
    }
    std::vector<double> rank_sum(m, 0.0);
    std::vector<double> perceived(m);
    std::vector<std::size_t> order(m);
    for (std::size_t r = 0; r < config.responders; ++r) {
        for (std::size_t i = 0; i < m; ++i) {
            perceived[i] = out.bits[i] + config.noise_sd_bits * rng.normal();
        }
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) {
            return perceived[a] != perceived[b] ? perceived[a] > perceived[b] : a < b;
        });
        for (std::size_t pos = 0; pos < m; ++pos) {
            rank_sum[order[pos]] += static_cast<double>(pos + 1);
        }
    }
    for (double s : rank_sum) {
        out.mean_rank.push_back(s / static_cast<double>(config.responders));
    }
    out.pearson_r = pearson(out.mean_rank, out.bits);
    out.spearman_rho = spearman(out.mean_rank, out.bits);
    return out;
}

/// One quickpick followed by one distractor per band.
inline std::vector<LotterySequence> experiment_stimuli(std::span<const BitBand> bands, Rng& rng,
                                                       const CodecParams& params = {}) {
    std::vector<LotterySequence> out{quickpick(rng, params)};
    for (const auto& band : bands) {
        out.push_back(generate_distractor(band, rng, 1'000'000, params));
    }
    return out;
}

} // namespace randef::lotto
