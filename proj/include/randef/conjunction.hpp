#pragma once

// Builds a typical string y under p, pulls out its most frequent block s, and
// checks that x = s^l is both more probable than y and surprising under p.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "randef/bitstring.hpp"
#include "randef/error.hpp"
#include "randef/models.hpp"
#include "randef/rng.hpp"

namespace randef::conjunction {

using models::ConditionalCostReport;
using models::QuantizedPMF;
using models::SurpriseThreshold;

struct ConjunctionWitness {
    BitString y;
    BitString s;
    std::size_t l = 0;
    BitString x;
    double c = 0.0;  // -log2 p(s)

    double sf_x = 0.0;  // -log2 p_x
    double sf_y = 0.0;
    double p_x = 0.0;
    double p_y = 0.0;
    ConditionalCostReport cost_x;
    ConditionalCostReport cost_y;

    bool y_typical = false;
    bool x_surprising = false;
    bool prob_order_ok = false;

    std::size_t n = 0;
    std::size_t attempts = 0;  // samples drawn before a typical y turned up

    bool all_true() const noexcept { return y_typical && x_surprising && prob_order_ok; }
};

struct FrequentBlock {
    BitString s;
    std::size_t count = 0;
};

/// Most frequent k-block of y; ties go to the smallest block value.
inline FrequentBlock most_frequent_block(const BitString& y, unsigned k) {
    const auto prof = models::profile(y, k);
    std::uint32_t best = 0;
    for (std::uint32_t s = 1; s < prof.counts.size(); ++s) {
        if (prof.counts[s] > prof.counts[best]) {
            best = s;
        }
    }
    FrequentBlock r;
    r.s.append(best, k);
    r.count = prof.counts[best];
    return r;
}

inline ConjunctionWitness build_witness(const QuantizedPMF& p, SurpriseThreshold alpha, std::size_t n,
                                        std::uint64_t seed, std::size_t max_retries = 1000) {
    if (n < 1) {
        throw Error(Errc::InvalidArgument, "n must be >= 1");
    }
    if (p.support_size() < 2) {
        throw Error(Errc::DegenerateModel, "model has a single symbol; -log2 p(s) is 0 for every block it can emit");
    }

    Rng rng(seed);
    ConjunctionWitness w;
    w.n = n;
    for (std::size_t attempt = 1; attempt <= max_retries; ++attempt) {
        BitString y = models::sample(p, n, rng);
        if (models::is_typical(p, y, alpha)) {
            w.y = std::move(y);
            w.attempts = attempt;
            break;
        }
    }
    if (w.attempts == 0) {
        throw Error(Errc::NoTypicalSample, "no typical sample in " + std::to_string(max_retries) + " draws");
    }
    w.y_typical = true;

    const unsigned k = p.block_bits();
    auto [s, l] = most_frequent_block(w.y, k);
    w.s = std::move(s);
    w.l = l;
    w.x = w.s.repeated(l);
    w.c = p.symbol_bits(static_cast<std::uint32_t>(w.s.value_at(0, k)));

    w.cost_x = models::conditional_cost(p, w.x);
    w.cost_y = models::conditional_cost(p, w.y);
    w.sf_x = w.cost_x.shannon_fano_bits;
    w.sf_y = w.cost_y.shannon_fano_bits;
    w.p_x = std::exp2(-w.sf_x);
    w.p_y = std::exp2(-w.sf_y);

    w.x_surprising = w.cost_x.best_pattern_bits < w.sf_x - alpha.bits;
    w.prob_order_ok = w.sf_x < w.sf_y;
    return w;
}

/// Fraction of `seeds` consecutive seeds (starting at `seed`) whose witness at
/// length n has every verdict true.
inline double firing_fraction(const QuantizedPMF& p, SurpriseThreshold alpha, std::size_t n, std::uint64_t seed,
                              std::size_t seeds, std::size_t max_retries = 1000) {
    if (seeds < 1) {
        throw Error(Errc::InvalidArgument, "seeds must be >= 1");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < seeds; ++i) {
        hits += build_witness(p, alpha, n, seed + i, max_retries).all_true();
    }
    return static_cast<double>(hits) / static_cast<double>(seeds);
}

/// (n, fraction_all_true) for n = 1..n_max.
inline std::vector<std::pair<std::size_t, double>> scan(const QuantizedPMF& p, SurpriseThreshold alpha,
                                                        std::size_t n_max, std::uint64_t seed,
                                                        std::size_t seeds = 20) {
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) {
        out.emplace_back(n, firing_fraction(p, alpha, n, seed, seeds));
    }
    return out;
}

/// Smallest n <= n_max at which every one of `seeds` witnesses fires.
inline std::size_t minimal_n(const QuantizedPMF& p, SurpriseThreshold alpha, std::size_t n_max,
                             std::uint64_t seed, std::size_t seeds = 20) {
    for (std::size_t n = 1; n <= n_max; ++n) {
        if (firing_fraction(p, alpha, n, seed, seeds) == 1.0) {
            return n;
        }
    }
    throw Error(Errc::NotFoundWithinBudget, "no n <= " + std::to_string(n_max) + " fires on all seeds");
}

} // namespace randef::conjunction
