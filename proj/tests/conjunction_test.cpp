#include <gtest/gtest.h>

#include <cmath>

#include "randef/conjunction.hpp"
#include "test_support.hpp"

using namespace randef;
using namespace randef::models;
using namespace randef::conjunction;
using randef::testing::random_bits;
using randef::testing::zeros;

namespace {

// Smallest n with c*l - alpha > k + 2*log2(l) + 1 + 8 at the pigeonhole floor
// l = n / 2^k, c the cheapest symbol's cost.
std::size_t oracle_threshold(double c, unsigned k, double alpha) {
    for (std::size_t n = 1; n < 100000; ++n) {
        const double l = static_cast<double>(n) / std::exp2(k);
        if (l >= 1 && c * l - alpha > k + 2 * std::log2(l) + 1 + 8) return n;
    }
    return 0;
}

// Regression constants from the scan above.
constexpr std::size_t kUniformThreshold = 49;
constexpr std::size_t kSkewedThreshold = 131;

const QuantizedPMF kUniform = QuantizedPMF::uniform(1, 2);
const QuantizedPMF kSkewed = QuantizedPMF::make(1, 2, {3, 1});

void check_invariants(const ConjunctionWitness& w, unsigned k) {
    EXPECT_EQ(w.x, w.s.repeated(w.l));
    EXPECT_EQ(w.s.size(), k);
    EXPECT_GE(w.l * (std::size_t{1} << k), w.n);
    EXPECT_LE(w.sf_x, w.sf_y);
    EXPECT_GE(w.p_x, w.p_y);
    EXPECT_LE(w.cost_x.best_pattern_bits, k + 2 * std::log2(static_cast<double>(w.l)) + 1 + 8);
    EXPECT_TRUE(w.y_typical);
}

} // namespace

TEST(MostFrequentBlock, Examples) {
    const auto r = most_frequent_block(BitString::from_string("00 01 00 11"), 2);
    EXPECT_EQ(r.s.to_string(), "00");
    EXPECT_EQ(r.count, 2U);

    const auto z = most_frequent_block(zeros(37), 1);
    EXPECT_EQ(z.s.to_string(), "0");
    EXPECT_EQ(z.count, 37U);
}

TEST(MostFrequentBlock, TiesGoToSmallest) {
    const auto r = most_frequent_block(BitString::from_string("11 10 10 11"), 2);
    EXPECT_EQ(r.s.to_string(), "10");
    EXPECT_EQ(r.count, 2U);
}

TEST(MostFrequentBlock, Pigeonhole) {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const auto y = random_bits(128, rng);
        EXPECT_GE(most_frequent_block(y, 2).count, 16U);
    }
}

TEST(MostFrequentBlock, Errors) {
    EXPECT_THROW(
        {
            try {
                most_frequent_block(BitString{}, 1);
            } catch (const Error& e) {
                EXPECT_EQ(e.code(), Errc::EmptyString);
                throw;
            }
        },
        Error);
    EXPECT_THROW(most_frequent_block(BitString::from_string("010"), 2), Error);
}

TEST(Threshold, OracleValues) {
    EXPECT_EQ(oracle_threshold(1.0, 1, 5.0), kUniformThreshold);
    EXPECT_EQ(oracle_threshold(std::log2(4.0 / 3.0), 1, 5.0), kSkewedThreshold);
}

TEST(BuildWitness, UniformExample) {
    const auto w = build_witness(kUniform, SurpriseThreshold(5), 64, 7);
    EXPECT_TRUE(w.y_typical);
    EXPECT_TRUE(w.x_surprising);
    EXPECT_TRUE(w.prob_order_ok);
    EXPECT_GT(w.p_x, w.p_y);
    EXPECT_GE(w.l, 32U);
    EXPECT_DOUBLE_EQ(w.c, 1.0);
    EXPECT_DOUBLE_EQ(w.sf_x, static_cast<double>(w.l));
    EXPECT_DOUBLE_EQ(w.sf_y, 64.0);
    EXPECT_EQ(w.cost_x.winning_code, PatternCode::BlockRepeat);
    check_invariants(w, 1);
}

TEST(BuildWitness, PointMassIsDegenerate) {
    try {
        build_witness(QuantizedPMF::point_mass(1, 3, 0), SurpriseThreshold(5), 64, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::DegenerateModel);
    }
}

TEST(BuildWitness, SingleBlock) {
    const auto w = build_witness(kUniform, SurpriseThreshold(5), 1, 11);
    EXPECT_EQ(w.x, w.y);
    EXPECT_EQ(w.s, w.y);
    EXPECT_EQ(w.l, 1U);
    EXPECT_FALSE(w.prob_order_ok);
    EXPECT_DOUBLE_EQ(w.p_x, w.p_y);
    EXPECT_FALSE(w.all_true());
}

TEST(BuildWitness, RetryBudget) {
    try {
        build_witness(kUniform, SurpriseThreshold(5), 8, 1, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NoTypicalSample);
    }
    EXPECT_THROW(build_witness(kUniform, SurpriseThreshold(5), 0, 1), Error);
}

TEST(BuildWitness, Deterministic) {
    const auto a = build_witness(kSkewed, SurpriseThreshold(5), 90, 42);
    const auto b = build_witness(kSkewed, SurpriseThreshold(5), 90, 42);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.attempts, b.attempts);
}

TEST(BuildWitness, InvariantsAcrossLengths) {
    for (const auto& p : {kUniform, kSkewed, QuantizedPMF::make(2, 3, {1, 2, 3, 2})}) {
        for (std::size_t n : {1, 2, 5, 17, 40, 64, 150}) {
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                const auto w = build_witness(p, SurpriseThreshold(5), n, seed);
                check_invariants(w, p.block_bits());
                // Strict order exactly when y holds a block other than s.
                EXPECT_EQ(w.prob_order_ok, w.l < n);
            }
        }
    }
}

TEST(BuildWitness, FiresAtOracleThreshold) {
    for (const auto& [p, n] : {std::pair{kUniform, kUniformThreshold}, std::pair{kSkewed, kSkewedThreshold}}) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto w = build_witness(p, SurpriseThreshold(5), n, seed);
            EXPECT_TRUE(w.all_true()) << "n=" << n << " seed=" << seed;
        }
    }
}

TEST(MinimalN, AtMostOracleThreshold) {
    const auto uniform = minimal_n(kUniform, SurpriseThreshold(5), 200, 0);
    const auto skewed = minimal_n(kSkewed, SurpriseThreshold(5), 200, 0);
    EXPECT_LE(uniform, kUniformThreshold);
    EXPECT_LE(skewed, kSkewedThreshold);
    EXPECT_NE(uniform, skewed);
    // Below the threshold some seed fails.
    EXPECT_LT(firing_fraction(kUniform, SurpriseThreshold(5), uniform - 1, 0, 20), 1.0);
}

TEST(MinimalN, HugeAlpha) {
    try {
        minimal_n(kUniform, SurpriseThreshold(1000), 64, 0, 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotFoundWithinBudget);
    }
}

TEST(Scan, FractionGrowsWithN) {
    const auto rows = scan(kSkewed, SurpriseThreshold(5), 80, 0, 40);
    ASSERT_EQ(rows.size(), 80U);
    EXPECT_EQ(rows.front().second, 0.0);
    // Coarse windows, so sampling noise does not break the order.
    auto window = [&](std::size_t from, std::size_t to) {
        double sum = 0;
        for (std::size_t n = from; n <= to; ++n) sum += rows[n - 1].second;
        return sum / static_cast<double>(to - from + 1);
    };
    EXPECT_LE(window(1, 20), window(21, 40));
    EXPECT_LE(window(21, 40), window(41, 60));
    EXPECT_LE(window(41, 60), window(61, 80));
}
