#include <gtest/gtest.h>

#include <cmath>

#include "randef/models.hpp"
#include "test_support.hpp"

using namespace randef;
using namespace randef::models;
using randef::testing::random_bits;
using randef::testing::sample_blocks;
using randef::testing::zeros;

namespace {

const QuantizedPMF kUniformBit = QuantizedPMF::make(1, 1, {1, 1});

Errc error_code(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::InvalidArgument;
}

// Strings with plenty of run and period structure, for soundness checks.
BitString structured_string(Rng& rng) {
    BitString x;
    switch (rng.below(3)) {
        case 0: {  // long runs
            const auto runs = 1 + rng.below(6);
            for (std::uint64_t r = 0; r < runs; ++r) {
                const bool bit = rng.coin();
                const auto len = 1 + rng.below(40);
                for (std::uint64_t i = 0; i < len; ++i) x.push_back(bit);
            }
            break;
        }
        case 1: {  // periodic
            const BitString unit = random_bits(1 + rng.below(6), rng);
            x = unit.repeated(1 + rng.below(30));
            break;
        }
        default:
            x = random_bits(1 + rng.below(80), rng);
    }
    return x;
}

} // namespace

TEST(QuantizedPMF, Validation) {
    EXPECT_THROW(QuantizedPMF::make(1, 2, {1, 2}), Error);
    EXPECT_THROW(QuantizedPMF::make(2, 2, {1, 3}), Error);
    EXPECT_THROW(QuantizedPMF::make(0, 2, {4}), Error);
    EXPECT_NO_THROW(QuantizedPMF::make(1, 2, {3, 1}));
    EXPECT_EQ(QuantizedPMF::uniform(2, 3).weights()[3], 2U);
    EXPECT_EQ(QuantizedPMF::point_mass(1, 3, 0).support_size(), 1U);
}

TEST(ModelDescription, Length) {
    // gamma(1) + gamma(3) + 1 * 3
    EXPECT_EQ(ModelDescription::describe(QuantizedPMF::make(1, 3, {6, 2})).description_bits, 1 + 3 + 3);
    // gamma(2) + gamma(4) + 3 * 4
    EXPECT_EQ(ModelDescription::describe(QuantizedPMF::uniform(2, 4)).description_bits, 3 + 5 + 12);
}

TEST(ShannonFano, Examples) {
    EXPECT_EQ(shannon_fano_bits(kUniformBit, BitString::from_string("0101")), 4.0);
    EXPECT_EQ(shannon_fano_bits(QuantizedPMF::make(1, 2, {3, 1}), BitString::from_string("1")), 2.0);
    // -log2(1/2) - log2(1/4)
    EXPECT_EQ(shannon_fano_bits(QuantizedPMF::make(2, 3, {4, 2, 1, 1}), BitString::from_string("0001")), 3.0);
}

TEST(ShannonFano, ZeroProbabilityBlock) {
    const auto p = QuantizedPMF::point_mass(1, 3, 0);
    EXPECT_EQ(error_code([&] { shannon_fano_bits(p, BitString::from_string("001")); }), Errc::ZeroProbabilityBlock);
    EXPECT_EQ(error_code([&] { conditional_cost(p, BitString::from_string("1")); }), Errc::ZeroProbabilityBlock);
    EXPECT_EQ(error_code([&] { is_typical(p, BitString::from_string("1"), SurpriseThreshold(8)); }),
              Errc::ZeroProbabilityBlock);
}

TEST(ConditionalCost, AllZeros) {
    const auto r = conditional_cost(kUniformBit, zeros(64));
    // Single-block unit: s (1 bit) + gamma(64) + selector.
    const double single_unit = 1 + (2 * std::floor(std::log2(64.0)) + 1) + 8;
    EXPECT_EQ(single_unit, 22.0);
    // The cheapest period is "00" x 32: 2 + gamma(32) + selector.
    EXPECT_EQ(r.winning_code, PatternCode::BlockRepeat);
    EXPECT_EQ(r.best_pattern_bits, 2 + 11 + 8);
    EXPECT_LE(r.best_pattern_bits, single_unit);
    EXPECT_LE(r.best_pattern_bits, 24.0);
    EXPECT_EQ(r.repeat_period_blocks, 2U);
    EXPECT_EQ(r.repeat_count, 32U);
    EXPECT_EQ(r.literal_bits, 72.0);
    // selector + gamma(#runs=1) + block + gamma(64)
    EXPECT_EQ(r.run_length_bits, 8 + 1 + 1 + 13);
}

TEST(ConditionalCost, RandomStringsAreLiteral) {
    Rng rng(11);
    int literal_wins = 0;
    for (int t = 0; t < 1000; ++t) {
        literal_wins += conditional_cost(kUniformBit, random_bits(64, rng)).winning_code == PatternCode::Literal;
    }
    EXPECT_GT(literal_wins, 950);
}

TEST(ConditionalCost, SingleBlock) {
    const auto r = conditional_cost(kUniformBit, BitString::from_string("0"));
    EXPECT_EQ(r.literal_bits, 1 + 8);
    EXPECT_EQ(r.block_repeat_bits, 1 + 1 + 8);
    EXPECT_EQ(r.run_length_bits, 8 + 1 + 1 + 1);
    EXPECT_EQ(r.winning_code, PatternCode::Literal);
    EXPECT_EQ(r.best_pattern_bits, 9.0);
}

TEST(ConditionalCost, InvalidStrings) {
    EXPECT_EQ(error_code([&] { conditional_cost(kUniformBit, BitString{}); }), Errc::EmptyString);
    EXPECT_THROW(conditional_cost(QuantizedPMF::uniform(2, 2), BitString::from_string("010")), Error);
}

TEST(ConditionalCost, NeverExceedsLiteral) {
    Rng rng(5);
    for (int t = 0; t < 2000; ++t) {
        const auto x = structured_string(rng);
        const auto r = conditional_cost(kUniformBit, x);
        ASSERT_LE(r.best_pattern_bits, r.literal_bits);
    }
}

TEST(Typicality, Examples) {
    Rng rng(3);
    int typical = 0;
    for (int t = 0; t < 1000; ++t) {
        typical += is_typical(kUniformBit, random_bits(64, rng), SurpriseThreshold(8));
    }
    EXPECT_GE(typical, 990);

    EXPECT_FALSE(is_typical(kUniformBit, zeros(64), SurpriseThreshold(8)));  // 22 < 64 - 8
    EXPECT_TRUE(is_typical(kUniformBit, zeros(64), SurpriseThreshold(64)));
    EXPECT_TRUE(is_typical(kUniformBit, zeros(64), SurpriseThreshold(1000)));
    EXPECT_THROW(SurpriseThreshold(0.0), Error);
}

TEST(Surprise, Examples) {
    EXPECT_TRUE(is_surprising(kUniformBit, zeros(64), SurpriseThreshold(8)));
    const auto alternating = BitString::from_string("01").repeated(32);
    EXPECT_TRUE(is_surprising(kUniformBit, alternating, SurpriseThreshold(8)));
    const auto r = conditional_cost(kUniformBit, alternating);
    EXPECT_EQ(r.winning_code, PatternCode::BlockRepeat);
    EXPECT_EQ(r.repeat_period_blocks, 2U);
    EXPECT_EQ(r.best_pattern_bits, 8 + 2 + 11);  // selector + "01" + gamma(32)

    EXPECT_FALSE(is_surprising(QuantizedPMF::point_mass(1, 3, 0), zeros(64), SurpriseThreshold(8)));

    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        const auto x = random_bits(64, rng);
        ASSERT_EQ(is_surprising(kUniformBit, x, SurpriseThreshold(8)), !is_typical(kUniformBit, x, SurpriseThreshold(8)));
    }
}

TEST(Typicality, MonotoneInAlpha) {
    Rng rng(17);
    for (int t = 0; t < 3000; ++t) {
        const auto x = structured_string(rng);
        const double a = 0.1 + rng.uniform() * 60;
        const double b = a + rng.uniform() * 60;
        if (is_typical(kUniformBit, x, SurpriseThreshold(a))) {
            ASSERT_TRUE(is_typical(kUniformBit, x, SurpriseThreshold(b)));
        }
    }
}

TEST(Surprise, WinningProgramReconstructsString) {
    Rng rng(23);
    int surprising = 0;
    for (int t = 0; t < 3000; ++t) {
        const auto x = structured_string(rng);
        const SurpriseThreshold alpha(1 + rng.uniform() * 10);
        const auto r = conditional_cost(kUniformBit, x);
        if (r.best_pattern_bits < r.shannon_fano_bits - alpha.bits) {
            ++surprising;
            ASSERT_NE(r.winning_code, PatternCode::Literal);
            const auto program = write_pattern_program(r.winning_code, x, 1);
            ASSERT_EQ(static_cast<double>(program.size()), r.best_pattern_bits);
            ASSERT_EQ(run_pattern_program(program, 1), x);
        }
    }
    EXPECT_GT(surprising, 500);
}

TEST(PatternPrograms, RoundTripWithWiderBlocks) {
    Rng rng(29);
    for (int t = 0; t < 500; ++t) {
        const unsigned k = 1 + static_cast<unsigned>(rng.below(3));
        BitString x;
        const auto n = 1 + rng.below(30);
        for (std::uint64_t i = 0; i < n; ++i) x.append(rng.coin() ? 0 : rng.bits(k), k);
        const auto prof = profile(x, k);
        const auto rle = write_pattern_program(PatternCode::RunLength, x, k);
        ASSERT_EQ(static_cast<double>(rle.size()), prof.run_length_bits);
        ASSERT_EQ(run_pattern_program(rle, k), x);
        const auto rep = write_pattern_program(PatternCode::BlockRepeat, x, k);
        ASSERT_EQ(static_cast<double>(rep.size()), prof.block_repeat_bits);
        ASSERT_EQ(run_pattern_program(rep, k), x);
    }
}

TEST(Standalone, EnumerativeFormula) {
    const auto c = standalone_cost(BitString::from_string("0011"), 1);
    EXPECT_DOUBLE_EQ(c.enumerative_bits, 8 + std::log2(5.0) + std::log2(6.0));
    EXPECT_EQ(c.uniform_pattern_bits, 4 + 8);
    EXPECT_EQ(c.best_bits, std::min(c.enumerative_bits, 12.0));
}

TEST(Optimality, SampledFromFamilyMember) {
    const auto p = ModelDescription::describe(QuantizedPMF::make(1, 3, {6, 2}));
    Rng rng(31);
    for (int t = 0; t < 100; ++t) {
        ASSERT_TRUE(is_optimal(p, sample_blocks(p.model, 2048, rng), 16.0));
    }
}

TEST(Optimality, DegenerateCases) {
    const auto mass = ModelDescription::describe(QuantizedPMF::point_mass(1, 3, 0));
    EXPECT_TRUE(is_optimal(mass, zeros(64), 32.0));
    EXPECT_TRUE(is_optimal(mass, zeros(64), 16.0));

    const auto uniform = ModelDescription::describe(QuantizedPMF::uniform(1, 3));
    // standalone collapses to ~14-22 bits, two-part stays at 7 + 64
    EXPECT_FALSE(is_optimal(uniform, zeros(64), 8.0));
    EXPECT_EQ(two_part_bits(uniform, zeros(64)), 71.0);
}

TEST(ModelUpdate, Costs) {
    const auto uniform = ModelDescription::describe(QuantizedPMF::uniform(1, 8));
    const auto nudged = ModelDescription::describe(QuantizedPMF::make(1, 8, {129, 127}));
    const auto mass = ModelDescription::describe(QuantizedPMF::point_mass(1, 8, 0));

    const double identity = model_update_cost(uniform, uniform);
    const double small = model_update_cost(uniform, nudged);
    const double large = model_update_cost(uniform, mass);
    EXPECT_EQ(identity, 2 + 8);
    EXPECT_EQ(small, 8 + 3 + 3);
    EXPECT_EQ(large, 8 + 2 * (2 + 15));
    EXPECT_GT(small, identity);
    EXPECT_GT(large, small);

    for (const auto& to : {uniform, nudged, mass}) {
        const auto program = write_model_update(uniform, to);
        EXPECT_EQ(static_cast<double>(program.size()), model_update_cost(uniform, to));
        EXPECT_EQ(apply_model_update(uniform, program), to);
    }
}

TEST(ModelUpdate, IdentityIsUniqueMinimum) {
    std::vector<ModelDescription> family;
    for (std::uint64_t a = 0; a <= 16; ++a) {
        for (std::uint64_t b = 0; a + b <= 16; ++b) {
            for (std::uint64_t c = 0; a + b + c <= 16; ++c) {
                family.push_back(ModelDescription::describe(QuantizedPMF::make(2, 4, {a, b, c, 16 - a - b - c})));
            }
        }
    }
    Rng rng(41);
    for (int t = 0; t < 40; ++t) {
        const auto& from = family[rng.below(family.size())];
        const double identity = model_update_cost(from, from);
        EXPECT_EQ(identity, 4 + 8);
        for (const auto& to : family) {
            if (!(to == from)) {
                ASSERT_GT(model_update_cost(from, to), identity);
            }
        }
    }
}

TEST(ModelUpdate, IncompatibleModels) {
    const auto a = ModelDescription::describe(QuantizedPMF::uniform(1, 3));
    const auto b = ModelDescription::describe(QuantizedPMF::uniform(1, 4));
    const auto c = ModelDescription::describe(QuantizedPMF::uniform(2, 3));
    EXPECT_EQ(error_code([&] { model_update_cost(a, b); }), Errc::IncompatibleModels);
    EXPECT_EQ(error_code([&] { model_update_cost(a, c); }), Errc::IncompatibleModels);
}

TEST(SubjectiveProbability, Values) {
    EXPECT_EQ(subjective_probability(0), 1.0);
    EXPECT_EQ(subjective_probability(1), 0.5);
    EXPECT_EQ(subjective_probability(10), 1.0 / 1024);
    EXPECT_NEAR(subjective_probability(10), 0.000977, 1e-6);
    EXPECT_EQ(error_code([] { subjective_probability(-1); }), Errc::NegativeCost);
}

TEST(SubjectiveProbability, MultiplicativeAndDecreasing) {
    for (int a = 0; a <= 500; a += 7) {
        for (int b = 0; b <= 500; b += 11) {
            ASSERT_EQ(subjective_probability(a + b), subjective_probability(a) * subjective_probability(b));
        }
        ASSERT_GT(subjective_probability(a), subjective_probability(a + 0.5));
    }
}
