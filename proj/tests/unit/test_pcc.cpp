/*
 * Copyright 2026 The scsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>

#include "scsim/pcc.hpp"
#include "test_util.hpp"

namespace scsim {
namespace {

bool xbit(std::uint32_t x, unsigned i) { return ((x >> (i - 1)) & 1U) != 0; }

// Gate-level reference, written out independently of the library.
bool ref_nandnor(std::uint32_t x, std::uint32_t r, unsigned n, std::uint32_t mask) {
    bool o = false;
    for (unsigned i = 1; i <= n; ++i) {
        const bool nor = xbit(x, i) != xbit(mask, i);
        o = nor ? !(o || xbit(r, i)) : !(o && xbit(r, i));
    }
    return o;
}

// 2^N m_N via M_i = -M_{i-1} + 2^i c_i, all integers.
std::int64_t ref_scaled_mean(std::uint32_t x, unsigned n, std::uint32_t mask) {
    std::int64_t m = 0;
    for (unsigned i = 1; i <= n; ++i) {
        const bool nor = xbit(x, i) != xbit(mask, i);
        m = -m + (nor ? (std::int64_t{1} << (i - 1)) : (std::int64_t{1} << i));
    }
    return m;
}

TEST(Comparator, StrictGreaterThan) {
    for (std::uint32_t r = 0; r < 16; ++r) EXPECT_FALSE(cmp_bit(0, r));
    for (std::uint32_t r = 0; r < 15; ++r) EXPECT_TRUE(cmp_bit(15, r));
    EXPECT_FALSE(cmp_bit(15, 15));
    EXPECT_EQ(enumerate_ones({PccKind::Comparator, 4}, 8), 8u);
}

TEST(Comparator, MeanOverAllWordsIsXOverTwoToN) {
    for (unsigned n = 3; n <= 10; ++n) {
        for (std::uint32_t x = 0; x < (1u << n); ++x) ASSERT_EQ(enumerate_ones({PccKind::Comparator, n}, x), x);
    }
}

TEST(MuxChain, ZeroInputGivesZero) {
    for (std::uint32_t r = 0; r < 256; ++r) EXPECT_FALSE(mux_chain_bit(0, r, 8));
    EXPECT_EQ(mux_chain_probability(0, 8), 0.0);
}

TEST(MuxChain, AllOnesInputIsOrOfR) {
    for (std::uint32_t r = 0; r < 64; ++r) EXPECT_EQ(mux_chain_bit(63, r, 6), r != 0);
}

TEST(MuxChain, EnumerationMatchesFormula) {
    EXPECT_EQ(enumerate_ones({PccKind::MuxChain, 3}, 5), 5u);
    EXPECT_DOUBLE_EQ(mux_chain_probability(8, 4), 0.5);
    for (std::uint32_t x = 0; x < 256; ++x) {
        ASSERT_EQ(static_cast<double>(enumerate_ones({PccKind::MuxChain, 8}, x)) / 256.0,
                  mux_chain_probability(x, 8));
    }
}

TEST(InverterMask, ParityRule) {
    EXPECT_EQ(inverter_mask(4), 0b1010u);  // stages 2 and 4
    EXPECT_EQ(inverter_mask(3), 0b101u);   // stages 1 and 3
    EXPECT_EQ(inverter_mask(1), 0b1u);
    EXPECT_THROW(inverter_mask(0), std::invalid_argument);
}

TEST(NandNorChain, SingleStageWithoutInverter) {
    for (std::uint32_t r = 0; r < 2; ++r) {
        EXPECT_TRUE(nandnor_chain_bit(0, r, 1, 0));          // NAND(0, R1) = 1
        EXPECT_EQ(nandnor_chain_bit(1, r, 1, 0), r == 0);    // NOR(0, R1) = NOT R1
    }
    EXPECT_DOUBLE_EQ(nandnor_expected(1, 1, 0), 0.5);
}

TEST(NandNorChain, SingleStageWithInverter) {
    EXPECT_DOUBLE_EQ(nandnor_expected(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(nandnor_expected(1, 1), 1.0);
}

TEST(NandNorChain, MatchesGateReference) {
    for (unsigned n = 1; n <= 8; ++n) {
        for (std::uint32_t x = 0; x < (1u << n); ++x) {
            for (std::uint32_t r = 0; r < (1u << n); ++r) {
                ASSERT_EQ(nandnor_chain_bit(x, r, n), ref_nandnor(x, r, n, inverter_mask(n)));
            }
        }
    }
}

TEST(NandNorChain, FourBitElevenEnumeration) {
    EXPECT_EQ(static_cast<double>(enumerate_nandnor_ones(11, 4, inverter_mask(4))) / 16.0, nandnor_expected(11, 4));
}

TEST(NandNorChain, ExhaustiveEquivalence) {
    for (unsigned n = 3; n <= 10; ++n) {
        const auto mask = inverter_mask(n);
        for (std::uint32_t x = 0; x < (1u << n); ++x) {
            const auto ones = static_cast<std::int64_t>(enumerate_nandnor_ones(x, n, mask));
            ASSERT_EQ(ones, ref_scaled_mean(x, n, mask)) << "N=" << n << " X=" << x;
            ASSERT_EQ(ones, nandnor_expected_scaled(x, n, mask));
            ASSERT_NEAR(std::ldexp(static_cast<double>(ones), -static_cast<int>(n)), nandnor_expected(x, n), 1e-12);
            ASSERT_NEAR(nandnor_closed_form(x, n), nandnor_expected(x, n), 1e-12);
        }
    }
}

TEST(NandNorChain, WrongMaskBreaksEquivalence) {
    const unsigned n = 6;
    bool differs = false;
    for (std::uint32_t x = 0; x < 64; ++x) {
        differs |= nandnor_expected(x, n, 0) != nandnor_expected(x, n);
    }
    EXPECT_TRUE(differs);
}

TEST(NandNorChain, ZeroInputGivesConstant) {
    for (unsigned n = 1; n <= 16; ++n) EXPECT_EQ(nandnor_expected(0, n), nandnor_constant(n));
}

TEST(NandNorChain, CoefficientsArePowersOfTwo) {
    for (unsigned n = 3; n <= 10; ++n) {
        for (unsigned k = 1; k <= n; ++k) {
            const double d = nandnor_expected(1u << (k - 1), n) - nandnor_expected(0, n);
            EXPECT_EQ(d, std::ldexp(1.0, static_cast<int>(k) - 1 - static_cast<int>(n)));
            EXPECT_EQ(nandnor_coefficient(k, n), std::ldexp(1.0, static_cast<int>(k) - 1 - static_cast<int>(n)));
        }
    }
}

TEST(NandNorChain, BiasIsConstantInX) {
    for (unsigned n = 3; n <= 10; ++n) {
        double lo = 1e9;
        double hi = -1e9;
        for (std::uint32_t x = 0; x < (1u << n); ++x) {
            const double b = nandnor_expected(x, n) - mux_chain_probability(x, n);
            lo = std::min(lo, b);
            hi = std::max(hi, b);
        }
        EXPECT_LE(hi - lo, 1e-12);
        EXPECT_LE(std::abs(hi), std::ldexp(1.0, -static_cast<int>(n)) + 1e-15);
    }
}

TEST(NandNorChain, BiasZeroForEvenPrecision) {
    for (unsigned n = 2; n <= 16; ++n) {
        EXPECT_EQ(nandnor_constant(n), n % 2 == 0 ? 0.0 : std::ldexp(1.0, -static_cast<int>(n))) << n;
    }
}

TEST(PccProperty, ExpectationsNondecreasingInX) {
    for (PccKind kind : {PccKind::Comparator, PccKind::MuxChain, PccKind::NandNorChain}) {
        for (unsigned n = 3; n <= 10; ++n) {
            double prev = -1.0;
            for (const CurvePoint& p : conversion_curve({kind, n})) {
                ASSERT_GE(p.expected, prev);
                prev = p.expected;
            }
        }
    }
}

TEST(PccProperty, ChainStateConstantsInRange) {
    for (std::uint32_t x = 0; x < 256; ++x) {
        const ChainState s = nandnor_chain_state(x, 8, inverter_mask(8));
        ASSERT_EQ(s.mean.size(), 8u);
        for (double c : s.constant) ASSERT_TRUE(c == 0.5 || c == 1.0);
        for (double m : s.mean) ASSERT_TRUE(m >= 0.0 && m <= 1.0);
    }
}

TEST(GenerateStream, ComparatorZeroIsAllZero) {
    IdealSource src(1);
    EXPECT_EQ(generate_stream({PccKind::Comparator, 8}, 0, 300, src).ones_count(), 0u);
}

TEST(GenerateStream, ChainsConvergeToExpectation) {
    const std::size_t k = 4096;
    IdealSource a(101);
    IdealSource b(102);
    const double mux = decode(generate_stream({PccKind::MuxChain, 8}, 128, k, a));
    const double nn = decode(generate_stream({PccKind::NandNorChain, 8}, 128, k, b));
    EXPECT_NEAR(mux, 0.5, 3 * test::unipolar_sigma(0.5, k));
    const double want = nandnor_expected(128, 8);
    EXPECT_NEAR(nn, want, 3 * test::unipolar_sigma(want, k));
}

TEST(GenerateStream, RejectsNarrowSourceAndWideInput) {
    IdealSource narrow(1, 4);
    EXPECT_THROW(generate_stream({PccKind::Comparator, 8}, 3, 10, narrow), std::invalid_argument);
    IdealSource src(1);
    EXPECT_THROW(generate_stream({PccKind::Comparator, 8}, 256, 10, src), std::invalid_argument);
    EXPECT_THROW(PccSpec({PccKind::Comparator, 17}).validate(), std::invalid_argument);
}

TEST(ConversionCurve, NandNorMinusMuxIsConstant) {
    for (unsigned n = 3; n <= 10; ++n) {
        const auto nn = conversion_curve({PccKind::NandNorChain, n});
        const auto mux = conversion_curve({PccKind::MuxChain, n});
        ASSERT_EQ(nn.size(), std::size_t{1} << n);
        for (std::size_t i = 0; i < nn.size(); ++i) {
            EXPECT_EQ(mux[i].expected, static_cast<double>(i) / static_cast<double>(nn.size()));
            EXPECT_NEAR(nn[i].expected - mux[i].expected, nandnor_constant(n), 1e-12);
        }
        EXPECT_EQ(nn[0].expected, nandnor_constant(n));
    }
}

TEST(PccKindNames, RoundTrip) {
    for (PccKind kind : {PccKind::Comparator, PccKind::MuxChain, PccKind::NandNorChain}) {
        EXPECT_EQ(parse_pcc_kind(to_string(kind)), kind);
    }
    EXPECT_THROW(parse_pcc_kind("wbg"), std::invalid_argument);
}

}  // namespace
}  // namespace scsim
