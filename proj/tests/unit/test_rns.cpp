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

#include <bit>
#include <set>

#include "scsim/rns.hpp"

namespace scsim {
namespace {

TEST(Lfsr, FourBitVisitsEveryNonzeroState) {
    Lfsr lfsr(4, 0b0001);
    std::set<std::uint32_t> seen;
    for (int i = 0; i < 15; ++i) seen.insert(lfsr.step());
    EXPECT_EQ(seen.size(), 15u);
    EXPECT_FALSE(seen.contains(0));
    EXPECT_EQ(lfsr.state(), 0b0001u);
}

TEST(Lfsr, ZeroSeedRejected) {
    EXPECT_THROW(Lfsr(4, 0), std::invalid_argument);
    EXPECT_THROW(Lfsr(4, 16), std::invalid_argument);
}

TEST(Lfsr, NeverReachesZero) {
    for (unsigned n = kMinLfsrWidth; n <= 12; ++n) {
        Lfsr lfsr(n, 1);
        for (std::uint32_t i = 0; i < (1u << n); ++i) ASSERT_NE(lfsr.step(), 0u);
    }
}

TEST(Lfsr, ShippedTableIsMaximal) {
    for (const Polynomial& p : default_polynomials().entries()) {
        EXPECT_EQ(period(Lfsr(p, 1)), (std::uint64_t{1} << p.degree) - 1) << "n=" << p.degree;
        EXPECT_TRUE(is_maximal(p));
    }
    EXPECT_EQ(default_polynomials().entries().size(), 14u);
}

TEST(Lfsr, PeriodFromAnyState) {
    EXPECT_EQ(period(Lfsr(4, 9)), 15u);
    EXPECT_EQ(period(Lfsr(8, 0xA5)), 255u);
}

TEST(Lfsr, NonPrimitivePolynomialIsRejected) {
    const Polynomial x4_plus_1{4, 0b10001};
    EXPECT_LT(period(Lfsr(x4_plus_1, 1)), 15u);
    EXPECT_FALSE(is_maximal(x4_plus_1));
    PolynomialTable table;
    EXPECT_THROW(table.set({4, 0b00101}), std::invalid_argument);  // missing x^4
}

TEST(Lfsr, Deterministic) {
    Lfsr a(11, 123);
    Lfsr b(11, 123);
    for (int i = 0; i < 5000; ++i) ASSERT_EQ(a.step(), b.step());
}

TEST(PolynomialTable, OverrideReplacesEntry) {
    PolynomialTable table;
    table.set({4, 0b11001});  // x^4 + x^3 + 1, also primitive
    EXPECT_EQ(table.at(4).mask, 0b11001u);
    EXPECT_EQ(period(Lfsr(table.at(4), 3)), 15u);
    EXPECT_THROW(table.at(17), std::out_of_range);
}

TEST(SharedSource, IdentityPermutationMatchesBase) {
    Lfsr base(10, 77);
    SharedSource shared(Lfsr(10, 77), identity_permutation(10));
    for (int i = 0; i < 2000; ++i) ASSERT_EQ(shared.step(), base.step());
}

TEST(SharedSource, PermutationPreservesPopulation) {
    Lfsr base(12, 5);
    SharedSource shared(Lfsr(12, 5), random_permutation(12, 99));
    for (int i = 0; i < 4095; ++i) ASSERT_EQ(std::popcount(shared.step()), std::popcount(base.step()));
}

TEST(SharedSource, RejectsBadPermutation) {
    EXPECT_THROW(SharedSource(Lfsr(4, 1), {0, 1, 1, 3}), std::invalid_argument);
    EXPECT_THROW(SharedSource(Lfsr(4, 1), {0, 1, 2}), std::invalid_argument);
}

TEST(Permutation, PermuteBitsMovesBits) {
    const std::vector<unsigned> perm{2, 0, 1};
    EXPECT_EQ(permute_bits(0b001, perm), 0b010u);
    EXPECT_EQ(permute_bits(0b100, perm), 0b001u);
    EXPECT_EQ(permute_bits(0b1000, perm), 0u);
}

TEST(Permutation, RandomPermutationIsReproducibleBijection) {
    for (unsigned w = 1; w <= 32; ++w) {
        const auto p = random_permutation(w, 7);
        EXPECT_NO_THROW(validate_permutation(p));
        EXPECT_EQ(p, random_permutation(w, 7));
    }
    EXPECT_NE(random_permutation(16, 1), random_permutation(16, 2));
}

TEST(IdealSource, ReproducibleAndMasked) {
    IdealSource a(42, 5);
    IdealSource b(42, 5);
    for (int i = 0; i < 1000; ++i) {
        const auto w = a.step();
        ASSERT_EQ(w, b.step());
        ASSERT_LT(w, 32u);
    }
}

TEST(UniformBelow, CoversRangeEvenly) {
    IdealSource src(3);
    std::vector<int> hist(25, 0);
    const int n = 250000;
    for (int i = 0; i < n; ++i) ++hist[uniform_below(src, 25)];
    for (int h : hist) EXPECT_NEAR(h, n / 25, 5 * std::sqrt(n / 25.0));
    EXPECT_THROW(uniform_below(src, 0), std::invalid_argument);
}

TEST(ReplaySource, ReplaysAndExhausts) {
    const std::vector<std::uint32_t> words{3, 1, 2};
    ReplaySource r(words, 2);
    EXPECT_EQ(r.step(), 3u);
    EXPECT_EQ(r.step(), 1u);
    EXPECT_EQ(r.step(), 2u);
    EXPECT_THROW(r.step(), std::out_of_range);
}

TEST(DeriveSeed, PathSensitive) {
    EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
    EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
    EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
}

}  // namespace
}  // namespace scsim
