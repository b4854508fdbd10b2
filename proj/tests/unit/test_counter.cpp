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
#include <random>

#include "scsim/counter.hpp"
#include "test_util.hpp"

namespace scsim {
namespace {

// Counts 64 vectors at once and compares each lane against popcount.
void expect_lanes_match(const ApcTree& tree, const std::vector<std::uint64_t>& lanes) {
    std::vector<std::uint64_t> planes(tree.output_width());
    tree.count_lanes(lanes, planes);
    for (unsigned l = 0; l < 64; ++l) {
        unsigned want = 0;
        for (auto w : lanes) want += static_cast<unsigned>((w >> l) & 1U);
        unsigned got = 0;
        for (unsigned j = 0; j < planes.size(); ++j) got |= static_cast<unsigned>((planes[j] >> l) & 1U) << j;
        ASSERT_EQ(got, want) << "n=" << tree.n_inputs() << " lane " << l;
    }
}

void exhaustive(const ApcTree& tree) {
    const std::size_t n = tree.n_inputs();
    const std::uint64_t total = std::uint64_t{1} << n;
    std::vector<std::uint64_t> lanes(n);
    for (std::uint64_t base = 0; base < total; base += 64) {
        std::fill(lanes.begin(), lanes.end(), 0);
        for (std::uint64_t l = 0; l < 64; ++l) {
            const std::uint64_t v = (base + l) % total;  // small n wraps around
            for (std::size_t i = 0; i < n; ++i) lanes[i] |= ((v >> i) & 1U) << l;
        }
        expect_lanes_match(tree, lanes);
    }
}

TEST(FullAdder, TruthTableIsAddition) {
    for (int v = 0; v < 8; ++v) {
        const bool a = v & 1, b = v & 2, c = v & 4;
        const FullAdderResult r = full_add(a, b, c);
        EXPECT_EQ(2 * r.carry + r.sum, a + b + c);
    }
    EXPECT_EQ(full_add(false, false, false), (FullAdderResult{false, false}));
    EXPECT_EQ(full_add(true, true, false), (FullAdderResult{false, true}));
}

TEST(Apc, FifteenInputCorners) {
    ApcTree tree(15);
    EXPECT_EQ(tree.output_width(), 4u);
    EXPECT_EQ(apc_count(tree, std::vector<std::uint8_t>(15, 0)), 0u);
    EXPECT_EQ(apc_count(tree, std::vector<std::uint8_t>(15, 1)), 15u);
}

TEST(Apc, FifteenInputExhaustive) { exhaustive(ApcTree(15)); }

TEST(Apc, SmallTreesExhaustive) {
    for (std::size_t n = 1; n <= 20; ++n) {
        ApcTree tree(n);
        EXPECT_EQ(tree.output_width(), static_cast<unsigned>(std::bit_width(n)));
        exhaustive(tree);
    }
}

TEST(Apc, TwentyFiveInputSampled) {
    const ApcTree& tree = mac_apc();
    ASSERT_EQ(tree.n_inputs(), 25u);
    std::mt19937_64 rng(2024);
    std::vector<std::uint64_t> lanes(25);
    for (int batch = 0; batch < 1000; ++batch) {
        for (auto& w : lanes) w = rng();
        expect_lanes_match(tree, lanes);
    }
    for (std::size_t i = 0; i < 25; ++i) {
        std::vector<std::uint8_t> one(25, 0);
        std::vector<std::uint8_t> all_but(25, 1);
        one[i] = 1;
        all_but[i] = 0;
        EXPECT_EQ(apc_count(tree, one), 1u);
        EXPECT_EQ(apc_count(tree, all_but), 24u);
    }
}

TEST(Apc, LargeTreesSampled) {
    std::mt19937_64 rng(7);
    for (std::size_t n : {21, 25, 31, 32, 33, 50, 63, 64, 100, 255, 256}) {
        ApcTree tree(n);
        std::vector<std::uint64_t> lanes(n);
        for (int batch = 0; batch < 50; ++batch) {
            for (auto& w : lanes) w = rng() & rng();  // skew toward sparse inputs as well
            expect_lanes_match(tree, lanes);
            for (auto& w : lanes) w = rng();
            expect_lanes_match(tree, lanes);
        }
        std::fill(lanes.begin(), lanes.end(), ~std::uint64_t{0});
        expect_lanes_match(tree, lanes);
    }
}

TEST(Apc, GateReportIsPureAdderNetwork) {
    ApcTree tree(15);
    const GateCount g = apc_gate_count(tree, "apc15");
    EXPECT_EQ(g.block, "apc15");
    EXPECT_EQ(g.fa_count, tree.fa_count());
    EXPECT_EQ(g.ha_count, tree.ha_count());
    EXPECT_EQ(g.inverter_count, 0u);
    EXPECT_EQ(tree.fa_count() + tree.ha_count(), tree.cell_count());
    EXPECT_GT(tree.fa_count(), 0u);
}

TEST(Apc, FaultIsDetected) {
    ApcTree tree(15);
    const ApcTree bad = tree.with_fault(0);
    unsigned mismatches = 0;
    for (std::uint32_t v = 0; v < (1u << 15); v += 97) {
        std::vector<std::uint8_t> in(15);
        for (unsigned i = 0; i < 15; ++i) in[i] = (v >> i) & 1U;
        mismatches += apc_count(bad, in) != static_cast<unsigned>(std::popcount(v)) ? 1 : 0;
    }
    EXPECT_GT(mismatches, 0u);
    EXPECT_THROW(tree.with_fault(tree.cell_count()), std::out_of_range);
}

TEST(Apc, RejectsWrongArity) {
    EXPECT_THROW(ApcTree(0), std::invalid_argument);
    EXPECT_THROW(apc_count(ApcTree(5), std::vector<std::uint8_t>(4, 0)), std::invalid_argument);
}

TEST(AdderTree, BypassAndSum) {
    const std::vector<std::uint64_t> one{9};
    EXPECT_EQ(adder_tree_sum({1, true}, one), 9u);
    const std::vector<std::uint64_t> four{3, 7, 0, 5};
    EXPECT_EQ(adder_tree_sum({4, false}, four), 15u);
}

TEST(AdderTree, RandomSumsExact) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 10000; ++t) {
        const std::size_t fan_in = std::size_t{1} << (rng() % 6);
        std::vector<std::uint64_t> c(fan_in);
        std::uint64_t want = 0;
        for (auto& v : c) want += (v = rng() % 1000);
        ASSERT_EQ(adder_tree_sum({fan_in, false}, c), want);
    }
}

TEST(AdderTree, RejectsBadShapes) {
    const std::vector<std::uint64_t> three{1, 2, 3};
    EXPECT_THROW(adder_tree_sum({3, false}, three), std::invalid_argument);
    EXPECT_THROW(adder_tree_sum({4, false}, three), std::invalid_argument);
    EXPECT_THROW(adder_tree_sum({2, true}, three), std::invalid_argument);
}

TEST(S2b, CountsOnes) {
    const StochasticCount c = s2b(Bitstream::ones(32, Encoding::Unipolar));
    EXPECT_EQ(c.ones, 32u);
    EXPECT_EQ(c.value(), 1.0);
    std::vector<std::uint8_t> half(32, 0);
    for (int i = 0; i < 16; ++i) half[2 * i] = 1;
    EXPECT_EQ(s2b(Bitstream::from_bits(half, Encoding::Bipolar)).value(), 0.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Bitstream s = test::stream_of(0.37, 100 + seed, seed);
        EXPECT_EQ(s2b(s).value(), decode(s));
    }
}

TEST(B2s, EndpointsAreConstant) {
    IdealSource src(4);
    EXPECT_EQ(b2s(0, 25, 500, src).ones_count(), 0u);
    EXPECT_EQ(b2s(25, 25, 500, src).ones_count(), 500u);
    EXPECT_THROW(b2s(26, 25, 10, src), std::invalid_argument);
    EXPECT_THROW(b2s(0, 0, 10, src), std::invalid_argument);
}

TEST(B2s, ConvergesToRatio) {
    const std::size_t k = 4096;
    IdealSource src(5);
    const double v = s2b(b2s(13, 25, k, src)).value();
    EXPECT_NEAR(v, 13.0 / 25.0, 3 * test::unipolar_sigma(13.0 / 25.0, k));
}

}  // namespace
}  // namespace scsim
