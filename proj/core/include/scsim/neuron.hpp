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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scsim/bitstream.hpp"
#include "scsim/counter.hpp"
#include "scsim/pcc.hpp"
#include "scsim/rns.hpp"

namespace scsim {

/// Multipliers per MAC unit, and the fan-in of its APC.
constexpr std::size_t kMacFanIn = 25;

/// The B2S stage compares 2*count against r in [0, 50); this is b2s(count, 25)
/// at double resolution so that the bipolar zero (count 12.5) is an exact threshold.
constexpr std::uint32_t kB2sRange = 2 * kMacFanIn;

/// Signed n-bit code q in [-2^{n-1}, 2^{n-1}) to its PCC word q + 2^{n-1}.
std::uint32_t bipolar_word(std::int32_t code, unsigned n_bits);
/// Value of a signed n-bit code: q / 2^{n-1}.
double bipolar_value(std::int32_t code, unsigned n_bits);

/// Fixed bit order in which multiplier @p tap reads the shared per-cycle word
/// of a @p width-bit source. Taps read different wirings of one RNG so that
/// their streams are close to independent.
const std::vector<unsigned>& tap_permutation(std::size_t tap, unsigned width);
/// The shared word sequence as seen by multiplier @p tap.
std::vector<std::uint32_t> tap_words(std::span<const std::uint32_t> words, std::size_t tap, unsigned width);

/// Per-cycle B2S thresholds drawn once and shared by every neuron in a group.
class B2sThresholds {
public:
    B2sThresholds(RandomSource& source, std::size_t k, GroupId group);

    std::size_t length() const { return r_.size(); }
    GroupId group() const { return group_; }
    std::uint32_t at(std::size_t t) const { return r_[t]; }
    /// Bit planes of r for 64-cycle word @p w (6 planes, LSB first).
    std::span<const std::uint64_t> planes(std::size_t w) const;

    /// Stream of 1s where (2 * count) > r, for a count fixed over all cycles.
    Bitstream constant(std::uint32_t doubled_count) const;
    /// The correlated bipolar zero: 1 iff 25 > r.
    Bitstream zero() const { return constant(kMacFanIn); }

private:
    static constexpr unsigned kPlanes = 6;
    std::vector<std::uint32_t> r_;
    std::vector<std::uint64_t> planes_;
    GroupId group_;
};

/// XNOR the pairs and count the ones through the 25-input APC.
unsigned mac_cycle(std::span<const std::uint8_t> act_bits, std::span<const std::uint8_t> weight_bits);

/**
 * Multiplies @p acts by @p weights pairwise with XNOR, counts each cycle with
 * the 25-input APC and converts each cycle's count to one bit with the shared
 * thresholds. Unused multipliers must be fed a pair of independent bipolar-zero
 * streams so that they contribute zero on average.
 *
 * Result is bipolar and belongs to the thresholds' correlation group.
 */
Bitstream mac_stream(std::span<const Bitstream* const> acts, std::span<const Bitstream* const> weights,
                     const B2sThresholds& thresholds);

struct ScNeuron {
    std::array<std::int32_t, kMacFanIn> activations{};
    std::array<std::int32_t, kMacFanIn> weights{};
    unsigned n_bits = 8;
    PccSpec activation_pcc{PccKind::Comparator, 8};
    PccSpec weight_pcc{PccKind::Comparator, 8};
    std::size_t k = 32;

    void validate() const;
};

/// Dot-product model the neuron converges to: sum(a_i w_i) / 25.
double neuron_expected(const ScNeuron& neuron);

struct NeuronOutput {
    Bitstream value;
    Bitstream zero;
};

/**
 * Runs the neuron for k cycles. All activations share one word from
 * @p source_a per cycle and all weights one word from @p source_w, each
 * multiplier reading its tap_permutation of it; B2S thresholds come from
 * @p source_b2s.
 */
Bitstream neuron_forward(const ScNeuron& neuron, RandomSource& source_a, RandomSource& source_w,
                         RandomSource& source_b2s, GroupId group = 0);
/// As neuron_forward, also returning the zero reference of the output group.
NeuronOutput neuron_forward_correlated(const ScNeuron& neuron, RandomSource& source_a,
                                       RandomSource& source_w, RandomSource& source_b2s,
                                       GroupId group = 0);

/// OR with a correlated bipolar-zero stream; max(x, 0).
Bitstream relu(const Bitstream& x, const Bitstream& zero);
/// OR over streams of one correlation group; their maximum.
Bitstream max_pool(std::span<const Bitstream> streams);
Bitstream max_pool(std::span<const Bitstream* const> streams);

}  // namespace scsim
