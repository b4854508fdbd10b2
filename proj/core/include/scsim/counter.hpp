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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scsim/bitstream.hpp"
#include "scsim/rns.hpp"

namespace scsim {

struct FullAdderResult {
    bool sum = false;
    bool carry = false;

    friend bool operator==(const FullAdderResult&, const FullAdderResult&) = default;
};

/// XOR3 sum and MAJ3 carry.
FullAdderResult full_add(bool a, bool b, bool cin);

/**
 * @brief Accumulative parallel counter built from full and half adders.
 *
 * The network is generated by layered column compression: every column is
 * reduced three wires at a time by full adders, and a column holding exactly
 * two wires gets a half adder. Compression stops when each column holds at
 * most one wire; those wires are the binary output, LSB first.
 *
 * Evaluation is bit-sliced: each input is a 64-bit lane word, so one call
 * counts 64 independent input vectors (64 clock cycles of a stream).
 */
class ApcTree {
public:
    explicit ApcTree(std::size_t n_inputs);

    std::size_t n_inputs() const { return n_inputs_; }
    /// ceil(log2(n_inputs + 1)).
    unsigned output_width() const { return static_cast<unsigned>(outputs_.size()); }
    std::size_t fa_count() const { return fa_count_; }
    std::size_t ha_count() const { return ha_count_; }
    std::size_t stages() const { return stages_; }
    std::size_t cell_count() const { return cells_.size(); }

    /// @p planes receives output_width() words; plane j holds bit j of each lane's count.
    void count_lanes(std::span<const std::uint64_t> inputs, std::span<std::uint64_t> planes) const;

    /// A copy with the sum output of @p cell inverted. Negative control only.
    ApcTree with_fault(std::size_t cell) const;

private:
    enum class CellKind : std::uint8_t { Full, Half };
    struct Cell {
        CellKind kind;
        std::uint32_t a, b, c;
        std::uint32_t sum, carry;
    };

    std::size_t n_inputs_;
    std::size_t wire_count_ = 0;
    std::size_t fa_count_ = 0;
    std::size_t ha_count_ = 0;
    std::size_t stages_ = 0;
    std::vector<Cell> cells_;
    std::vector<std::uint32_t> outputs_;
    std::vector<std::uint64_t> fault_;
};

/// Population count of @p inputs (one byte per input, 0 or 1), through the adder network.
unsigned apc_count(const ApcTree& tree, std::span<const std::uint8_t> inputs);

/// Shared 25-input counter of the MAC unit.
const ApcTree& mac_apc();

struct AdderTreeSpec {
    std::size_t fan_in = 1;
    bool bypass = false;

    void validate() const;
};

/// Pairwise reduction of binary counts; bypass passes a single input through.
std::uint64_t adder_tree_sum(const AdderTreeSpec& spec, std::span<const std::uint64_t> counts);

/// S2B output kept exact: the ones count over k cycles.
struct StochasticCount {
    std::uint64_t ones = 0;
    std::uint64_t length = 1;
    Encoding encoding = Encoding::Unipolar;

    double value() const { return decode_count(ones, length, encoding); }
};

StochasticCount s2b(const Bitstream& stream);

/// One B2S output bit: 1 iff count > r, with r uniform over [0, max_count).
inline bool b2s_bit(std::uint64_t count, std::uint32_t r) { return count > r; }

/// Constant-count B2S conversion over k cycles.
Bitstream b2s(std::uint64_t count, std::uint64_t max_count, std::size_t k, RandomSource& source);

struct GateCount {
    std::string block;
    std::size_t fa_count = 0;
    std::size_t ha_count = 0;
    std::size_t inverter_count = 0;
};

GateCount apc_gate_count(const ApcTree& tree, const std::string& name);
/// X-path inverters from the insertion rule plus the output and R-path inverters.
GateCount nandnor_pcc_gate_count(unsigned precision);
/// A pairwise tree of ripple adders; counts full adders for @p input_bits wide leaves.
GateCount adder_tree_gate_count(std::size_t fan_in, unsigned input_bits);

}  // namespace scsim
