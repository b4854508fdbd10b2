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

#include "scsim/counter.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "scsim/pcc.hpp"

namespace scsim {

FullAdderResult full_add(bool a, bool b, bool cin) {
    return {static_cast<bool>(a ^ b ^ cin), (a && b) || (a && cin) || (b && cin)};
}

ApcTree::ApcTree(std::size_t n_inputs) : n_inputs_(n_inputs) {
    if (n_inputs == 0) throw std::invalid_argument("APC needs at least one input");

    // Carries into columns at or above bit_width(n) are always 0: any 1 there
    // would make the weighted wire sum exceed n. They are left unconnected.
    const auto width = static_cast<std::size_t>(std::bit_width(n_inputs));
    std::vector<std::vector<std::uint32_t>> columns(1);
    for (std::size_t i = 0; i < n_inputs; ++i) columns[0].push_back(static_cast<std::uint32_t>(i));
    wire_count_ = n_inputs;

    auto new_wire = [this] { return static_cast<std::uint32_t>(wire_count_++); };
    auto needs_work = [&] {
        return std::any_of(columns.begin(), columns.end(),
                           [](const auto& c) { return c.size() > 1; });
    };

    while (needs_work()) {
        std::vector<std::vector<std::uint32_t>> next(std::min(columns.size() + 1, width));
        auto carry_to = [&](std::size_t col, std::uint32_t wire) {
            if (col + 1 < width) next[col + 1].push_back(wire);
        };
        for (std::size_t col = 0; col < columns.size(); ++col) {
            const auto& wires = columns[col];
            std::size_t i = 0;
            for (; i + 3 <= wires.size(); i += 3) {
                const Cell cell{CellKind::Full, wires[i], wires[i + 1], wires[i + 2], new_wire(),
                                new_wire()};
                cells_.push_back(cell);
                next[col].push_back(cell.sum);
                carry_to(col, cell.carry);
                ++fa_count_;
            }
            const std::size_t rest = wires.size() - i;
            if (rest == 2 && wires.size() == 2) {
                const Cell cell{CellKind::Half, wires[i], wires[i + 1], 0, new_wire(), new_wire()};
                cells_.push_back(cell);
                next[col].push_back(cell.sum);
                carry_to(col, cell.carry);
                ++ha_count_;
            } else {
                for (; i < wires.size(); ++i) next[col].push_back(wires[i]);
            }
        }
        while (!next.empty() && next.back().empty()) next.pop_back();
        columns = std::move(next);
        ++stages_;
    }

    outputs_.assign(width, UINT32_MAX);
    for (std::size_t col = 0; col < columns.size(); ++col) {
        if (!columns[col].empty()) outputs_[col] = columns[col][0];
    }
    fault_.assign(cells_.size(), 0);
}

void ApcTree::count_lanes(std::span<const std::uint64_t> inputs,
                          std::span<std::uint64_t> planes) const {
    if (inputs.size() != n_inputs_) {
        throw std::invalid_argument("APC expects " + std::to_string(n_inputs_) + " inputs, got " +
                                    std::to_string(inputs.size()));
    }
    if (planes.size() < outputs_.size()) throw std::invalid_argument("APC output span too small");

    // Small fixed-size trees dominate; keep the wire buffer on the stack when possible.
    std::uint64_t local[256];
    std::vector<std::uint64_t> heap;
    std::uint64_t* w = local;
    if (wire_count_ > 256) {
        heap.resize(wire_count_);
        w = heap.data();
    }
    std::copy(inputs.begin(), inputs.end(), w);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const Cell& c = cells_[i];
        const std::uint64_t a = w[c.a];
        const std::uint64_t b = w[c.b];
        if (c.kind == CellKind::Full) {
            const std::uint64_t cin = w[c.c];
            const std::uint64_t ab = a ^ b;
            w[c.sum] = (ab ^ cin) ^ fault_[i];
            w[c.carry] = (a & b) | (cin & ab);
        } else {
            w[c.sum] = (a ^ b) ^ fault_[i];
            w[c.carry] = a & b;
        }
    }
    for (std::size_t j = 0; j < outputs_.size(); ++j) {
        planes[j] = outputs_[j] == UINT32_MAX ? 0 : w[outputs_[j]];
    }
}

ApcTree ApcTree::with_fault(std::size_t cell) const {
    if (cell >= cells_.size()) throw std::out_of_range("fault cell index out of range");
    ApcTree t = *this;
    t.fault_[cell] = ~std::uint64_t{0};
    return t;
}

unsigned apc_count(const ApcTree& tree, std::span<const std::uint8_t> inputs) {
    if (inputs.size() != tree.n_inputs()) {
        throw std::invalid_argument("apc_count: expected " + std::to_string(tree.n_inputs()) +
                                    " inputs, got " + std::to_string(inputs.size()));
    }
    std::vector<std::uint64_t> lanes(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) lanes[i] = inputs[i] ? 1U : 0U;
    std::uint64_t planes[64];
    tree.count_lanes(lanes, std::span(planes, tree.output_width()));
    unsigned count = 0;
    for (unsigned j = 0; j < tree.output_width(); ++j) count |= static_cast<unsigned>(planes[j] & 1U) << j;
    return count;
}

const ApcTree& mac_apc() {
    static const ApcTree tree(25);
    return tree;
}

void AdderTreeSpec::validate() const {
    if (bypass) {
        if (fan_in != 1) throw std::invalid_argument("bypassed adder tree takes exactly one input");
        return;
    }
    if (fan_in == 0 || !std::has_single_bit(fan_in)) {
        throw std::invalid_argument("adder tree fan-in must be a power of two");
    }
}

std::uint64_t adder_tree_sum(const AdderTreeSpec& spec, std::span<const std::uint64_t> counts) {
    spec.validate();
    if (counts.size() != spec.fan_in) {
        throw std::invalid_argument("adder tree expects " + std::to_string(spec.fan_in) +
                                    " inputs, got " + std::to_string(counts.size()));
    }
    if (spec.bypass) return counts[0];
    std::vector<std::uint64_t> level(counts.begin(), counts.end());
    while (level.size() > 1) {
        std::vector<std::uint64_t> up(level.size() / 2);
        for (std::size_t i = 0; i < up.size(); ++i) up[i] = level[2 * i] + level[2 * i + 1];
        level = std::move(up);
    }
    return level[0];
}

StochasticCount s2b(const Bitstream& stream) {
    return {stream.ones_count(), stream.length(), stream.encoding()};
}

Bitstream b2s(std::uint64_t count, std::uint64_t max_count, std::size_t k, RandomSource& source) {
    if (max_count == 0 || max_count > UINT32_MAX) throw std::invalid_argument("b2s: bad max_count");
    if (count > max_count) {
        throw std::invalid_argument("b2s: count " + std::to_string(count) + " exceeds max_count " +
                                    std::to_string(max_count));
    }
    std::vector<std::uint64_t> words(Bitstream::word_count(k), 0);
    for (std::size_t t = 0; t < k; ++t) {
        const auto r = uniform_below(source, static_cast<std::uint32_t>(max_count));
        if (b2s_bit(count, r)) words[t / 64] |= std::uint64_t{1} << (t % 64);
    }
    return Bitstream::from_words(std::move(words), k, Encoding::Unipolar);
}

GateCount apc_gate_count(const ApcTree& tree, const std::string& name) {
    return {name, tree.fa_count(), tree.ha_count(), 0};
}

GateCount nandnor_pcc_gate_count(unsigned precision) {
    const auto x_path = static_cast<std::size_t>(std::popcount(inverter_mask(precision)));
    return {"nandnor_pcc" + std::to_string(precision), 0, 0, x_path + 2};
}

GateCount adder_tree_gate_count(std::size_t fan_in, unsigned input_bits) {
    AdderTreeSpec{fan_in, false}.validate();
    GateCount g{"adder_tree" + std::to_string(fan_in), 0, 0, 0};
    unsigned width = input_bits;
    for (std::size_t adders = fan_in / 2; adders >= 1; adders /= 2, ++width) {
        g.ha_count += adders;
        g.fa_count += adders * (width - 1);
    }
    return g;
}

}  // namespace scsim
