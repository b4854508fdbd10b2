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

#include "scsim/neuron.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace scsim {

std::uint32_t bipolar_word(std::int32_t code, unsigned n_bits) {
    const std::int64_t half = std::int64_t{1} << (n_bits - 1);
    if (code < -half || code >= half) {
        throw std::invalid_argument("code " + std::to_string(code) + " outside signed " +
                                    std::to_string(n_bits) + "-bit range");
    }
    return static_cast<std::uint32_t>(code + half);
}

double bipolar_value(std::int32_t code, unsigned n_bits) {
    return std::ldexp(static_cast<double>(code), -static_cast<int>(n_bits - 1));
}

const std::vector<unsigned>& tap_permutation(std::size_t tap, unsigned width) {
    if (tap >= kMacFanIn) throw std::out_of_range("tap index " + std::to_string(tap) + " >= 25");
    if (width == 0 || width > 32) throw std::invalid_argument("tap_permutation: width must be 1..32");
    static const auto table = [] {
        std::vector<std::vector<unsigned>> t;
        for (unsigned w = 1; w <= 32; ++w) {
            for (std::size_t i = 0; i < kMacFanIn; ++i) {
                t.push_back(random_permutation(w, derive_seed(0x7A9, {w, i})));
            }
        }
        return t;
    }();
    return table[(width - 1) * kMacFanIn + tap];
}

std::vector<std::uint32_t> tap_words(std::span<const std::uint32_t> words, std::size_t tap, unsigned width) {
    const auto& perm = tap_permutation(tap, width);
    std::vector<std::uint32_t> out(words.size());
    for (std::size_t t = 0; t < words.size(); ++t) out[t] = permute_bits(words[t], perm);
    return out;
}

B2sThresholds::B2sThresholds(RandomSource& source, std::size_t k, GroupId group) : group_(group) {
    if (k == 0) throw std::invalid_argument("B2S threshold sequence needs k >= 1");
    r_.resize(k);
    for (auto& r : r_) r = uniform_below(source, kB2sRange);
    planes_.assign(Bitstream::word_count(k) * kPlanes, 0);
    for (std::size_t t = 0; t < k; ++t) {
        for (unsigned j = 0; j < kPlanes; ++j) {
            planes_[(t / 64) * kPlanes + j] |= std::uint64_t{(r_[t] >> j) & 1U} << (t % 64);
        }
    }
}

std::span<const std::uint64_t> B2sThresholds::planes(std::size_t w) const {
    return std::span(planes_).subspan(w * kPlanes, kPlanes);
}

Bitstream B2sThresholds::constant(std::uint32_t doubled_count) const {
    std::vector<std::uint64_t> words(Bitstream::word_count(r_.size()), 0);
    for (std::size_t t = 0; t < r_.size(); ++t) {
        if (doubled_count > r_[t]) words[t / 64] |= std::uint64_t{1} << (t % 64);
    }
    return Bitstream::from_words(std::move(words), r_.size(), Encoding::Bipolar, group_);
}

unsigned mac_cycle(std::span<const std::uint8_t> act_bits, std::span<const std::uint8_t> weight_bits) {
    if (act_bits.size() != kMacFanIn || weight_bits.size() != kMacFanIn) {
        throw std::invalid_argument("mac_cycle expects exactly 25 activation and 25 weight bits");
    }
    std::array<std::uint8_t, kMacFanIn> products{};
    for (std::size_t i = 0; i < kMacFanIn; ++i) {
        products[i] = (act_bits[i] & 1U) == (weight_bits[i] & 1U) ? 1 : 0;
    }
    return apc_count(mac_apc(), products);
}

Bitstream mac_stream(std::span<const Bitstream* const> acts, std::span<const Bitstream* const> weights,
                     const B2sThresholds& thresholds) {
    if (acts.size() != kMacFanIn || weights.size() != kMacFanIn) {
        throw std::invalid_argument("mac_stream: need exactly 25 activation/weight pairs");
    }
    const std::size_t k = thresholds.length();
    for (std::size_t i = 0; i < acts.size(); ++i) {
        if (acts[i]->length() != k || weights[i]->length() != k) {
            throw std::invalid_argument("mac_stream: stream length differs from thresholds");
        }
        if (acts[i]->encoding() != Encoding::Bipolar || weights[i]->encoding() != Encoding::Bipolar) {
            throw std::invalid_argument("mac_stream: XNOR products need bipolar streams");
        }
    }

    const ApcTree& apc = mac_apc();
    const unsigned width = apc.output_width();
    const std::size_t n_words = Bitstream::word_count(k);
    std::vector<std::uint64_t> out(n_words, 0);
    std::array<std::uint64_t, kMacFanIn> lanes{};
    std::array<std::uint64_t, 8> count{};

    for (std::size_t w = 0; w < n_words; ++w) {
        for (std::size_t i = 0; i < acts.size(); ++i) {
            lanes[i] = ~(acts[i]->words()[w] ^ weights[i]->words()[w]);
        }
        apc.count_lanes(lanes, std::span(count.data(), width));

        // Bit-sliced (count << 1) > r, scanned from the most significant plane.
        const auto r = thresholds.planes(w);
        std::uint64_t gt = 0;
        std::uint64_t eq = ~std::uint64_t{0};
        for (int j = static_cast<int>(r.size()) - 1; j >= 0; --j) {
            const std::uint64_t a = (j >= 1 && static_cast<unsigned>(j - 1) < width) ? count[j - 1] : 0;
            const std::uint64_t b = r[j];
            gt |= eq & a & ~b;
            eq &= ~(a ^ b);
        }
        out[w] = gt;
    }
    return Bitstream::from_words(std::move(out), k, Encoding::Bipolar, thresholds.group());
}

void ScNeuron::validate() const {
    if (n_bits < 1 || n_bits > kMaxPrecision) throw std::invalid_argument("neuron n_bits out of range");
    if (k == 0) throw std::invalid_argument("neuron bitstream length must be positive");
    activation_pcc.validate();
    weight_pcc.validate();
    if (activation_pcc.precision != n_bits || weight_pcc.precision != n_bits) {
        throw std::invalid_argument("neuron PCC precision must equal n_bits");
    }
}

double neuron_expected(const ScNeuron& neuron) {
    double dot = 0.0;
    for (std::size_t i = 0; i < kMacFanIn; ++i) {
        dot += bipolar_value(neuron.activations[i], neuron.n_bits) *
               bipolar_value(neuron.weights[i], neuron.n_bits);
    }
    return dot / static_cast<double>(kMacFanIn);
}

NeuronOutput neuron_forward_correlated(const ScNeuron& neuron, RandomSource& source_a,
                                       RandomSource& source_w, RandomSource& source_b2s,
                                       GroupId group) {
    neuron.validate();
    if (source_a.width() < neuron.n_bits || source_w.width() < neuron.n_bits) {
        throw std::invalid_argument("neuron sources narrower than n_bits");
    }
    const auto words_a = draw_words(source_a, neuron.k);
    const auto words_w = draw_words(source_w, neuron.k);
    const B2sThresholds thresholds(source_b2s, neuron.k, group);

    std::vector<Bitstream> acts;
    std::vector<Bitstream> weights;
    acts.reserve(kMacFanIn);
    weights.reserve(kMacFanIn);
    for (std::size_t i = 0; i < kMacFanIn; ++i) {
        acts.push_back(generate_stream(neuron.activation_pcc,
                                       bipolar_word(neuron.activations[i], neuron.n_bits),
                                       tap_words(words_a, i, source_a.width()))
                           .relabeled(Encoding::Bipolar));
        weights.push_back(generate_stream(neuron.weight_pcc,
                                          bipolar_word(neuron.weights[i], neuron.n_bits),
                                          tap_words(words_w, i, source_w.width()))
                              .relabeled(Encoding::Bipolar));
    }
    std::array<const Bitstream*, kMacFanIn> pa{};
    std::array<const Bitstream*, kMacFanIn> pw{};
    for (std::size_t i = 0; i < kMacFanIn; ++i) {
        pa[i] = &acts[i];
        pw[i] = &weights[i];
    }
    return {mac_stream(pa, pw, thresholds), thresholds.zero()};
}

Bitstream neuron_forward(const ScNeuron& neuron, RandomSource& source_a, RandomSource& source_w,
                         RandomSource& source_b2s, GroupId group) {
    return neuron_forward_correlated(neuron, source_a, source_w, source_b2s, group).value;
}

namespace {

void require_same_group(const Bitstream& a, const Bitstream& b, const char* op) {
    if (!a.group() || !b.group() || *a.group() != *b.group()) {
        throw std::invalid_argument(std::string(op) +
                                    ": operands are not in one correlation group");
    }
}

}  // namespace

Bitstream relu(const Bitstream& x, const Bitstream& zero) {
    if (x.encoding() != Encoding::Bipolar || zero.encoding() != Encoding::Bipolar) {
        throw std::invalid_argument("relu: operands must be bipolar");
    }
    require_same_group(x, zero, "relu");
    return or_combine(x, zero);
}

Bitstream max_pool(std::span<const Bitstream* const> streams) {
    if (streams.empty()) throw std::invalid_argument("max_pool: no streams");
    Bitstream acc = *streams[0];
    for (std::size_t i = 1; i < streams.size(); ++i) {
        require_same_group(acc, *streams[i], "max_pool");
        acc = or_combine(acc, *streams[i]);
    }
    return acc;
}

Bitstream max_pool(std::span<const Bitstream> streams) {
    std::vector<const Bitstream*> ptrs;
    ptrs.reserve(streams.size());
    for (const auto& s : streams) ptrs.push_back(&s);
    return max_pool(ptrs);
}

}  // namespace scsim
