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

#include "scsim/rns.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace scsim {

namespace {

void check_polynomial(const Polynomial& poly) {
    if (poly.degree < kMinLfsrWidth || poly.degree > kMaxLfsrWidth) {
        throw std::invalid_argument("LFSR width " + std::to_string(poly.degree) +
                                    " outside [3, 16]");
    }
    if ((poly.mask >> poly.degree) != 1U || (poly.mask & 1U) == 0) {
        throw std::invalid_argument("polynomial mask must contain x^n and 1 and nothing above x^n");
    }
}

}  // namespace

PolynomialTable::PolynomialTable() {
    // x^3+x^2+1, x^4+x^3+1, ..., x^16+x^15+x^13+x^4+1
    constexpr std::array<std::uint32_t, 14> masks = {
        0xD,    0x19,   0x29,   0x61,   0xC1,   0x171,  0x221,
        0x481,  0xA01,  0x1C11, 0x3901, 0x7005, 0xC001, 0x1A011,
    };
    for (unsigned n = kMinLfsrWidth; n <= kMaxLfsrWidth; ++n) {
        entries_[n] = Polynomial{n, masks[n - kMinLfsrWidth]};
    }
}

const Polynomial& PolynomialTable::at(unsigned width) const {
    auto it = entries_.find(width);
    if (it == entries_.end()) {
        throw std::out_of_range("no polynomial for width " + std::to_string(width));
    }
    return it->second;
}

void PolynomialTable::set(Polynomial poly) {
    check_polynomial(poly);
    entries_[poly.degree] = poly;
}

std::vector<Polynomial> PolynomialTable::entries() const {
    std::vector<Polynomial> out;
    for (const auto& [w, p] : entries_) out.push_back(p);
    return out;
}

const PolynomialTable& default_polynomials() {
    static const PolynomialTable table;
    return table;
}

Lfsr::Lfsr(Polynomial poly, std::uint32_t seed) : poly_(poly), state_(seed) {
    check_polynomial(poly);
    const std::uint32_t full = (std::uint32_t{1} << poly.degree) - 1;
    if (seed == 0) throw std::invalid_argument("LFSR seed must be nonzero");
    if (seed > full) throw std::invalid_argument("LFSR seed wider than register");
    taps_ = poly.mask & full;
}

Lfsr::Lfsr(unsigned width, std::uint32_t seed) : Lfsr(default_polynomials().at(width), seed) {}

std::uint32_t Lfsr::step() {
    const std::uint32_t feedback = std::popcount(state_ & taps_) & 1U;
    state_ = (state_ >> 1) | (feedback << (poly_.degree - 1));
    return state_;
}

std::uint64_t period(const Lfsr& lfsr) {
    Lfsr probe = lfsr;
    const std::uint32_t start = probe.state();
    const std::uint64_t limit = std::uint64_t{1} << lfsr.width();
    std::uint64_t n = 0;
    do {
        probe.step();
        ++n;
    } while (probe.state() != start && n <= limit);
    return n;
}

bool is_maximal(const Polynomial& poly) {
    return period(Lfsr(poly, 1)) == (std::uint64_t{1} << poly.degree) - 1;
}

void validate_permutation(std::span<const unsigned> perm) {
    std::vector<bool> seen(perm.size(), false);
    for (unsigned p : perm) {
        if (p >= perm.size() || seen[p]) {
            throw std::invalid_argument("permutation is not a bijection on bit positions");
        }
        seen[p] = true;
    }
}

std::uint32_t permute_bits(std::uint32_t word, std::span<const unsigned> perm) {
    std::uint32_t out = 0;
    for (unsigned j = 0; j < perm.size(); ++j) out |= ((word >> perm[j]) & 1U) << j;
    return out;
}

std::vector<unsigned> random_permutation(unsigned width, std::uint64_t seed) {
    if (width == 0 || width > 32) throw std::invalid_argument("permutation width must be 1..32");
    std::vector<unsigned> p = identity_permutation(width);
    IdealSource rng(seed);
    for (unsigned i = width - 1; i > 0; --i) std::swap(p[i], p[uniform_below(rng, i + 1)]);
    return p;
}

SharedSource::SharedSource(Lfsr base, std::vector<unsigned> permutation)
    : base_(std::move(base)), perm_(std::move(permutation)) {
    if (perm_.size() != base_.width()) {
        throw std::invalid_argument("permutation size must equal LFSR width");
    }
    validate_permutation(perm_);
}

std::uint32_t SharedSource::step() { return permute_bits(base_.step(), perm_); }

std::vector<unsigned> identity_permutation(unsigned width) {
    std::vector<unsigned> p(width);
    for (unsigned i = 0; i < width; ++i) p[i] = i;
    return p;
}

IdealSource::IdealSource(std::uint64_t seed, unsigned width) : engine_(seed), width_(width) {
    if (width == 0 || width > 32) throw std::invalid_argument("IdealSource width must be 1..32");
}

std::uint32_t IdealSource::step() {
    const std::uint64_t w = engine_();
    return static_cast<std::uint32_t>(width_ == 32 ? (w & 0xFFFFFFFFULL)
                                                   : (w & ((std::uint64_t{1} << width_) - 1)));
}

std::vector<std::uint32_t> draw_words(RandomSource& source, std::size_t count) {
    std::vector<std::uint32_t> out(count);
    for (auto& w : out) w = source.step();
    return out;
}

ReplaySource::ReplaySource(std::span<const std::uint32_t> words, unsigned width)
    : words_(words), width_(width) {}

std::uint32_t ReplaySource::step() {
    if (pos_ >= words_.size()) throw std::out_of_range("replay source exhausted");
    return words_[pos_++];
}

std::uint32_t uniform_below(RandomSource& source, std::uint32_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    if (bound == 1) return 0;
    const unsigned bits = static_cast<unsigned>(std::bit_width(bound - 1));
    if (bits > source.width()) {
        throw std::invalid_argument("uniform_below: source width " +
                                    std::to_string(source.width()) + " < " +
                                    std::to_string(bits) + " bits required");
    }
    const std::uint32_t mask = bits == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << bits) - 1;
    for (;;) {
        const std::uint32_t r = source.step() & mask;
        if (r < bound) return r;
    }
}

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
    // splitmix64 finalizer chained over the path
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    std::uint64_t s = mix(root);
    for (auto p : path) s = mix(s ^ mix(p + 0x632BE59BD9B4E019ULL));
    return s;
}

}  // namespace scsim
