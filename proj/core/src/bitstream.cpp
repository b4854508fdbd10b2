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

#include "scsim/bitstream.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace scsim {

Bitstream::Bitstream(std::size_t length, Encoding encoding)
    : words_(word_count(length), 0), length_(length), encoding_(encoding) {
    if (length == 0) {
        throw std::invalid_argument("bitstream length must be positive");
    }
}

Bitstream Bitstream::zeros(std::size_t length, Encoding encoding) {
    return Bitstream(length, encoding);
}

Bitstream Bitstream::ones(std::size_t length, Encoding encoding) {
    Bitstream s(length, encoding);
    for (auto& w : s.words_) w = ~std::uint64_t{0};
    s.mask_tail();
    return s;
}

Bitstream Bitstream::from_bits(std::span<const std::uint8_t> bits, Encoding encoding) {
    Bitstream s(bits.size(), encoding);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) s.words_[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    return s;
}

Bitstream Bitstream::from_words(std::vector<std::uint64_t> words, std::size_t length,
                                Encoding encoding, std::optional<GroupId> group) {
    if (words.size() != word_count(length)) {
        throw std::invalid_argument("word buffer size " + std::to_string(words.size()) +
                                    " does not match length " + std::to_string(length));
    }
    Bitstream s(length, encoding);
    s.words_ = std::move(words);
    s.group_ = group;
    s.mask_tail();
    return s;
}

void Bitstream::mask_tail() {
    const std::size_t rem = length_ % 64;
    if (rem != 0) words_.back() &= (std::uint64_t{1} << rem) - 1;
}

bool Bitstream::bit(std::size_t i) const {
    if (i >= length_) throw std::out_of_range("bit index past end of stream");
    return (words_[i / 64] >> (i % 64)) & 1U;
}

std::size_t Bitstream::ones_count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::vector<std::uint8_t> Bitstream::to_bits() const {
    std::vector<std::uint8_t> out(length_);
    for (std::size_t i = 0; i < length_; ++i) out[i] = (words_[i / 64] >> (i % 64)) & 1U;
    return out;
}

Bitstream Bitstream::complement() const {
    Bitstream s = *this;
    for (auto& w : s.words_) w = ~w;
    s.mask_tail();
    return s;
}

Bitstream Bitstream::relabeled(Encoding encoding) const {
    Bitstream s = *this;
    s.encoding_ = encoding;
    return s;
}

Bitstream Bitstream::in_group(std::optional<GroupId> group) const {
    Bitstream s = *this;
    s.group_ = group;
    return s;
}

double decode_count(std::size_t ones, std::size_t length, Encoding encoding) {
    const auto k = static_cast<double>(length);
    const auto n = static_cast<double>(ones);
    return encoding == Encoding::Unipolar ? n / k : (2.0 * n - k) / k;
}

double decode(const Bitstream& stream) {
    return decode_count(stream.ones_count(), stream.length(), stream.encoding());
}

namespace {

void require_compatible(const Bitstream& a, const Bitstream& b, const char* op) {
    if (a.length() != b.length()) {
        throw std::invalid_argument(std::string(op) + ": length mismatch (" +
                                    std::to_string(a.length()) + " vs " +
                                    std::to_string(b.length()) + ")");
    }
    if (a.encoding() != b.encoding()) {
        throw std::invalid_argument(std::string(op) + ": encoding mismatch");
    }
}

template <typename Op>
Bitstream combine(const Bitstream& a, const Bitstream& b, Op op) {
    const auto wa = a.words();
    const auto wb = b.words();
    std::vector<std::uint64_t> out(wa.size());
    for (std::size_t i = 0; i < wa.size(); ++i) out[i] = op(wa[i], wb[i]);
    const auto group = a.group() == b.group() ? a.group() : std::nullopt;
    return Bitstream::from_words(std::move(out), a.length(), a.encoding(), group);
}

}  // namespace

Bitstream and_mul(const Bitstream& a, const Bitstream& b) {
    require_compatible(a, b, "and_mul");
    if (a.encoding() != Encoding::Unipolar) {
        throw std::invalid_argument("and_mul: operands must be unipolar");
    }
    return combine(a, b, [](std::uint64_t x, std::uint64_t y) { return x & y; });
}

Bitstream xnor_mul(const Bitstream& a, const Bitstream& b) {
    require_compatible(a, b, "xnor_mul");
    if (a.encoding() != Encoding::Bipolar) {
        throw std::invalid_argument("xnor_mul: operands must be bipolar");
    }
    return combine(a, b, [](std::uint64_t x, std::uint64_t y) { return ~(x ^ y); });
}

Bitstream or_combine(const Bitstream& a, const Bitstream& b) {
    require_compatible(a, b, "or_combine");
    return combine(a, b, [](std::uint64_t x, std::uint64_t y) { return x | y; });
}

}  // namespace scsim
