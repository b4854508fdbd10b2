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
#include <optional>
#include <span>
#include <vector>

namespace scsim {

enum class Encoding { Unipolar, Bipolar };

/// Identifies streams generated from one shared random sequence.
using GroupId = std::uint64_t;

/**
 * @brief Immutable stochastic bitstream.
 *
 * Bit i is the value emitted in clock cycle i. Bits are packed LSB-first into
 * 64-bit words; bits past length() in the last word are always zero.
 *
 * A stream may carry a correlation group tag. Streams sharing a tag were
 * produced against the same per-cycle random sequence, which is what makes
 * OR behave as an exact maximum.
 */
class Bitstream {
public:
    Bitstream(std::size_t length, Encoding encoding);

    static Bitstream zeros(std::size_t length, Encoding encoding);
    static Bitstream ones(std::size_t length, Encoding encoding);
    static Bitstream from_bits(std::span<const std::uint8_t> bits, Encoding encoding);
    static Bitstream from_words(std::vector<std::uint64_t> words, std::size_t length,
                                Encoding encoding, std::optional<GroupId> group = std::nullopt);

    std::size_t length() const { return length_; }
    Encoding encoding() const { return encoding_; }
    std::optional<GroupId> group() const { return group_; }

    bool bit(std::size_t i) const;
    std::size_t ones_count() const;
    std::span<const std::uint64_t> words() const { return words_; }
    std::vector<std::uint8_t> to_bits() const;

    Bitstream complement() const;
    /// Same bits, different interpretation (e.g. a unipolar PCC output read as bipolar).
    Bitstream relabeled(Encoding encoding) const;
    Bitstream in_group(std::optional<GroupId> group) const;

    static constexpr std::size_t word_count(std::size_t length) { return (length + 63) / 64; }

    friend bool operator==(const Bitstream&, const Bitstream&) = default;

private:
    std::vector<std::uint64_t> words_;
    std::size_t length_ = 0;
    Encoding encoding_ = Encoding::Unipolar;
    std::optional<GroupId> group_;

    void mask_tail();
};

/// Unipolar: ones/k. Bipolar: (2*ones - k)/k.
double decode(const Bitstream& stream);
double decode_count(std::size_t ones, std::size_t length, Encoding encoding);

/// Unipolar multiply. Both inputs must be unipolar and of equal length.
Bitstream and_mul(const Bitstream& a, const Bitstream& b);
/// Bipolar multiply. Both inputs must be bipolar and of equal length.
Bitstream xnor_mul(const Bitstream& a, const Bitstream& b);
/// Bitwise OR; an adder for independent streams, a max for correlated ones.
Bitstream or_combine(const Bitstream& a, const Bitstream& b);

}  // namespace scsim
