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
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

namespace scsim {

/// Per-cycle random word supplier. Bit 0 of each word is the output tap and
/// feeds R_1 of a chain PCC; bit i feeds R_{i+1}.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual unsigned width() const = 0;
    virtual std::uint32_t step() = 0;
};

constexpr unsigned kMinLfsrWidth = 3;
constexpr unsigned kMaxLfsrWidth = 16;

/// Feedback polynomial as a coefficient mask: bit e set means an x^e term.
/// The x^n and constant terms must both be present.
struct Polynomial {
    unsigned degree = 0;
    std::uint32_t mask = 0;
};

/// One primitive polynomial per width; defaults can be overridden from config.
class PolynomialTable {
public:
    PolynomialTable();

    const Polynomial& at(unsigned width) const;
    void set(Polynomial poly);
    std::vector<Polynomial> entries() const;

private:
    std::map<unsigned, Polynomial> entries_;
};

const PolynomialTable& default_polynomials();

/**
 * Fibonacci LFSR. Each step shifts the register right by one; the XOR of the
 * tapped bits enters at bit n-1. Bit j of the register holds s_{t+j}, so the
 * tap set is exactly the polynomial's lower-order terms.
 */
class Lfsr final : public RandomSource {
public:
    Lfsr(Polynomial poly, std::uint32_t seed);
    /// Uses the default table entry for @p width.
    Lfsr(unsigned width, std::uint32_t seed);

    unsigned width() const override { return poly_.degree; }
    std::uint32_t step() override;

    std::uint32_t state() const { return state_; }
    const Polynomial& polynomial() const { return poly_; }

private:
    Polynomial poly_;
    std::uint32_t taps_;
    std::uint32_t state_;
};

/// Number of steps before the state returns to its current value.
std::uint64_t period(const Lfsr& lfsr);

/// True iff the polynomial drives a maximal-length (2^n - 1) sequence.
bool is_maximal(const Polynomial& poly);

/// An LFSR whose output bits are reordered; output bit j = base bit perm[j].
class SharedSource final : public RandomSource {
public:
    SharedSource(Lfsr base, std::vector<unsigned> permutation);

    unsigned width() const override { return base_.width(); }
    std::uint32_t step() override;

private:
    Lfsr base_;
    std::vector<unsigned> perm_;
};

std::vector<unsigned> identity_permutation(unsigned width);
/// Throws unless @p perm is a bijection on [0, perm.size()).
void validate_permutation(std::span<const unsigned> perm);
/// Output bit j = word bit perm[j]; bits beyond perm.size() are dropped.
std::uint32_t permute_bits(std::uint32_t word, std::span<const unsigned> perm);
/// Fisher-Yates shuffle of the bit positions, reproducible from @p seed.
std::vector<unsigned> random_permutation(unsigned width, std::uint64_t seed);

/// Seeded uniform source standing in for ideal independent Bernoulli bits.
class IdealSource final : public RandomSource {
public:
    explicit IdealSource(std::uint64_t seed, unsigned width = 32);

    unsigned width() const override { return width_; }
    std::uint32_t step() override;

private:
    std::mt19937_64 engine_;
    unsigned width_;
};

/// Records @p count consecutive words.
std::vector<std::uint32_t> draw_words(RandomSource& source, std::size_t count);

/// Replays a recorded word sequence; lets several generators share one sequence.
class ReplaySource final : public RandomSource {
public:
    ReplaySource(std::span<const std::uint32_t> words, unsigned width);

    unsigned width() const override { return width_; }
    std::uint32_t step() override;

private:
    std::span<const std::uint32_t> words_;
    unsigned width_;
    std::size_t pos_ = 0;
};

/// Uniform integer in [0, bound), by rejection on the low ceil(log2 bound) bits.
std::uint32_t uniform_below(RandomSource& source, std::uint32_t bound);

/// Deterministic child seed from a root seed and a path of indices.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path);

}  // namespace scsim
