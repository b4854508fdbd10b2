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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scsim/bitstream.hpp"
#include "scsim/rns.hpp"

namespace scsim {

enum class PccKind { Comparator, MuxChain, NandNorChain };

std::string_view to_string(PccKind kind);
PccKind parse_pcc_kind(std::string_view name);

constexpr unsigned kMaxPrecision = 16;

/// A probability conversion circuit of @c precision bits.
struct PccSpec {
    PccKind kind = PccKind::Comparator;
    unsigned precision = 8;

    void validate() const;
};

// Bit conventions: X_1 is the least-significant bit of X. R_i is bit (i-1) of
// the random word. Stage masks use bit (i-1) for stage i.

/// Comparator PCC: 1 iff X > R.
bool cmp_bit(std::uint32_t x, std::uint32_t r);

/// MUX chain from a grounded input: stage i ANDs with ~R_i when X_i = 0, ORs R_i when X_i = 1.
bool mux_chain_bit(std::uint32_t x, std::uint32_t r, unsigned n);

/// X / 2^N.
double mux_chain_probability(std::uint32_t x, unsigned n);

/// Stages whose X input passes through an inverter: even indices for even N,
/// odd indices for odd N.
std::uint32_t inverter_mask(unsigned n);

/// One reconfigurable stage; program 0 selects NAND, program 1 selects NOR.
bool nandnor_stage(bool prev, bool r, bool program);

/// The NAND-NOR chain from a grounded input. The program of stage i is
/// X_i XOR mask_i. @p mask defaults to inverter_mask(n); other values exist for
/// negative controls.
bool nandnor_chain_bit(std::uint32_t x, std::uint32_t r, unsigned n, std::uint32_t mask);
bool nandnor_chain_bit(std::uint32_t x, std::uint32_t r, unsigned n);

/// Stage-by-stage expectation of the NAND-NOR chain under fair, independent R_i.
struct ChainState {
    std::vector<int> select_nand;  // s_i: 1 when stage i acts as NAND
    std::vector<double> constant;  // c_i = (1 + s_i) / 2
    std::vector<double> mean;      // m_i, i = 1..N
};

ChainState nandnor_chain_state(std::uint32_t x, unsigned n, std::uint32_t mask);

/// m_N via the recurrence m_i = -m_{i-1}/2 + c_i with m_0 = 0.
double nandnor_expected(std::uint32_t x, unsigned n);
double nandnor_expected(std::uint32_t x, unsigned n, std::uint32_t mask);

/// 2^N * m_N, exact in integers.
std::int64_t nandnor_expected_scaled(std::uint32_t x, unsigned n, std::uint32_t mask);

/// X-independent term A_N of the closed form A_N + sum alpha_k X_k.
double nandnor_constant(unsigned n);
/// alpha_k = 2^{k-1} / 2^N.
double nandnor_coefficient(unsigned k, unsigned n);
/// m_N from the closed form.
double nandnor_closed_form(std::uint32_t x, unsigned n);

/// Number of ones a PCC emits over every random input: all 2^N words R
/// (comparator) or all 2^N vectors R_1..R_N (chains). Exact.
std::uint64_t enumerate_ones(const PccSpec& spec, std::uint32_t x);
std::uint64_t enumerate_nandnor_ones(std::uint32_t x, unsigned n, std::uint32_t mask);

/// Analytic mean output for uniform random input.
double pcc_expected(const PccSpec& spec, std::uint32_t x);

/// One output bit for word @p r.
bool pcc_bit(const PccSpec& spec, std::uint32_t x, std::uint32_t r);

/// k unipolar bits, one per source step. The source must be at least N bits wide.
Bitstream generate_stream(const PccSpec& spec, std::uint32_t x, std::size_t k,
                          RandomSource& source);
/// Same, over a recorded word sequence (one word per output bit).
Bitstream generate_stream(const PccSpec& spec, std::uint32_t x,
                          std::span<const std::uint32_t> words);

struct CurvePoint {
    unsigned n = 0;
    PccKind kind = PccKind::Comparator;
    std::uint32_t x = 0;
    double expected = 0.0;
};

/// Noise-free conversion curve, one row per X in [0, 2^N).
std::vector<CurvePoint> conversion_curve(const PccSpec& spec);

}  // namespace scsim
