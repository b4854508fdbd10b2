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

#include "scsim/pcc.hpp"

#include <cmath>
#include <stdexcept>

namespace scsim {

std::string_view to_string(PccKind kind) {
    switch (kind) {
        case PccKind::Comparator: return "comparator";
        case PccKind::MuxChain: return "mux_chain";
        case PccKind::NandNorChain: return "nandnor_chain";
    }
    return "?";
}

PccKind parse_pcc_kind(std::string_view name) {
    if (name == "comparator" || name == "cmp") return PccKind::Comparator;
    if (name == "mux_chain" || name == "mux") return PccKind::MuxChain;
    if (name == "nandnor_chain" || name == "nandnor") return PccKind::NandNorChain;
    throw std::invalid_argument("unknown PCC kind '" + std::string(name) + "'");
}

void PccSpec::validate() const {
    if (precision < 1 || precision > kMaxPrecision) {
        throw std::invalid_argument("PCC precision " + std::to_string(precision) +
                                    " outside [1, 16]");
    }
}

bool cmp_bit(std::uint32_t x, std::uint32_t r) { return x > r; }

bool mux_chain_bit(std::uint32_t x, std::uint32_t r, unsigned n) {
    bool out = false;
    for (unsigned i = 0; i < n; ++i) {
        const bool ri = (r >> i) & 1U;
        out = ((x >> i) & 1U) ? (out || ri) : (out && !ri);
    }
    return out;
}

double mux_chain_probability(std::uint32_t x, unsigned n) {
    return std::ldexp(static_cast<double>(x), -static_cast<int>(n));
}

std::uint32_t inverter_mask(unsigned n) {
    if (n < 1) throw std::invalid_argument("inverter_mask: N must be >= 1");
    // even N -> stages 2,4,..  (bits 1,3,..); odd N -> stages 1,3,.. (bits 0,2,..)
    const std::uint32_t pattern = (n % 2 == 0) ? 0xAAAAAAAAU : 0x55555555U;
    const std::uint32_t width = n >= 32 ? ~0U : ((std::uint32_t{1} << n) - 1);
    return pattern & width;
}

bool nandnor_stage(bool prev, bool r, bool program) {
    return program ? !(prev || r) : !(prev && r);
}

bool nandnor_chain_bit(std::uint32_t x, std::uint32_t r, unsigned n, std::uint32_t mask) {
    const std::uint32_t program = x ^ mask;
    bool out = false;
    for (unsigned i = 0; i < n; ++i) {
        out = nandnor_stage(out, (r >> i) & 1U, (program >> i) & 1U);
    }
    return out;
}

bool nandnor_chain_bit(std::uint32_t x, std::uint32_t r, unsigned n) {
    return nandnor_chain_bit(x, r, n, inverter_mask(n));
}

ChainState nandnor_chain_state(std::uint32_t x, unsigned n, std::uint32_t mask) {
    ChainState st;
    st.select_nand.reserve(n);
    st.constant.reserve(n);
    st.mean.reserve(n);
    double m = 0.0;
    for (unsigned i = 0; i < n; ++i) {
        const int program = static_cast<int>(((x ^ mask) >> i) & 1U);
        const int s = 1 - program;
        const double c = 0.5 * (1.0 + s);
        m = -0.5 * m + c;
        st.select_nand.push_back(s);
        st.constant.push_back(c);
        st.mean.push_back(m);
    }
    return st;
}

double nandnor_expected(std::uint32_t x, unsigned n, std::uint32_t mask) {
    return nandnor_chain_state(x, n, mask).mean.back();
}

double nandnor_expected(std::uint32_t x, unsigned n) {
    return nandnor_expected(x, n, inverter_mask(n));
}

std::int64_t nandnor_expected_scaled(std::uint32_t x, unsigned n, std::uint32_t mask) {
    // M_i = 2^i m_i  =>  M_i = -M_{i-1} + 2^i c_i, and 2^i c_i is 2^i (NAND) or 2^{i-1} (NOR).
    std::int64_t scaled = 0;
    for (unsigned i = 1; i <= n; ++i) {
        const bool nor = (((x ^ mask) >> (i - 1)) & 1U) != 0;
        scaled = -scaled + (nor ? (std::int64_t{1} << (i - 1)) : (std::int64_t{1} << i));
    }
    return scaled;
}

double nandnor_constant(unsigned n) {
    // Stage i contributes (-1/2)^{N-i} c_i. With the inverter rule the X-free
    // part of c_i is 1/2 on inverted stages and 1 elsewhere.
    const std::uint32_t mask = inverter_mask(n);
    double a = 0.0;
    for (unsigned i = 1; i <= n; ++i) {
        const double weight = std::pow(-0.5, static_cast<double>(n - i));
        a += weight * (((mask >> (i - 1)) & 1U) ? 0.5 : 1.0);
    }
    return a;
}

double nandnor_coefficient(unsigned k, unsigned n) {
    return std::ldexp(1.0, static_cast<int>(k) - 1 - static_cast<int>(n));
}

double nandnor_closed_form(std::uint32_t x, unsigned n) {
    double m = nandnor_constant(n);
    for (unsigned k = 1; k <= n; ++k) {
        if ((x >> (k - 1)) & 1U) m += nandnor_coefficient(k, n);
    }
    return m;
}

std::uint64_t enumerate_nandnor_ones(std::uint32_t x, unsigned n, std::uint32_t mask) {
    std::uint64_t ones = 0;
    const std::uint32_t total = std::uint32_t{1} << n;
    for (std::uint32_t r = 0; r < total; ++r) ones += nandnor_chain_bit(x, r, n, mask) ? 1 : 0;
    return ones;
}

bool pcc_bit(const PccSpec& spec, std::uint32_t x, std::uint32_t r) {
    const std::uint32_t low = spec.precision >= 32 ? r : r & ((std::uint32_t{1} << spec.precision) - 1);
    switch (spec.kind) {
        case PccKind::Comparator: return cmp_bit(x, low);
        case PccKind::MuxChain: return mux_chain_bit(x, low, spec.precision);
        case PccKind::NandNorChain: return nandnor_chain_bit(x, low, spec.precision);
    }
    return false;
}

std::uint64_t enumerate_ones(const PccSpec& spec, std::uint32_t x) {
    spec.validate();
    std::uint64_t ones = 0;
    const std::uint32_t total = std::uint32_t{1} << spec.precision;
    for (std::uint32_t r = 0; r < total; ++r) ones += pcc_bit(spec, x, r) ? 1 : 0;
    return ones;
}

double pcc_expected(const PccSpec& spec, std::uint32_t x) {
    switch (spec.kind) {
        case PccKind::Comparator:
        case PccKind::MuxChain: return mux_chain_probability(x, spec.precision);
        case PccKind::NandNorChain: return nandnor_expected(x, spec.precision);
    }
    return 0.0;
}

namespace {

void check_input(const PccSpec& spec, std::uint32_t x) {
    spec.validate();
    if (x >= (std::uint32_t{1} << spec.precision)) {
        throw std::invalid_argument("PCC input " + std::to_string(x) + " does not fit in " +
                                    std::to_string(spec.precision) + " bits");
    }
}

}  // namespace

Bitstream generate_stream(const PccSpec& spec, std::uint32_t x,
                          std::span<const std::uint32_t> words) {
    check_input(spec, x);
    std::vector<std::uint64_t> packed(Bitstream::word_count(words.size()), 0);
    for (std::size_t t = 0; t < words.size(); ++t) {
        if (pcc_bit(spec, x, words[t])) packed[t / 64] |= std::uint64_t{1} << (t % 64);
    }
    return Bitstream::from_words(std::move(packed), words.size(), Encoding::Unipolar);
}

Bitstream generate_stream(const PccSpec& spec, std::uint32_t x, std::size_t k,
                          RandomSource& source) {
    check_input(spec, x);
    if (source.width() < spec.precision) {
        throw std::invalid_argument("random source width " + std::to_string(source.width()) +
                                    " is narrower than PCC precision " +
                                    std::to_string(spec.precision));
    }
    const auto words = draw_words(source, k);
    return generate_stream(spec, x, words);
}

std::vector<CurvePoint> conversion_curve(const PccSpec& spec) {
    spec.validate();
    std::vector<CurvePoint> rows;
    const std::uint32_t total = std::uint32_t{1} << spec.precision;
    rows.reserve(total);
    for (std::uint32_t x = 0; x < total; ++x) {
        rows.push_back({spec.precision, spec.kind, x, pcc_expected(spec, x)});
    }
    return rows;
}

}  // namespace scsim
