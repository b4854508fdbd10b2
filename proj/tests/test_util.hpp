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

#include <cmath>
#include <cstdint>

#include "scsim/bitstream.hpp"
#include "scsim/pcc.hpp"
#include "scsim/rns.hpp"

namespace scsim::test {

/// Binomial standard deviation of a decoded unipolar value with mean p.
inline double unipolar_sigma(double p, std::size_t k) { return std::sqrt(p * (1 - p) / static_cast<double>(k)); }

/// Same for a bipolar value x (decoding doubles the spread).
inline double bipolar_sigma(double x, std::size_t k) { return 2 * unipolar_sigma((x + 1) / 2, k); }

/// Comparator stream of probability @p p at 16-bit resolution from an ideal source.
inline Bitstream stream_of(double p, std::size_t k, std::uint64_t seed, Encoding enc = Encoding::Unipolar) {
    IdealSource src(seed, 16);
    const auto x = static_cast<std::uint32_t>(std::lround(p * 65536.0));
    const PccSpec spec{PccKind::Comparator, 16};
    return generate_stream(spec, x > 65535 ? 65535 : x, k, src).relabeled(enc);
}

}  // namespace scsim::test
