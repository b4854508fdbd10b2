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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scsim/network.hpp"
#include "scsim/pcc.hpp"

namespace scsim::cli {

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitUsage = 2 };

constexpr std::uint64_t kDefaultSeed = 0x5C2024;
constexpr const char* kOutputDirEnv = "SCSIM_OUTPUT_DIR";

struct RunConfig {
    std::uint64_t seed = kDefaultSeed;
    std::filesystem::path out_dir = ".";

    // verify-lemma1, pcc-curves
    unsigned n_min = 3;
    unsigned n_max = 10;
    std::optional<std::uint32_t> corrupt_mask;  // replaces the inverter mask (negative control)

    // apc-check
    std::size_t apc_inputs = 25;
    std::size_t apc_samples = 1'000'000;
    std::optional<std::size_t> fault_cell;

    // infer, sweep, arch-report
    std::filesystem::path model = "data/toy_model.json";
    std::filesystem::path images = "data/mnist-eval-images-idx3-ubyte";
    std::filesystem::path labels = "data/mnist-eval-labels-idx1-ubyte";
    std::filesystem::path csv;  // CSV dataset; replaces images/labels when set
    std::size_t limit = 1000;
    std::vector<std::size_t> k_values{8, 16, 32, 64, 128};
    std::vector<unsigned> n_bits_values{8};
    std::size_t repeats = 1;
    PccKind pcc = PccKind::Comparator;
    SourceKind source = SourceKind::Ideal;

    // arch-report
    std::size_t ch_min = 1;
    std::size_t ch_max = 16;
    std::vector<std::filesystem::path> profiles;  // empty: built-in FinFET and RFET
    double bandwidth = 224.0;
    std::size_t arch_k = 32;
    unsigned arch_n_bits = 8;
};

/// Applies a JSON object of RunConfig fields (same names as the flags).
void apply_config_json(RunConfig& config, const std::filesystem::path& path);

std::string seed_hex(std::uint64_t seed);

int cmd_verify_lemma1(const RunConfig& config, std::ostream& log);
int cmd_pcc_curves(const RunConfig& config, std::ostream& log);
int cmd_apc_check(const RunConfig& config, std::ostream& log);
int cmd_infer(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);
int cmd_arch_report(const RunConfig& config, std::ostream& log);

/// Loads the dataset named by @p config, truncated to config.limit images.
Dataset load_dataset(const RunConfig& config, const Shape& shape);

}  // namespace scsim::cli
