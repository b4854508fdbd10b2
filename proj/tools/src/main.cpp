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

#include <cstdlib>
#include <cstring>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scsim_cli/commands.hpp"

using namespace scsim;
using namespace scsim::cli;

namespace {

std::uint64_t parse_u64(const std::string& s) {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(s, &used, 0);
    if (used != s.size()) throw std::invalid_argument("not an integer: " + s);
    return v;
}

// The config file is applied before the other flags are parsed so that flags win.
std::optional<std::string> find_config(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
        if (std::strncmp(argv[i], "--config=", 9) == 0) return std::string(argv[i] + 9);
    }
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig config;
    try {
        if (auto path = find_config(argc, argv)) apply_config_json(config, *path);
        if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') config.out_dir = env;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    CLI::App app{"Stochastic-computing neural network simulator"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    std::string config_path;
    std::string seed;
    std::string pcc;
    std::string source;
    std::string corrupt_mask;
    app.add_option("--config", config_path, "JSON file of default option values (flags override it)");
    app.add_option("--seed", seed, "Root seed, decimal or 0x-hex (default " + seed_hex(kDefaultSeed) + ")");
    app.add_option("--out", config.out_dir, std::string("Output directory (env ") + kOutputDirEnv + ")");

    auto* lemma = app.add_subcommand("verify-lemma1", "Check the NAND-NOR chain against its recurrence for every N, X");
    auto* curves = app.add_subcommand("pcc-curves", "Conversion curves of the three PCCs");
    for (auto* sub : {lemma, curves}) {
        sub->add_option("--n-min", config.n_min, "Smallest precision N");
        sub->add_option("--n-max", config.n_max, "Largest precision N");
    }
    lemma->add_option("--corrupt-mask", corrupt_mask)->group("");

    auto* apc = app.add_subcommand("apc-check", "Compare the adder-network APC with popcount");
    apc->add_option("--inputs", config.apc_inputs, "Counter inputs (exhaustive up to 16)");
    apc->add_option("--samples", config.apc_samples, "Random vectors when sampling");
    apc->add_option("--fault-cell", config.fault_cell)->group("");

    auto* infer = app.add_subcommand("infer", "Per-image SC and fixed-point predictions (first k and n_bits)");
    auto* sweep = app.add_subcommand("sweep", "Accuracy over bitstream lengths and precisions");
    auto* arch = app.add_subcommand("arch-report", "Area, latency and energy over channel counts");
    for (auto* sub : {infer, sweep, arch}) sub->add_option("--model", config.model, "Model JSON");
    for (auto* sub : {infer, sweep}) {
        sub->add_option("--images", config.images, "IDX image file");
        sub->add_option("--labels", config.labels, "IDX label file");
        sub->add_option("--csv", config.csv, "CSV dataset (label first); replaces --images/--labels");
        sub->add_option("--limit", config.limit, "Evaluate at most this many images");
        sub->add_option("--k", config.k_values, "Bitstream lengths")->delimiter(',');
        sub->add_option("--n-bits", config.n_bits_values, "Operand precisions")->delimiter(',');
        sub->add_option("--pcc", pcc, "comparator, mux_chain or nandnor_chain");
        sub->add_option("--source", source, "ideal or lfsr");
    }
    sweep->add_option("--repeats", config.repeats, "Seeds per (k, n_bits)");
    arch->add_option("--ch-min", config.ch_min, "Smallest channel count");
    arch->add_option("--ch-max", config.ch_max, "Largest channel count");
    arch->add_option("--profile", config.profiles, "Technology profile JSON (repeatable)");
    arch->add_option("--bandwidth", config.bandwidth, "Memory bandwidth in bytes/ns");
    arch->add_option("--k", config.arch_k, "Bitstream length");
    arch->add_option("--n-bits", config.arch_n_bits, "Operand precision");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (!seed.empty()) config.seed = parse_u64(seed);
        if (!pcc.empty()) config.pcc = parse_pcc_kind(pcc);
        if (!source.empty()) {
            if (source != "ideal" && source != "lfsr") throw std::invalid_argument("source must be ideal or lfsr");
            config.source = source == "lfsr" ? SourceKind::Lfsr : SourceKind::Ideal;
        }
        if (!corrupt_mask.empty()) config.corrupt_mask = static_cast<std::uint32_t>(parse_u64(corrupt_mask));

        std::cout << "seed " << seed_hex(config.seed) << '\n';
        if (lemma->parsed()) return cmd_verify_lemma1(config, std::cout);
        if (curves->parsed()) return cmd_pcc_curves(config, std::cout);
        if (apc->parsed()) return cmd_apc_check(config, std::cout);
        if (infer->parsed()) return cmd_infer(config, std::cout);
        if (sweep->parsed()) return cmd_sweep(config, std::cout);
        return cmd_arch_report(config, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
