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
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "scsim/network.hpp"

namespace scsim {

struct AcceleratorConfig {
    std::size_t channels = 8;
    std::size_t macs_per_channel = 16;
    std::size_t multipliers_per_mac = 25;
    double tau_ns = 1.0;  // clock period
    unsigned n_bits = 8;
    std::size_t k = 32;

    void validate() const;
    std::size_t macs() const { return channels * macs_per_channel; }
};

struct MemoryModel {
    double bandwidth_bytes_per_ns = 224.0;

    void validate() const;
};

/// Operand bytes for one neuron evaluation: 25 weights plus 25 activations.
double bytes_per_neuron(unsigned n_bits, std::size_t multipliers_per_mac = 25);

struct LayerWorkload {
    std::string name;
    std::size_t n_neurons = 1;  // 25-input MAC invocations
    double bytes_per_neuron = 50.0;
};

/// Neurons whose operands the memory can deliver per clock; at least 1.
std::size_t mem_cover(const LayerWorkload& layer, const MemoryModel& mem, double tau_ns);

enum class PipelineMode { NonPipelined, PartiallyPipelined, FullyPipelined };
std::string to_string(PipelineMode mode);

struct PipelinePlan {
    PipelineMode mode = PipelineMode::NonPipelined;
    std::size_t n_onchip = 0;
    std::size_t n_memcover = 0;
    std::size_t n_parallel = 0;
    std::size_t incycle_pipe = 0;  // 0 when not pipelined
    std::size_t cycle = 0;         // on-chip batches, ceil(n_neurons / n_onchip)
    std::uint64_t cycles = 0;      // D_layer / tau
    double delay_ns = 0.0;
};

/// Pipeline decision for explicit on-chip and memory-covered neuron counts.
PipelinePlan plan_pipeline(std::size_t n_neurons, std::size_t n_onchip, std::size_t n_memcover,
                           std::size_t k, double tau_ns = 1.0);
PipelinePlan plan_pipeline(const LayerWorkload& layer, const AcceleratorConfig& config,
                           const MemoryModel& mem);

/// One workload per conv/FC layer; n_neurons counts every 25-input group.
std::vector<LayerWorkload> network_workloads(const QuantizedModel& model, unsigned n_bits);
std::vector<LayerWorkload> network_workloads(const FloatModel& model, unsigned n_bits);

double network_latency_ns(std::span<const LayerWorkload> layers, const AcceleratorConfig& config,
                          const MemoryModel& mem);
double network_latency_ns(const QuantizedModel& model, const AcceleratorConfig& config,
                          const MemoryModel& mem);

struct BlockCost {
    double area_um2 = 0.0;
    double delay_ps = 0.0;
    double energy_fJ = 0.0;
};

struct Scaling {
    double area = 1.0;
    double delay = 1.0;
    double power = 1.0;
};

/// Required blocks: "pcc" (one n-bit PCC), "apc" (25-input), "channel" (16 MACs
/// plus local adder tree; delay is the minimum clock period, energy per cycle).
struct TechProfile {
    std::string name;
    double supply_v = 0.0;
    double overhead_area_um2 = 0.0;  // on-chip memory and control, not replicated
    Scaling scaling;
    std::map<std::string, BlockCost> blocks;

    void validate() const;
    /// Block with the scaling factors applied; energy follows power x delay.
    BlockCost block(const std::string& name) const;
    double clock_ns() const { return block("channel").delay_ps / 1000.0; }
};

TechProfile finfet_10nm();
TechProfile rfet_10nm();
TechProfile load_profile(const std::filesystem::path& path);
void save_profile(const TechProfile& profile, const std::filesystem::path& path);

/// Relative improvement of @p candidate over @p reference, in percent.
double gain_percent(double reference, double candidate);

struct CostRollup {
    double area_um2 = 0.0;
    double pcc_area_um2 = 0.0;
    double apc_area_um2 = 0.0;
    double other_channel_area_um2 = 0.0;
    double overhead_area_um2 = 0.0;
    double energy_pJ = 0.0;
    double clock_ns = 0.0;
};

/// Area for config.channels channels plus overhead; energy for the given
/// neuron evaluations at config.k cycles each.
CostRollup rollup_cost(const AcceleratorConfig& config, const TechProfile& profile,
                       std::span<const LayerWorkload> layers);

struct Metrics {
    double adp = 0.0;
    double edp = 0.0;
    double edap = 0.0;
};

Metrics metrics(double area, double energy, double delay);

struct SweepRow {
    std::size_t channels = 0;
    std::string profile;
    double area_um2 = 0.0;
    double latency_ns = 0.0;
    double energy_pJ = 0.0;
    Metrics m;
};

struct SweepArgmin {
    std::string profile;
    std::size_t adp = 0;
    std::size_t edp = 0;
    std::size_t edap = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;  // profile-major
    std::vector<SweepArgmin> argmin;

    const SweepRow& at(const std::string& profile, std::size_t channels) const;
};

/// Evaluates every profile at every channel count. The clock period of each
/// run is the profile's minimum clock; @p base supplies k, n_bits and MAC shape.
SweepReport channel_sweep(std::span<const LayerWorkload> layers, std::span<const std::size_t> channels,
                          std::span<const TechProfile> profiles, const MemoryModel& mem,
                          const AcceleratorConfig& base = {});

}  // namespace scsim
