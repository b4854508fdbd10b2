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

#include "scsim/accel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace scsim {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

void AcceleratorConfig::validate() const {
    if (macs_per_channel == 0 || multipliers_per_mac == 0) {
        throw std::invalid_argument("accelerator MAC shape must be positive");
    }
    if (!(tau_ns > 0.0) || !std::isfinite(tau_ns)) throw std::invalid_argument("clock period must be positive");
    if (n_bits == 0) throw std::invalid_argument("precision must be positive");
    if (k == 0) throw std::invalid_argument("bitstream length must be positive");
}

void MemoryModel::validate() const {
    if (!(bandwidth_bytes_per_ns > 0.0) || !std::isfinite(bandwidth_bytes_per_ns)) {
        throw std::invalid_argument("memory bandwidth must be positive");
    }
}

double bytes_per_neuron(unsigned n_bits, std::size_t multipliers_per_mac) {
    return 2.0 * static_cast<double>(multipliers_per_mac) * n_bits / 8.0;
}

std::size_t mem_cover(const LayerWorkload& layer, const MemoryModel& mem, double tau_ns) {
    mem.validate();
    if (!(layer.bytes_per_neuron > 0.0)) throw std::invalid_argument("bytes per neuron must be positive");
    if (!(tau_ns > 0.0)) throw std::invalid_argument("clock period must be positive");
    const double n = std::floor(mem.bandwidth_bytes_per_ns * tau_ns / layer.bytes_per_neuron);
    return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

std::string to_string(PipelineMode mode) {
    switch (mode) {
        case PipelineMode::NonPipelined: return "none";
        case PipelineMode::PartiallyPipelined: return "partial";
        case PipelineMode::FullyPipelined: return "full";
    }
    return "?";
}

PipelinePlan plan_pipeline(std::size_t n_neurons, std::size_t n_onchip, std::size_t n_memcover,
                           std::size_t k, double tau_ns) {
    if (n_neurons == 0 || n_onchip == 0 || n_memcover == 0 || k == 0) {
        throw std::invalid_argument("plan_pipeline: counts must be positive");
    }
    PipelinePlan p;
    p.n_onchip = n_onchip;
    p.n_memcover = n_memcover;
    p.cycle = ceil_div(n_neurons, n_onchip);
    if (n_onchip < n_memcover) {
        p.mode = PipelineMode::NonPipelined;
        p.n_parallel = n_onchip;
        p.cycles = static_cast<std::uint64_t>(p.cycle) * k;
    } else {
        p.incycle_pipe = ceil_div(n_onchip, n_memcover);
        p.n_parallel = n_memcover;
        if (p.incycle_pipe < k) {
            p.mode = PipelineMode::PartiallyPipelined;
            p.cycles = static_cast<std::uint64_t>(p.cycle) * (k + 1) + p.incycle_pipe - 1;
        } else {
            // Loading is the bottleneck: one memory-covered slice enters per
            // clock and the last slice drains k cycles later.
            p.mode = PipelineMode::FullyPipelined;
            p.cycles = ceil_div(n_neurons, n_memcover) + k;
        }
    }
    p.delay_ns = static_cast<double>(p.cycles) * tau_ns;
    return p;
}

PipelinePlan plan_pipeline(const LayerWorkload& layer, const AcceleratorConfig& config,
                           const MemoryModel& mem) {
    config.validate();
    if (layer.n_neurons == 0) throw std::invalid_argument("layer workload has no neurons");
    // With zero channels nothing is on chip; the layer cannot run.
    if (config.channels == 0) throw std::invalid_argument("plan_pipeline: zero channels");
    const std::size_t n_onchip = std::min(config.macs(), layer.n_neurons);
    return plan_pipeline(layer.n_neurons, n_onchip, mem_cover(layer, mem, config.tau_ns), config.k,
                         config.tau_ns);
}

namespace {

template <typename Layers>
std::vector<LayerWorkload> workloads_of(const Shape& input, const Layers& layers, unsigned n_bits) {
    std::vector<LayerWorkload> out;
    Shape cur = input;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& s = layers[i].spec;
        const Shape next = output_shape(s, cur);
        if (s.is_linear()) {
            const std::string kind = s.kind == LayerKind::Conv ? "conv" : "fc";
            out.push_back({kind + std::to_string(i), next.size() * groups_per_output(s, cur),
                           bytes_per_neuron(n_bits)});
        }
        cur = next;
    }
    return out;
}

}  // namespace

std::vector<LayerWorkload> network_workloads(const QuantizedModel& model, unsigned n_bits) {
    return workloads_of(model.input, model.layers, n_bits);
}

std::vector<LayerWorkload> network_workloads(const FloatModel& model, unsigned n_bits) {
    model.validate();
    return workloads_of(model.input, model.layers, n_bits);
}

double network_latency_ns(std::span<const LayerWorkload> layers, const AcceleratorConfig& config,
                          const MemoryModel& mem) {
    double total = 0.0;
    for (const auto& l : layers) total += plan_pipeline(l, config, mem).delay_ns;
    return total;
}

double network_latency_ns(const QuantizedModel& model, const AcceleratorConfig& config,
                          const MemoryModel& mem) {
    const auto layers = network_workloads(model, config.n_bits);
    return network_latency_ns(layers, config, mem);
}

// ---------------------------------------------------------------------------
// Technology profiles

void TechProfile::validate() const {
    if (name.empty()) throw std::invalid_argument("profile needs a name");
    if (!(supply_v > 0.0)) throw std::invalid_argument("profile " + name + ": supply voltage must be positive");
    if (overhead_area_um2 < 0.0) throw std::invalid_argument("profile " + name + ": negative overhead area");
    if (!(scaling.area > 0.0 && scaling.delay > 0.0 && scaling.power > 0.0)) {
        throw std::invalid_argument("profile " + name + ": scaling factors must be positive");
    }
    for (const char* b : {"pcc", "apc", "channel"}) {
        const auto it = blocks.find(b);
        if (it == blocks.end()) throw std::invalid_argument("profile " + name + ": missing block '" + b + "'");
        const BlockCost& c = it->second;
        if (!(c.area_um2 > 0.0 && c.delay_ps > 0.0 && c.energy_fJ > 0.0)) {
            throw std::invalid_argument("profile " + name + ": block '" + b + "' has non-positive entries");
        }
    }
}

BlockCost TechProfile::block(const std::string& block_name) const {
    const auto it = blocks.find(block_name);
    if (it == blocks.end()) throw std::out_of_range("profile " + name + " has no block '" + block_name + "'");
    BlockCost c = it->second;
    c.area_um2 *= scaling.area;
    c.delay_ps *= scaling.delay;
    c.energy_fJ *= scaling.power * scaling.delay;
    return c;
}

// Synthesized 10 nm figures: 8-bit PCC, 25-input APC, one 16-MAC channel.
// The overheads are the remainder of the 8-channel chip area after the channels.
TechProfile finfet_10nm() {
    TechProfile p;
    p.name = "FinFET-10nm";
    p.supply_v = 0.7;
    p.overhead_area_um2 = 299000.0 - 8 * 2475.0;
    p.blocks["pcc"] = {2.21, 242.0, 4.11};
    p.blocks["apc"] = {24.37, 462.0, 40.14};
    p.blocks["channel"] = {2475.0, 950.0, 4300.0};
    return p;
}

TechProfile rfet_10nm() {
    TechProfile p;
    p.name = "RFET-10nm";
    p.supply_v = 0.85;
    p.overhead_area_um2 = 288000.0 - 8 * 2359.0;
    p.blocks["pcc"] = {2.01, 142.0, 2.89};
    p.blocks["apc"] = {26.15, 593.0, 35.88};
    p.blocks["channel"] = {2359.0, 880.0, 3070.0};
    return p;
}

TechProfile load_profile(const std::filesystem::path& path) {
    using nlohmann::json;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile " + path.string());
    try {
        json j;
        in >> j;
        TechProfile p;
        p.name = j.at("name").get<std::string>();
        p.supply_v = j.at("supply_v").get<double>();
        p.overhead_area_um2 = j.value("overhead_area_um2", 0.0);
        if (j.contains("scaling")) {
            const auto& s = j.at("scaling");
            p.scaling = {s.value("area", 1.0), s.value("delay", 1.0), s.value("power", 1.0)};
        }
        for (const auto& [name, b] : j.at("blocks").items()) {
            p.blocks[name] = {b.at("area_um2").get<double>(), b.at("delay_ps").get<double>(),
                              b.at("energy_fJ").get<double>()};
        }
        p.validate();
        return p;
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void save_profile(const TechProfile& profile, const std::filesystem::path& path) {
    using nlohmann::json;
    profile.validate();
    json j;
    j["name"] = profile.name;
    j["supply_v"] = profile.supply_v;
    j["overhead_area_um2"] = profile.overhead_area_um2;
    j["scaling"] = {{"area", profile.scaling.area},
                    {"delay", profile.scaling.delay},
                    {"power", profile.scaling.power}};
    for (const auto& [name, b] : profile.blocks) {
        j["blocks"][name] = {{"area_um2", b.area_um2}, {"delay_ps", b.delay_ps}, {"energy_fJ", b.energy_fJ}};
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

double gain_percent(double reference, double candidate) {
    if (reference == 0.0) throw std::invalid_argument("gain relative to zero");
    return (reference - candidate) / reference * 100.0;
}

CostRollup rollup_cost(const AcceleratorConfig& config, const TechProfile& profile,
                       std::span<const LayerWorkload> layers) {
    config.validate();
    profile.validate();
    const BlockCost channel = profile.block("channel");
    const BlockCost pcc = profile.block("pcc");
    const BlockCost apc = profile.block("apc");
    const auto c = static_cast<double>(config.channels);
    const auto macs = static_cast<double>(config.macs_per_channel);

    CostRollup r;
    r.overhead_area_um2 = profile.overhead_area_um2 * profile.scaling.area;
    // Each MAC has one PCC per multiplier operand and one APC.
    r.pcc_area_um2 = c * macs * 2.0 * static_cast<double>(config.multipliers_per_mac) * pcc.area_um2;
    r.apc_area_um2 = c * macs * apc.area_um2;
    r.other_channel_area_um2 = std::max(0.0, c * channel.area_um2 - r.pcc_area_um2 - r.apc_area_um2);
    r.area_um2 = c * channel.area_um2 + r.overhead_area_um2;
    r.clock_ns = channel.delay_ps / 1000.0;

    // Channel energy is per clock with all MACs busy; charge it per neuron-cycle.
    double neuron_cycles = 0.0;
    for (const auto& l : layers) neuron_cycles += static_cast<double>(l.n_neurons) * static_cast<double>(config.k);
    r.energy_pJ = neuron_cycles * channel.energy_fJ / 1000.0 / macs;
    return r;
}

Metrics metrics(double area, double energy, double delay) {
    if (!(area > 0.0 && energy > 0.0 && delay > 0.0)) {
        throw std::invalid_argument("metrics: inputs must be positive");
    }
    return {area * delay, energy * delay, energy * delay * area};
}

const SweepRow& SweepReport::at(const std::string& profile, std::size_t channels) const {
    for (const auto& r : rows) {
        if (r.profile == profile && r.channels == channels) return r;
    }
    throw std::out_of_range("no sweep row for " + profile + " at " + std::to_string(channels) + " channels");
}

SweepReport channel_sweep(std::span<const LayerWorkload> layers, std::span<const std::size_t> channels,
                          std::span<const TechProfile> profiles, const MemoryModel& mem,
                          const AcceleratorConfig& base) {
    if (channels.empty()) throw std::invalid_argument("channel sweep range is empty");
    if (profiles.empty()) throw std::invalid_argument("channel sweep needs a profile");
    if (layers.empty()) throw std::invalid_argument("channel sweep needs at least one layer");
    SweepReport report;
    for (const auto& profile : profiles) {
        SweepArgmin best{profile.name, 0, 0, 0};
        Metrics lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()};
        for (std::size_t c : channels) {
            AcceleratorConfig cfg = base;
            cfg.channels = c;
            cfg.tau_ns = profile.clock_ns();
            const CostRollup cost = rollup_cost(cfg, profile, layers);
            SweepRow row{c, profile.name, cost.area_um2, network_latency_ns(layers, cfg, mem), cost.energy_pJ, {}};
            row.m = metrics(row.area_um2, row.energy_pJ, row.latency_ns);
            if (row.m.adp < lo.adp) lo.adp = row.m.adp, best.adp = c;
            if (row.m.edp < lo.edp) lo.edp = row.m.edp, best.edp = c;
            if (row.m.edap < lo.edap) lo.edap = row.m.edap, best.edap = c;
            report.rows.push_back(row);
        }
        report.argmin.push_back(best);
    }
    return report;
}

}  // namespace scsim
