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

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "scsim/accel.hpp"

namespace scsim {
namespace {

namespace fs = std::filesystem;

TEST(MemCover, DefaultsGiveFour) {
    EXPECT_DOUBLE_EQ(bytes_per_neuron(8), 50.0);
    const LayerWorkload l{"conv", 100, bytes_per_neuron(8)};
    EXPECT_EQ(mem_cover(l, MemoryModel{}, 1.0), 4u);
}

TEST(MemCover, ClampsToOne) {
    const LayerWorkload l{"conv", 100, 500.0};
    EXPECT_EQ(mem_cover(l, MemoryModel{224.0}, 1.0), 1u);
}

TEST(MemCover, LinearInClockPeriod) {
    const LayerWorkload l{"conv", 1, 7.0};
    for (double tau : {0.5, 1.0, 3.3}) {
        const double one = 224.0 * tau / 7.0;
        EXPECT_EQ(mem_cover(l, MemoryModel{}, tau), static_cast<std::size_t>(std::floor(one)));
        EXPECT_EQ(mem_cover(l, MemoryModel{}, 2 * tau), static_cast<std::size_t>(std::floor(2 * one)));
    }
    EXPECT_THROW(mem_cover(l, MemoryModel{0.0}, 1.0), std::invalid_argument);
}

TEST(PlanPipeline, WorkedExamples) {
    const PipelinePlan none = plan_pipeline(128, 128, 200, 32);
    EXPECT_EQ(none.mode, PipelineMode::NonPipelined);
    EXPECT_EQ(none.cycles, 32u);

    const PipelinePlan part = plan_pipeline(128, 128, 16, 32);
    EXPECT_EQ(part.mode, PipelineMode::PartiallyPipelined);
    EXPECT_EQ(part.incycle_pipe, 8u);
    EXPECT_EQ(part.cycles, 40u);

    const PipelinePlan full = plan_pipeline(128, 128, 2, 32);
    EXPECT_EQ(full.mode, PipelineMode::FullyPipelined);
    EXPECT_EQ(full.incycle_pipe, 64u);
    EXPECT_EQ(full.cycles, 96u);
    EXPECT_DOUBLE_EQ(plan_pipeline(128, 128, 2, 32, 0.5).delay_ns, 48.0);
}

TEST(PlanPipeline, BoundarySelectsFull) {
    // incycle_pipe == k
    const PipelinePlan p = plan_pipeline(128, 128, 4, 32);
    EXPECT_EQ(p.incycle_pipe, 32u);
    EXPECT_EQ(p.mode, PipelineMode::FullyPipelined);
    EXPECT_EQ(plan_pipeline(128, 128, 5, 32).mode, PipelineMode::PartiallyPipelined);
    EXPECT_EQ(plan_pipeline(128, 128, 128, 32).mode, PipelineMode::PartiallyPipelined);
    EXPECT_EQ(plan_pipeline(128, 128, 129, 32).mode, PipelineMode::NonPipelined);
}

TEST(PlanPipeline, MultiBatchNonPipelined) {
    EXPECT_EQ(plan_pipeline(300, 128, 500, 32).cycles, 3u * 32u);
    EXPECT_EQ(plan_pipeline(300, 128, 16, 32).cycles, 3u * 33u + 7u);
}

TEST(PlanPipeline, ConfigOverload) {
    AcceleratorConfig cfg;
    cfg.channels = 8;
    const MemoryModel mem;
    const PipelinePlan p = plan_pipeline(LayerWorkload{"x", 4608, 50.0}, cfg, mem);
    EXPECT_EQ(p.n_onchip, 128u);
    EXPECT_EQ(p.n_memcover, 4u);
    EXPECT_EQ(p.mode, PipelineMode::FullyPipelined);
    EXPECT_EQ(p.cycles, 4608u / 4u + 32u);
    cfg.channels = 0;
    EXPECT_THROW(plan_pipeline(LayerWorkload{"x", 1, 50.0}, cfg, mem), std::invalid_argument);
}

TEST(PlanPipelineProperty, IntegralCyclesAndExclusiveBranches) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 10000; ++t) {
        const std::size_t n = 1 + rng() % 5000;
        const std::size_t onchip = 1 + rng() % 512;
        const std::size_t cover = 1 + rng() % 600;
        const std::size_t k = 2 + rng() % 256;
        const double tau = 0.25 + static_cast<double>(rng() % 100) / 40.0;
        const PipelinePlan p = plan_pipeline(n, onchip, cover, k, tau);
        const double ratio = p.delay_ns / tau;
        ASSERT_DOUBLE_EQ(ratio, std::round(ratio));
        ASSERT_GT(p.delay_ns, 0.0);
        const bool expect_none = onchip < cover;
        ASSERT_EQ(p.mode == PipelineMode::NonPipelined, expect_none);
        if (!expect_none) {
            ASSERT_EQ(p.mode == PipelineMode::FullyPipelined, p.incycle_pipe >= k);
        }
        // A loading-bound layer can never finish before its operands arrive.
        if (p.mode == PipelineMode::FullyPipelined) ASSERT_GE(p.cycles, (n + cover - 1) / cover);
    }
}

TEST(Latency, SingleLayerSingleBatch) {
    AcceleratorConfig cfg;
    cfg.channels = 1;
    cfg.k = 64;
    cfg.tau_ns = 2.0;
    const std::vector<LayerWorkload> layers{{"fc", 3, 50.0}};
    EXPECT_DOUBLE_EQ(network_latency_ns(layers, cfg, MemoryModel{}), 128.0);  // 3 < memcover 8
}

TEST(Latency, NonIncreasingAndSaturating) {
    const std::vector<LayerWorkload> layers{{"conv", 4608, 50.0}, {"fc", 120, 50.0}};
    for (double tau : {0.5, 0.88, 0.95, 1.0}) {
        AcceleratorConfig cfg;
        cfg.tau_ns = tau;
        double prev = INFINITY;
        double last = 0;
        for (std::size_t c = 1; c <= 64; ++c) {
            cfg.channels = c;
            const double d = network_latency_ns(layers, cfg, MemoryModel{});
            ASSERT_LE(d, prev) << "tau " << tau << " c " << c;
            prev = d;
            last = d;
        }
        // Memory-bound floor: every neuron must still be loaded.
        const std::size_t cover = mem_cover(layers[0], MemoryModel{}, tau);
        EXPECT_GE(last, static_cast<double>(4608 / cover) * tau);
        cfg.channels = 32;
        EXPECT_DOUBLE_EQ(network_latency_ns(layers, cfg, MemoryModel{}), last);
    }
}

TEST(Profiles, TableValuesAndGains) {
    const TechProfile f = finfet_10nm();
    const TechProfile r = rfet_10nm();
    EXPECT_NO_THROW(f.validate());
    EXPECT_NO_THROW(r.validate());
    EXPECT_NEAR(gain_percent(f.block("channel").area_um2, r.block("channel").area_um2), 4.7, 0.05);
    EXPECT_NEAR(gain_percent(f.block("channel").energy_fJ, r.block("channel").energy_fJ), 28.6, 0.05);
    EXPECT_NEAR(gain_percent(f.block("pcc").energy_fJ, r.block("pcc").energy_fJ), 29.7, 0.05);
    EXPECT_EQ(f.block("pcc").delay_ps, 242.0);
    EXPECT_EQ(r.block("pcc").delay_ps, 142.0);
    EXPECT_DOUBLE_EQ(f.supply_v, 0.7);
    EXPECT_DOUBLE_EQ(r.supply_v, 0.85);
    EXPECT_THROW(f.block("sram"), std::out_of_range);
}

TEST(Profiles, ScalingApplies) {
    TechProfile p = finfet_10nm();
    p.scaling = {2.1, 1.3, 1.4};
    const BlockCost base = finfet_10nm().block("pcc");
    const BlockCost s = p.block("pcc");
    EXPECT_DOUBLE_EQ(s.area_um2, base.area_um2 * 2.1);
    EXPECT_DOUBLE_EQ(s.delay_ps, base.delay_ps * 1.3);
    EXPECT_DOUBLE_EQ(s.energy_fJ, base.energy_fJ * 1.4 * 1.3);
}

TEST(Profiles, ValidationRejectsMissingBlock) {
    TechProfile p = rfet_10nm();
    p.blocks.erase("apc");
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = rfet_10nm();
    p.blocks["pcc"].area_um2 = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Profiles, SaveLoadRoundTrip) {
    const fs::path path = fs::temp_directory_path() / "scsim_profile_rt.json";
    TechProfile p = rfet_10nm();
    p.scaling = {2.1, 1.3, 1.4};
    save_profile(p, path);
    const TechProfile q = load_profile(path);
    fs::remove(path);
    EXPECT_EQ(q.name, p.name);
    EXPECT_EQ(q.supply_v, p.supply_v);
    EXPECT_EQ(q.overhead_area_um2, p.overhead_area_um2);
    EXPECT_EQ(q.scaling.area, 2.1);
    for (const auto& [name, b] : p.blocks) {
        EXPECT_EQ(q.block(name).area_um2, p.block(name).area_um2);
        EXPECT_EQ(q.block(name).delay_ps, p.block(name).delay_ps);
        EXPECT_EQ(q.block(name).energy_fJ, p.block(name).energy_fJ);
    }
    EXPECT_THROW(load_profile(path), std::runtime_error);
}

TEST(Profiles, ShippedFilesMatchBuiltins) {
    const fs::path dir = fs::path(SCSIM_TEST_DATA_DIR) / "profiles";
    for (const TechProfile& p : {finfet_10nm(), rfet_10nm()}) {
        const std::string file = p.name == "FinFET-10nm" ? "finfet_10nm.json" : "rfet_10nm.json";
        const TechProfile q = load_profile(dir / file);
        EXPECT_EQ(q.name, p.name);
        EXPECT_EQ(q.overhead_area_um2, p.overhead_area_um2);
        for (const auto& [name, b] : p.blocks) {
            EXPECT_EQ(q.block(name).area_um2, b.area_um2);
            EXPECT_EQ(q.block(name).delay_ps, b.delay_ps);
            EXPECT_EQ(q.block(name).energy_fJ, b.energy_fJ);
        }
    }
}

TEST(Rollup, ZeroChannelsIsOverheadOnly) {
    AcceleratorConfig cfg;
    cfg.channels = 0;
    const std::vector<LayerWorkload> layers{{"conv", 100, 50.0}};
    const TechProfile p = finfet_10nm();
    const CostRollup r = rollup_cost(cfg, p, layers);
    EXPECT_DOUBLE_EQ(r.area_um2, p.overhead_area_um2);
    EXPECT_DOUBLE_EQ(r.overhead_area_um2, p.overhead_area_um2);
    EXPECT_EQ(r.pcc_area_um2, 0.0);
}

TEST(Rollup, LinearInChannels) {
    const std::vector<LayerWorkload> layers{{"conv", 100, 50.0}};
    const TechProfile p = rfet_10nm();
    AcceleratorConfig cfg;
    double prev = rollup_cost(cfg, p, layers).area_um2;
    for (std::size_t c = 9; c <= 16; ++c) {
        cfg.channels = c;
        const CostRollup r = rollup_cost(cfg, p, layers);
        EXPECT_NEAR(r.area_um2 - prev, p.block("channel").area_um2, 1e-6);
        EXPECT_NEAR(r.pcc_area_um2 + r.apc_area_um2 + r.other_channel_area_um2 + r.overhead_area_um2, r.area_um2,
                    1e-6);
        prev = r.area_um2;
    }
}

TEST(Rollup, EnergyIndependentOfChannels) {
    const std::vector<LayerWorkload> layers{{"conv", 4608, 50.0}, {"fc", 120, 50.0}};
    const TechProfile p = finfet_10nm();
    AcceleratorConfig cfg;
    cfg.channels = 1;
    const double e1 = rollup_cost(cfg, p, layers).energy_pJ;
    cfg.channels = 16;
    EXPECT_DOUBLE_EQ(rollup_cost(cfg, p, layers).energy_pJ, e1);
    EXPECT_DOUBLE_EQ(e1, (4608.0 + 120.0) * 32 * 4300.0 / 1000.0 / 16.0);
}

TEST(Metrics, Definitions) {
    const Metrics m = metrics(2, 3, 5);
    EXPECT_EQ(m.adp, 10.0);
    EXPECT_EQ(m.edp, 15.0);
    EXPECT_EQ(m.edap, 30.0);
    const Metrics s = metrics(2 * 7, 3, 5);
    EXPECT_EQ(s.adp, 7 * m.adp);
    EXPECT_EQ(s.edap, 7 * m.edap);
    EXPECT_EQ(s.edp, m.edp);
    EXPECT_THROW(metrics(0, 1, 1), std::invalid_argument);
}

TEST(ChannelSweep, ShapeAndArgmin) {
    const std::vector<LayerWorkload> layers{{"conv", 4608, 50.0}, {"fc", 120, 50.0}};
    const std::vector<TechProfile> profiles{finfet_10nm(), rfet_10nm()};
    std::vector<std::size_t> channels;
    for (std::size_t c = 1; c <= 16; ++c) channels.push_back(c);
    const SweepReport r = channel_sweep(layers, channels, profiles, MemoryModel{});
    ASSERT_EQ(r.rows.size(), 32u);
    ASSERT_EQ(r.argmin.size(), 2u);
    for (const SweepArgmin& a : r.argmin) {
        EXPECT_GT(a.adp, 1u);
        EXPECT_LT(a.adp, 16u);
        EXPECT_GT(a.edap, 1u);
        EXPECT_LT(a.edap, 16u);
        const SweepRow& best = r.at(a.profile, a.edap);
        for (std::size_t c : channels) EXPECT_GE(r.at(a.profile, c).m.edap, best.m.edap);
    }
    EXPECT_THROW(r.at("FinFET-10nm", 17), std::out_of_range);
    EXPECT_THROW(channel_sweep(layers, std::vector<std::size_t>{}, profiles, MemoryModel{}), std::invalid_argument);
}

TEST(Workloads, FromModelShapes) {
    FloatModel m;
    m.input = {1, 28, 28};
    LayerSpec c;
    c.kind = LayerKind::Conv;
    c.out_channels = 6;
    c.kernel_h = c.kernel_w = 5;
    c.stride = 1;
    LayerSpec p;
    p.kind = LayerKind::MaxPool;
    p.window = 4;
    LayerSpec f;
    f.kind = LayerKind::FullyConnected;
    f.out_features = 10;
    f.has_bias = true;
    m.layers = {{c, std::vector<double>(150, 0.1), {}}, {LayerSpec{}, {}, {}}, {p, {}, {}},
                {f, std::vector<double>(2160, 0.1), std::vector<double>(10, 0.0)}};
    const auto w = network_workloads(m, 8);
    ASSERT_EQ(w.size(), 2u);
    EXPECT_EQ(w[0].n_neurons, 6u * 24 * 24);
    EXPECT_EQ(w[1].n_neurons, 10u * 9);
    EXPECT_DOUBLE_EQ(w[1].bytes_per_neuron, 50.0);
    EXPECT_DOUBLE_EQ(network_workloads(m, 4)[0].bytes_per_neuron, 25.0);
}

}  // namespace
}  // namespace scsim
