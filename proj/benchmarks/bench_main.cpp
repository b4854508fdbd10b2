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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "scsim/accel.hpp"
#include "scsim/counter.hpp"
#include "scsim/network.hpp"
#include "scsim/neuron.hpp"
#include "scsim/pcc.hpp"
#include "scsim/rns.hpp"

namespace {

using namespace scsim;

void BM_ApcCountLanes(benchmark::State& state) {
    const ApcTree& tree = mac_apc();
    std::mt19937_64 rng(1);
    std::vector<std::uint64_t> lanes(25), planes(tree.output_width());
    for (auto& w : lanes) w = rng();
    for (auto _ : state) {
        tree.count_lanes(lanes, planes);
        benchmark::DoNotOptimize(planes.data());
    }
    state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_ApcCountLanes);

void BM_GenerateStream(benchmark::State& state) {
    const auto kind = static_cast<PccKind>(state.range(0));
    const auto k = static_cast<std::size_t>(state.range(1));
    const PccSpec spec{kind, 8};
    Lfsr lfsr(8, 1);
    const auto words = draw_words(lfsr, k);
    for (auto _ : state) benchmark::DoNotOptimize(generate_stream(spec, 77, words));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(k));
    state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_GenerateStream)->ArgsProduct({{0, 1, 2}, {32, 256, 4096}});

void BM_MacStream(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    IdealSource src(3, 8);
    const PccSpec spec{PccKind::Comparator, 8};
    std::vector<Bitstream> acts, weights;
    for (std::uint32_t i = 0; i < kMacFanIn; ++i) {
        acts.push_back(generate_stream(spec, 10 * i, k, src).relabeled(Encoding::Bipolar));
        weights.push_back(generate_stream(spec, 255 - 9 * i, k, src).relabeled(Encoding::Bipolar));
    }
    std::vector<const Bitstream*> pa, pw;
    for (std::size_t i = 0; i < kMacFanIn; ++i) pa.push_back(&acts[i]), pw.push_back(&weights[i]);
    IdealSource b(4);
    const B2sThresholds th(b, k, 1);
    for (auto _ : state) benchmark::DoNotOptimize(mac_stream(pa, pw, th));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(k));
}
BENCHMARK(BM_MacStream)->Arg(32)->Arg(128)->Arg(1024);

void BM_ScInfer(benchmark::State& state) {
    const std::filesystem::path data = SCSIM_BENCH_DATA_DIR;
    const QuantizedModel model = quantize(load_model(data / "toy_model.json"), 8);
    const Dataset d = take_first(
        load_idx_dataset(data / "mnist-eval-images-idx3-ubyte", data / "mnist-eval-labels-idx1-ubyte"), 1);
    ScConfig cfg;
    cfg.k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sc_infer(model, d.samples[0].pixels, cfg));
}
BENCHMARK(BM_ScInfer)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ChannelSweep(benchmark::State& state) {
    const auto layers = network_workloads(load_model(std::filesystem::path(SCSIM_BENCH_DATA_DIR) / "toy_model.json"), 8);
    std::vector<std::size_t> channels;
    for (std::size_t c = 1; c <= 16; ++c) channels.push_back(c);
    const std::vector<TechProfile> profiles{finfet_10nm(), rfet_10nm()};
    for (auto _ : state) benchmark::DoNotOptimize(channel_sweep(layers, channels, profiles, MemoryModel{}));
}
BENCHMARK(BM_ChannelSweep);

}  // namespace
BENCHMARK_MAIN();
