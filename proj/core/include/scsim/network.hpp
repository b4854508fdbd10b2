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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "scsim/pcc.hpp"
#include "scsim/rns.hpp"

namespace scsim {

struct Shape {
    std::size_t channels = 1;
    std::size_t height = 1;
    std::size_t width = 1;

    std::size_t size() const { return channels * height * width; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

enum class LayerKind { Conv, FullyConnected, MaxPool, ReLU };

struct LayerSpec {
    LayerKind kind = LayerKind::ReLU;
    std::size_t out_channels = 0;  // conv
    std::size_t kernel_h = 0;      // conv
    std::size_t kernel_w = 0;      // conv
    std::size_t stride = 1;        // conv
    std::size_t out_features = 0;  // fully connected
    std::size_t window = 0;        // max pool, non-overlapping
    bool has_bias = false;
    /// Linear layers: outputs are multiplied by 2^rescale_exp when they leave
    /// the stochastic domain (undoing part of the 1/25 APC normalization).
    int rescale_exp = 0;

    bool is_linear() const { return kind == LayerKind::Conv || kind == LayerKind::FullyConnected; }
};

/// Output shape of @p layer applied to @p in; throws on inconsistent dimensions.
Shape output_shape(const LayerSpec& layer, const Shape& in);
/// Products per output neuron of a linear layer, excluding the bias.
std::size_t taps_per_output(const LayerSpec& layer, const Shape& in);
/// MAC groups per output neuron, counting the bias slot.
std::size_t groups_per_output(const LayerSpec& layer, const Shape& in);

/// How [0, 1] pixel intensities map onto the bipolar activation range.
enum class InputMap { Unipolar, Bipolar };

struct FloatLayer {
    LayerSpec spec;
    std::vector<double> weights;  // conv: [out][in][kh][kw]; fc: [out][in]
    std::vector<double> bias;
};

struct FloatModel {
    Shape input;
    InputMap input_map = InputMap::Bipolar;
    std::vector<FloatLayer> layers;

    /// Shape after each layer; throws on inconsistent chaining or weight counts.
    std::vector<Shape> validate() const;
};

struct QuantLayer {
    LayerSpec spec;
    std::vector<std::int32_t> weights;
    std::vector<std::int32_t> bias;
};

/// Weights and biases are signed n_bits codes q, value q / 2^{n_bits-1}.
struct QuantizedModel {
    Shape input;
    InputMap input_map = InputMap::Bipolar;
    unsigned n_bits = 8;
    std::vector<QuantLayer> layers;
    std::vector<Shape> shapes;  // output shape of each layer

    std::size_t num_outputs() const { return shapes.empty() ? input.size() : shapes.back().size(); }
};

constexpr unsigned kMinModelBits = 2;
constexpr unsigned kMaxModelBits = 16;

/// Nearest signed n-bit code to @p v, ties away from zero, saturated to [-1, 1).
std::int32_t quantize_value(double v, unsigned n_bits);
QuantizedModel quantize(const FloatModel& model, unsigned n_bits);
FloatModel dequantize(const QuantizedModel& model);

/// Activation codes of an image with pixels in [0, 1].
std::vector<std::int32_t> encode_image(const QuantizedModel& model, std::span<const float> pixels);

/// Binary fixed-point forward pass following the same scaling as the SC datapath.
std::vector<double> fixed_point_infer(const QuantizedModel& model, std::span<const float> pixels);

enum class SourceKind { Ideal, Lfsr };

struct ScConfig {
    std::size_t k = 32;
    PccKind pcc = PccKind::Comparator;
    SourceKind source = SourceKind::Ideal;
    std::uint64_t seed = 0;
};

/// Activation and weight SNG sources of one linear layer.
struct LayerSources {
    std::unique_ptr<RandomSource> activation;
    std::unique_ptr<RandomSource> weight;
};

LayerSources make_layer_sources(std::uint64_t seed, std::size_t layer, SourceKind kind,
                                unsigned n_bits);

/// B2S source of correlation group @p group in @p layer. Groups of one layer
/// read differently wired views of one RNG.
std::unique_ptr<RandomSource> make_b2s_source(std::uint64_t seed, std::size_t layer, std::size_t group,
                                              SourceKind kind);

/**
 * Bit-level stochastic inference. Every linear output is split into 25-input
 * MAC groups evaluated by the SC neuron; ReLU and max-pool act on streams.
 *
 * B2S thresholds are shared within a correlation group: one max-pool window
 * (so OR gives the exact maximum), or one MAC group position across all
 * outputs of a layer whose results leave the stochastic domain.
 */
std::vector<double> sc_infer(const QuantizedModel& model, std::span<const float> pixels,
                             const ScConfig& config);

struct Sample {
    std::vector<float> pixels;  // [0, 1], channel-major
    int label = 0;
};

struct Dataset {
    Shape shape;
    std::vector<Sample> samples;
};

/// IDX image + label files (as distributed for MNIST).
Dataset load_idx_dataset(const std::filesystem::path& images, const std::filesystem::path& labels);
/// CSV rows "label,p0,p1,..." with 0..255 intensities; a header row is skipped.
Dataset load_csv_dataset(const std::filesystem::path& path, Shape shape);
Dataset take_first(const Dataset& data, std::size_t n);

FloatModel load_model(const std::filesystem::path& path);
void save_model(const FloatModel& model, const std::filesystem::path& path, unsigned storage_bits);

struct EvalReport {
    std::size_t k = 0;  // 0 for the fixed-point baseline
    unsigned n_bits = 0;
    double accuracy = 0.0;
    std::size_t n_images = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> class_total;
    std::vector<std::size_t> class_correct;
};

std::size_t argmax(std::span<const double> scores);

EvalReport fixed_point_accuracy(const FloatModel& model, const Dataset& data, unsigned n_bits);

struct SweepOptions {
    PccKind pcc = PccKind::Comparator;
    SourceKind source = SourceKind::Ideal;
};

/// One report per (k, n_bits) pair, n_bits-major. Per-image seeds derive from @p seed.
std::vector<EvalReport> accuracy_sweep(const FloatModel& model, const Dataset& data,
                                       std::span<const std::size_t> k_values,
                                       std::span<const unsigned> n_bits_values, std::uint64_t seed,
                                       const SweepOptions& options = {});

}  // namespace scsim
