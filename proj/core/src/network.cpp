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

#include "scsim/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "scsim/counter.hpp"
#include "scsim/neuron.hpp"

namespace scsim {

// ---------------------------------------------------------------------------
// Shapes

Shape output_shape(const LayerSpec& layer, const Shape& in) {
    switch (layer.kind) {
        case LayerKind::Conv: {
            if (layer.out_channels == 0 || layer.kernel_h == 0 || layer.kernel_w == 0 ||
                layer.stride == 0) {
                throw std::invalid_argument("conv layer needs positive channels, kernel and stride");
            }
            if (layer.kernel_h > in.height || layer.kernel_w > in.width) {
                throw std::invalid_argument("conv kernel larger than its input");
            }
            return {layer.out_channels, (in.height - layer.kernel_h) / layer.stride + 1,
                    (in.width - layer.kernel_w) / layer.stride + 1};
        }
        case LayerKind::FullyConnected:
            if (layer.out_features == 0) throw std::invalid_argument("fc layer needs out_features");
            return {layer.out_features, 1, 1};
        case LayerKind::MaxPool:
            if (layer.window == 0 || layer.window > in.height || layer.window > in.width) {
                throw std::invalid_argument("max-pool window does not fit its input");
            }
            return {in.channels, in.height / layer.window, in.width / layer.window};
        case LayerKind::ReLU: return in;
    }
    throw std::logic_error("unknown layer kind");
}

std::size_t taps_per_output(const LayerSpec& layer, const Shape& in) {
    switch (layer.kind) {
        case LayerKind::Conv: return in.channels * layer.kernel_h * layer.kernel_w;
        case LayerKind::FullyConnected: return in.size();
        default: return 0;
    }
}

std::size_t groups_per_output(const LayerSpec& layer, const Shape& in) {
    const std::size_t slots = taps_per_output(layer, in) + (layer.has_bias ? 1 : 0);
    return (slots + kMacFanIn - 1) / kMacFanIn;
}

namespace {

std::size_t expected_weight_count(const LayerSpec& layer, const Shape& in) {
    const Shape out = output_shape(layer, in);
    return layer.is_linear() ? out.channels * taps_per_output(layer, in) : 0;
}

std::size_t expected_bias_count(const LayerSpec& layer, const Shape& in) {
    return layer.is_linear() && layer.has_bias ? output_shape(layer, in).channels : 0;
}

}  // namespace

std::vector<Shape> FloatModel::validate() const {
    std::vector<Shape> shapes;
    Shape cur = input;
    if (cur.size() == 0) throw std::invalid_argument("model input shape is empty");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        const std::size_t nw = expected_weight_count(l.spec, cur);
        const std::size_t nb = expected_bias_count(l.spec, cur);
        if (l.weights.size() != nw || l.bias.size() != nb) {
            throw std::invalid_argument("layer " + std::to_string(i) + ": expected " +
                                        std::to_string(nw) + " weights and " + std::to_string(nb) +
                                        " biases, got " + std::to_string(l.weights.size()) +
                                        " and " + std::to_string(l.bias.size()));
        }
        for (double w : l.weights) {
            if (!std::isfinite(w)) throw std::invalid_argument("non-finite weight in layer " + std::to_string(i));
        }
        for (double b : l.bias) {
            if (!std::isfinite(b)) throw std::invalid_argument("non-finite bias in layer " + std::to_string(i));
        }
        cur = output_shape(l.spec, cur);
        shapes.push_back(cur);
    }
    return shapes;
}

// ---------------------------------------------------------------------------
// Quantization

std::int32_t quantize_value(double v, unsigned n_bits) {
    if (!std::isfinite(v)) throw std::invalid_argument("cannot quantize a non-finite value");
    if (n_bits < kMinModelBits || n_bits > kMaxModelBits) {
        throw std::invalid_argument("precision " + std::to_string(n_bits) + " outside [2, 16]");
    }
    const double half = std::ldexp(1.0, static_cast<int>(n_bits) - 1);
    const double q = std::clamp(std::round(v * half), -half, half - 1.0);
    return static_cast<std::int32_t>(q);
}

QuantizedModel quantize(const FloatModel& model, unsigned n_bits) {
    QuantizedModel q;
    q.shapes = model.validate();
    q.input = model.input;
    q.input_map = model.input_map;
    q.n_bits = n_bits;
    for (const auto& l : model.layers) {
        QuantLayer ql{l.spec, {}, {}};
        ql.weights.reserve(l.weights.size());
        for (double w : l.weights) ql.weights.push_back(quantize_value(w, n_bits));
        for (double b : l.bias) ql.bias.push_back(quantize_value(b, n_bits));
        q.layers.push_back(std::move(ql));
    }
    return q;
}

FloatModel dequantize(const QuantizedModel& model) {
    FloatModel f{model.input, model.input_map, {}};
    for (const auto& l : model.layers) {
        FloatLayer fl{l.spec, {}, {}};
        for (auto w : l.weights) fl.weights.push_back(bipolar_value(w, model.n_bits));
        for (auto b : l.bias) fl.bias.push_back(bipolar_value(b, model.n_bits));
        f.layers.push_back(std::move(fl));
    }
    return f;
}

std::vector<std::int32_t> encode_image(const QuantizedModel& model, std::span<const float> pixels) {
    if (pixels.size() != model.input.size()) {
        throw std::invalid_argument("image has " + std::to_string(pixels.size()) +
                                    " pixels, model expects " + std::to_string(model.input.size()));
    }
    std::vector<std::int32_t> codes(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const double p = pixels[i];
        const double v = model.input_map == InputMap::Bipolar ? 2.0 * p - 1.0 : p;
        codes[i] = quantize_value(v, model.n_bits);
    }
    return codes;
}

// ---------------------------------------------------------------------------
// Layer decomposition shared by both inference paths

namespace {

constexpr std::uint32_t kBiasSlot = UINT32_MAX;
constexpr std::uint32_t kPadSlot = UINT32_MAX - 1;

struct Tap {
    std::uint32_t input;
    std::int32_t weight;
};

/// Products of output neuron @p out in MAC order: taps, then the bias slot,
/// then padding up to a multiple of 25.
void linear_taps(const QuantLayer& layer, const Shape& in, std::size_t out, std::vector<Tap>& taps) {
    taps.clear();
    const LayerSpec& s = layer.spec;
    if (s.kind == LayerKind::Conv) {
        const Shape os = output_shape(s, in);
        const std::size_t oc = out / (os.height * os.width);
        const std::size_t oy = (out / os.width) % os.height;
        const std::size_t ox = out % os.width;
        std::size_t wi = oc * in.channels * s.kernel_h * s.kernel_w;
        for (std::size_t ic = 0; ic < in.channels; ++ic) {
            for (std::size_t ky = 0; ky < s.kernel_h; ++ky) {
                for (std::size_t kx = 0; kx < s.kernel_w; ++kx, ++wi) {
                    const std::size_t idx =
                        (ic * in.height + oy * s.stride + ky) * in.width + ox * s.stride + kx;
                    taps.push_back({static_cast<std::uint32_t>(idx), layer.weights[wi]});
                }
            }
        }
        if (s.has_bias) taps.push_back({kBiasSlot, layer.bias[oc]});
    } else {
        const std::size_t n_in = in.size();
        for (std::size_t i = 0; i < n_in; ++i) {
            taps.push_back({static_cast<std::uint32_t>(i), layer.weights[out * n_in + i]});
        }
        if (s.has_bias) taps.push_back({kBiasSlot, layer.bias[out]});
    }
    while (taps.size() % kMacFanIn != 0) taps.push_back({kPadSlot, 0});
}

bool feeds_stream_op(const QuantizedModel& model, std::size_t layer) {
    if (layer + 1 >= model.layers.size()) return false;
    const auto kind = model.layers[layer + 1].spec.kind;
    return kind == LayerKind::ReLU || kind == LayerKind::MaxPool;
}

/// Layer-boundary conversion: scale by 2^exp, saturate, requantize.
std::vector<std::int32_t> to_codes(std::span<const double> values, int exp, unsigned n_bits) {
    std::vector<std::int32_t> codes(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        codes[i] = quantize_value(std::ldexp(values[i], exp), n_bits);
    }
    return codes;
}

template <typename T, typename Combine>
std::vector<T> pool(std::span<const T> in, const Shape& s, std::size_t window, Combine combine) {
    const std::size_t oh = s.height / window;
    const std::size_t ow = s.width / window;
    std::vector<T> out;
    out.reserve(s.channels * oh * ow);
    std::vector<const T*> win;
    for (std::size_t c = 0; c < s.channels; ++c) {
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
                win.clear();
                for (std::size_t dy = 0; dy < window; ++dy) {
                    for (std::size_t dx = 0; dx < window; ++dx) {
                        win.push_back(&in[(c * s.height + y * window + dy) * s.width + x * window + dx]);
                    }
                }
                out.push_back(combine(std::span<const T* const>(win)));
            }
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fixed-point baseline

std::vector<double> fixed_point_infer(const QuantizedModel& model, std::span<const float> pixels) {
    const unsigned n = model.n_bits;
    std::vector<std::int32_t> codes = encode_image(model, pixels);
    std::vector<double> values;
    bool in_values = false;
    int pending_exp = 0;
    Shape shape = model.input;
    // z is accumulated in units of 2^{-2(n-1)}; y = z / 25.
    const double unit = std::ldexp(1.0, -2 * (static_cast<int>(n) - 1)) / static_cast<double>(kMacFanIn);
    const std::int64_t bias_scale = std::int64_t{1} << (n - 1);

    std::vector<Tap> taps;
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const QuantLayer& layer = model.layers[li];
        const Shape out_shape = model.shapes[li];
        switch (layer.spec.kind) {
            case LayerKind::Conv:
            case LayerKind::FullyConnected: {
                if (in_values) {
                    codes = to_codes(values, pending_exp, n);
                    in_values = false;
                }
                const bool saturate = feeds_stream_op(model, li) && groups_per_output(layer.spec, shape) > 1;
                std::vector<double> y(out_shape.size());
                for (std::size_t o = 0; o < y.size(); ++o) {
                    linear_taps(layer, shape, o, taps);
                    std::int64_t z = 0;
                    for (const Tap& t : taps) {
                        if (t.input == kPadSlot) continue;
                        const std::int64_t a = t.input == kBiasSlot ? bias_scale : codes[t.input];
                        z += a * t.weight;
                    }
                    y[o] = static_cast<double>(z) * unit;
                    if (saturate) y[o] = std::clamp(y[o], -1.0, 1.0);
                }
                values = std::move(y);
                in_values = true;
                pending_exp = layer.spec.rescale_exp;
                break;
            }
            case LayerKind::ReLU:
                if (in_values) {
                    for (auto& v : values) v = std::max(v, 0.0);
                } else {
                    for (auto& c : codes) c = std::max(c, 0);
                }
                break;
            case LayerKind::MaxPool: {
                if (in_values) {
                    values = pool<double>(values, shape, layer.spec.window, [](auto win) {
                        double m = *win[0];
                        for (auto* p : win) m = std::max(m, *p);
                        return m;
                    });
                } else {
                    codes = pool<std::int32_t>(codes, shape, layer.spec.window, [](auto win) {
                        std::int32_t m = *win[0];
                        for (auto* p : win) m = std::max(m, *p);
                        return m;
                    });
                }
                break;
            }
        }
        shape = out_shape;
    }

    std::vector<double> scores;
    if (in_values) {
        for (double v : values) scores.push_back(std::ldexp(v, pending_exp));
    } else {
        for (auto c : codes) scores.push_back(bipolar_value(c, n));
    }
    return scores;
}

// ---------------------------------------------------------------------------
// Stochastic inference

namespace {

std::uint32_t lfsr_seed(std::uint64_t seed, unsigned width) {
    const std::uint64_t period = (std::uint64_t{1} << width) - 1;
    return static_cast<std::uint32_t>(seed % period + 1);
}

}  // namespace

LayerSources make_layer_sources(std::uint64_t seed, std::size_t layer, SourceKind kind,
                                unsigned n_bits) {
    LayerSources s;
    const std::uint64_t sa = derive_seed(seed, {layer, 0});
    const std::uint64_t sw = derive_seed(seed, {layer, 1});
    if (kind == SourceKind::Ideal) {
        s.activation = std::make_unique<IdealSource>(sa);
        s.weight = std::make_unique<IdealSource>(sw);
    } else {
        const unsigned w = std::clamp(n_bits, kMinLfsrWidth, kMaxLfsrWidth);
        s.activation = std::make_unique<Lfsr>(w, lfsr_seed(sa, w));
        s.weight = std::make_unique<Lfsr>(w, lfsr_seed(sw, w));
    }
    return s;
}

std::unique_ptr<RandomSource> make_b2s_source(std::uint64_t seed, std::size_t layer, std::size_t group,
                                              SourceKind kind) {
    const std::uint64_t sb = derive_seed(seed, {layer, 2});
    if (kind == SourceKind::Ideal) return std::make_unique<IdealSource>(derive_seed(sb, {group}));
    constexpr unsigned kWidth = 12;
    return std::make_unique<SharedSource>(Lfsr(kWidth, lfsr_seed(sb, kWidth)),
                                          random_permutation(kWidth, derive_seed(sb, {group})));
}

namespace {

/// Streams of a linear layer's operands, generated once per (tap, code)
/// against the tap's view of the layer's shared word sequence.
class StreamBank {
public:
    StreamBank(PccSpec spec, const std::vector<std::uint32_t>& words, unsigned width)
        : spec_(spec), cache_(kMacFanIn * (std::size_t{1} << spec.precision)) {
        for (std::size_t tap = 0; tap < kMacFanIn; ++tap) words_.push_back(tap_words(words, tap, width));
    }

    const Bitstream& get(std::size_t tap, std::int32_t code) {
        const std::uint32_t x = bipolar_word(code, spec_.precision);
        auto& slot = cache_[(tap << spec_.precision) + x];
        if (!slot) slot = generate_stream(spec_, x, words_[tap]).relabeled(Encoding::Bipolar);
        return *slot;
    }

private:
    PccSpec spec_;
    std::vector<std::vector<std::uint32_t>> words_;
    std::vector<std::optional<Bitstream>> cache_;
};

/// B2S thresholds of one layer, one sequence per correlation group.
class ThresholdCache {
public:
    ThresholdCache(const ScConfig& config, std::size_t layer) : config_(config), layer_(layer) {}

    const B2sThresholds& get(std::size_t group) {
        auto it = cache_.find(group);
        if (it == cache_.end()) {
            auto source = make_b2s_source(config_.seed, layer_, group, config_.source);
            const GroupId id = derive_seed(config_.seed, {layer_, 3, group});
            it = cache_.emplace(group, B2sThresholds(*source, config_.k, id)).first;
        }
        return it->second;
    }

private:
    const ScConfig& config_;
    std::size_t layer_;
    std::map<std::size_t, B2sThresholds> cache_;
};

/// Correlation group of output @p o of linear layer @p li whose results stay
/// in the stochastic domain: its max-pool window, or the neuron itself.
std::size_t stream_group(const QuantizedModel& model, std::size_t li, std::size_t o) {
    std::size_t next = li + 1;
    if (next < model.layers.size() && model.layers[next].spec.kind == LayerKind::ReLU) ++next;
    if (next >= model.layers.size() || model.layers[next].spec.kind != LayerKind::MaxPool) return o;
    const Shape& s = model.shapes[li];
    const std::size_t w = model.layers[next].spec.window;
    const std::size_t c = o / (s.height * s.width);
    const std::size_t y = (o / s.width) % s.height;
    const std::size_t x = o % s.width;
    const std::size_t ph = s.height / w;
    const std::size_t pw = s.width / w;
    if (y / w >= ph || x / w >= pw) return c * ph * pw + s.size() + o;  // cropped by the pool
    return (c * ph + y / w) * pw + x / w;
}

// Group ids for per-position thresholds, kept apart from stream groups.
constexpr std::size_t kPositionGroupBase = std::size_t{1} << 40;

}  // namespace

std::vector<double> sc_infer(const QuantizedModel& model, std::span<const float> pixels,
                             const ScConfig& config) {
    if (config.k == 0) throw std::invalid_argument("sc_infer: k must be positive");
    const unsigned n = model.n_bits;
    const std::size_t k = config.k;
    const PccSpec pcc{config.pcc, n};

    std::vector<std::int32_t> codes = encode_image(model, pixels);
    std::vector<double> values;
    std::vector<Bitstream> streams;
    std::map<GroupId, Bitstream> zeros;
    enum class Domain { Codes, Values, Streams } domain = Domain::Codes;
    int pending_exp = 0;
    Shape shape = model.input;

    auto leave_stochastic = [&] {
        if (domain == Domain::Streams) {
            values.clear();
            for (const auto& s : streams) values.push_back(s2b(s).value());
            streams.clear();
        }
        codes = to_codes(values, pending_exp, n);
        domain = Domain::Codes;
    };

    std::vector<Tap> taps;
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const QuantLayer& layer = model.layers[li];
        const Shape out_shape = model.shapes[li];
        switch (layer.spec.kind) {
            case LayerKind::Conv:
            case LayerKind::FullyConnected: {
                if (domain != Domain::Codes) leave_stochastic();
                LayerSources src = make_layer_sources(config.seed, li, config.source, n);
                StreamBank acts(pcc, draw_words(*src.activation, k), src.activation->width());
                StreamBank weights(pcc, draw_words(*src.weight, k), src.weight->width());
                ThresholdCache thresholds(config, li);
                const Bitstream bias_act = Bitstream::ones(k, Encoding::Bipolar);

                const bool to_stream = feeds_stream_op(model, li);
                const std::size_t groups = groups_per_output(layer.spec, shape);
                const AdderTreeSpec tree{groups == 1 ? 1 : std::bit_ceil(groups), groups == 1};
                std::vector<std::uint64_t> ones(tree.fan_in, 0);
                std::array<const Bitstream*, kMacFanIn> pa{};
                std::array<const Bitstream*, kMacFanIn> pw{};

                streams.clear();
                zeros.clear();
                values.assign(to_stream ? 0 : out_shape.size(), 0.0);
                for (std::size_t o = 0; o < out_shape.size(); ++o) {
                    linear_taps(layer, shape, o, taps);
                    const B2sThresholds* own =
                        to_stream ? &thresholds.get(stream_group(model, li, o)) : nullptr;
                    std::optional<Bitstream> single;
                    for (std::size_t g = 0; g < groups; ++g) {
                        for (std::size_t i = 0; i < kMacFanIn; ++i) {
                            const Tap& t = taps[g * kMacFanIn + i];
                            if (t.input == kBiasSlot) {
                                pa[i] = &bias_act;
                            } else {
                                pa[i] = &acts.get(i, t.input == kPadSlot ? 0 : codes[t.input]);
                            }
                            pw[i] = &weights.get(i, t.weight);
                        }
                        const B2sThresholds& th = (own != nullptr && groups == 1)
                                                      ? *own
                                                      : thresholds.get(kPositionGroupBase + g);
                        Bitstream s = mac_stream(pa, pw, th);
                        ones[g] = s.ones_count();
                        if (groups == 1) single = std::move(s);
                    }
                    if (to_stream && groups == 1) {
                        zeros.try_emplace(own->group(), own->zero());
                        streams.push_back(std::move(*single));
                        continue;
                    }
                    const auto total = static_cast<std::int64_t>(adder_tree_sum(tree, ones));
                    const auto kk = static_cast<std::int64_t>(k);
                    const auto gg = static_cast<std::int64_t>(groups);
                    if (!to_stream) {
                        values[o] = static_cast<double>(2 * total - gg * kk) / static_cast<double>(kk);
                        continue;
                    }
                    // Re-encode sum(y_g), saturated to [-1, 1], against the shared thresholds.
                    const std::int64_t lhs = static_cast<std::int64_t>(kMacFanIn) * (2 * total - (gg - 1) * kk);
                    std::vector<std::uint64_t> words(Bitstream::word_count(k), 0);
                    for (std::size_t t = 0; t < k; ++t) {
                        if (lhs > static_cast<std::int64_t>(own->at(t)) * kk) {
                            words[t / 64] |= std::uint64_t{1} << (t % 64);
                        }
                    }
                    zeros.try_emplace(own->group(), own->zero());
                    streams.push_back(Bitstream::from_words(std::move(words), k, Encoding::Bipolar,
                                                            own->group()));
                }
                domain = to_stream ? Domain::Streams : Domain::Values;
                pending_exp = layer.spec.rescale_exp;
                break;
            }
            case LayerKind::ReLU:
                if (domain == Domain::Streams) {
                    for (auto& s : streams) s = relu(s, zeros.at(*s.group()));
                } else if (domain == Domain::Values) {
                    for (auto& v : values) v = std::max(v, 0.0);
                } else {
                    for (auto& c : codes) c = std::max(c, 0);
                }
                break;
            case LayerKind::MaxPool:
                if (domain == Domain::Streams) {
                    streams = pool<Bitstream>(streams, shape, layer.spec.window,
                                              [](auto win) { return max_pool(win); });
                } else if (domain == Domain::Values) {
                    values = pool<double>(values, shape, layer.spec.window, [](auto win) {
                        double m = *win[0];
                        for (auto* p : win) m = std::max(m, *p);
                        return m;
                    });
                } else {
                    codes = pool<std::int32_t>(codes, shape, layer.spec.window, [](auto win) {
                        std::int32_t m = *win[0];
                        for (auto* p : win) m = std::max(m, *p);
                        return m;
                    });
                }
                break;
        }
        shape = out_shape;
    }

    std::vector<double> scores;
    if (domain == Domain::Streams) {
        for (const auto& s : streams) scores.push_back(std::ldexp(s2b(s).value(), pending_exp));
    } else if (domain == Domain::Values) {
        for (double v : values) scores.push_back(std::ldexp(v, pending_exp));
    } else {
        for (auto c : codes) scores.push_back(bipolar_value(c, n));
    }
    return scores;
}

// ---------------------------------------------------------------------------
// Datasets

namespace {

std::uint32_t read_be32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("truncated IDX header");
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

std::ifstream open_binary(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return in;
}

}  // namespace

Dataset load_idx_dataset(const std::filesystem::path& images, const std::filesystem::path& labels) {
    auto img = open_binary(images);
    auto lab = open_binary(labels);
    if (read_be32(img) != 0x00000803) throw std::runtime_error(images.string() + ": not an IDX3 ubyte file");
    if (read_be32(lab) != 0x00000801) throw std::runtime_error(labels.string() + ": not an IDX1 ubyte file");
    const std::uint32_t n = read_be32(img);
    const std::uint32_t rows = read_be32(img);
    const std::uint32_t cols = read_be32(img);
    const std::uint32_t n_labels = read_be32(lab);
    if (n != n_labels) throw std::runtime_error("IDX image and label counts differ");

    Dataset d{{1, rows, cols}, {}};
    d.samples.resize(n);
    std::vector<unsigned char> buf(static_cast<std::size_t>(rows) * cols);
    for (auto& s : d.samples) {
        img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        char label = 0;
        lab.read(&label, 1);
        if (!img || !lab) throw std::runtime_error("truncated IDX payload");
        s.pixels.resize(buf.size());
        for (std::size_t i = 0; i < buf.size(); ++i) s.pixels[i] = static_cast<float>(buf[i]) / 255.0F;
        s.label = static_cast<unsigned char>(label);
    }
    return d;
}

Dataset load_csv_dataset(const std::filesystem::path& path, Shape shape) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    Dataset d{shape, {}};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.empty()) continue;
        char* end = nullptr;
        const long label = std::strtol(cells[0].c_str(), &end, 10);
        if (end == cells[0].c_str()) {
            if (d.samples.empty()) continue;  // header
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": bad label");
        }
        if (cells.size() != shape.size() + 1) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(shape.size()) + " pixels");
        }
        Sample s;
        s.label = static_cast<int>(label);
        s.pixels.reserve(shape.size());
        for (std::size_t i = 1; i < cells.size(); ++i) {
            s.pixels.push_back(std::stof(cells[i]) / 255.0F);
        }
        d.samples.push_back(std::move(s));
    }
    return d;
}

Dataset take_first(const Dataset& data, std::size_t n) {
    Dataset d{data.shape, {}};
    d.samples.assign(data.samples.begin(),
                     data.samples.begin() + static_cast<std::ptrdiff_t>(std::min(n, data.samples.size())));
    return d;
}

// ---------------------------------------------------------------------------
// Model files

namespace {

using nlohmann::json;

std::vector<double> read_fixed_array(const json& j) {
    const int exp = j.at("exp").get<int>();
    std::vector<double> out;
    for (const auto& v : j.at("values")) out.push_back(std::ldexp(static_cast<double>(v.get<std::int64_t>()), -exp));
    return out;
}

json write_fixed_array(std::span<const double> values, unsigned bits) {
    json vals = json::array();
    for (double v : values) vals.push_back(quantize_value(v, bits));
    return json{{"exp", static_cast<int>(bits) - 1}, {"values", vals}};
}

LayerKind parse_kind(const std::string& s) {
    if (s == "conv") return LayerKind::Conv;
    if (s == "fc") return LayerKind::FullyConnected;
    if (s == "maxpool") return LayerKind::MaxPool;
    if (s == "relu") return LayerKind::ReLU;
    throw std::invalid_argument("unknown layer type '" + s + "'");
}

}  // namespace

FloatModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    try {
        FloatModel m;
        const auto& inp = j.at("input");
        m.input = {inp.at("channels").get<std::size_t>(), inp.at("height").get<std::size_t>(),
                   inp.at("width").get<std::size_t>()};
        const std::string map = j.value("input_map", "bipolar");
        if (map == "bipolar") {
            m.input_map = InputMap::Bipolar;
        } else if (map == "unipolar") {
            m.input_map = InputMap::Unipolar;
        } else {
            throw std::invalid_argument("input_map must be 'bipolar' or 'unipolar'");
        }
        for (const auto& lj : j.at("layers")) {
            FloatLayer l;
            l.spec.kind = parse_kind(lj.at("type").get<std::string>());
            switch (l.spec.kind) {
                case LayerKind::Conv: {
                    l.spec.out_channels = lj.at("out_channels").get<std::size_t>();
                    const auto& kernel = lj.at("kernel");
                    l.spec.kernel_h = kernel.at(0).get<std::size_t>();
                    l.spec.kernel_w = kernel.at(1).get<std::size_t>();
                    l.spec.stride = lj.value("stride", std::size_t{1});
                    break;
                }
                case LayerKind::FullyConnected:
                    l.spec.out_features = lj.at("out_features").get<std::size_t>();
                    break;
                case LayerKind::MaxPool: l.spec.window = lj.at("window").get<std::size_t>(); break;
                case LayerKind::ReLU: break;
            }
            if (l.spec.is_linear()) {
                l.spec.rescale_exp = lj.value("rescale_exp", 0);
                l.weights = read_fixed_array(lj.at("weights"));
                if (lj.contains("bias") && !lj.at("bias").is_null()) {
                    l.spec.has_bias = true;
                    l.bias = read_fixed_array(lj.at("bias"));
                }
            }
            m.layers.push_back(std::move(l));
        }
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": schema violation: " + e.what());
    }
}

void save_model(const FloatModel& model, const std::filesystem::path& path, unsigned storage_bits) {
    model.validate();
    json j;
    j["format"] = "scsim-model";
    j["version"] = 1;
    j["input"] = {{"channels", model.input.channels},
                  {"height", model.input.height},
                  {"width", model.input.width}};
    j["input_map"] = model.input_map == InputMap::Bipolar ? "bipolar" : "unipolar";
    json layers = json::array();
    for (const auto& l : model.layers) {
        json lj;
        switch (l.spec.kind) {
            case LayerKind::Conv:
                lj = {{"type", "conv"},
                      {"out_channels", l.spec.out_channels},
                      {"kernel", {l.spec.kernel_h, l.spec.kernel_w}},
                      {"stride", l.spec.stride}};
                break;
            case LayerKind::FullyConnected:
                lj = {{"type", "fc"}, {"out_features", l.spec.out_features}};
                break;
            case LayerKind::MaxPool: lj = {{"type", "maxpool"}, {"window", l.spec.window}}; break;
            case LayerKind::ReLU: lj = {{"type", "relu"}}; break;
        }
        if (l.spec.is_linear()) {
            lj["rescale_exp"] = l.spec.rescale_exp;
            lj["weights"] = write_fixed_array(l.weights, storage_bits);
            lj["bias"] = l.spec.has_bias ? write_fixed_array(l.bias, storage_bits) : json(nullptr);
        }
        layers.push_back(lj);
    }
    j["layers"] = layers;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(1) << '\n';
}

// ---------------------------------------------------------------------------
// Evaluation

std::size_t argmax(std::span<const double> scores) {
    if (scores.empty()) throw std::invalid_argument("argmax of empty score vector");
    return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

namespace {

template <typename Infer>
EvalReport evaluate(const Dataset& data, std::size_t n_classes, Infer infer) {
    if (data.samples.empty()) throw std::invalid_argument("evaluation dataset is empty");
    EvalReport r;
    r.class_total.assign(n_classes, 0);
    r.class_correct.assign(n_classes, 0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const auto& s = data.samples[i];
        const auto scores = infer(i, s);
        const bool hit = argmax(scores) == static_cast<std::size_t>(s.label);
        correct += hit ? 1 : 0;
        if (s.label >= 0 && static_cast<std::size_t>(s.label) < n_classes) {
            ++r.class_total[static_cast<std::size_t>(s.label)];
            if (hit) ++r.class_correct[static_cast<std::size_t>(s.label)];
        }
    }
    r.n_images = data.samples.size();
    r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n_images);
    return r;
}

}  // namespace

EvalReport fixed_point_accuracy(const FloatModel& model, const Dataset& data, unsigned n_bits) {
    const QuantizedModel q = quantize(model, n_bits);
    EvalReport r = evaluate(data, q.num_outputs(), [&](std::size_t, const Sample& s) {
        return fixed_point_infer(q, s.pixels);
    });
    r.k = 0;
    r.n_bits = n_bits;
    return r;
}

std::vector<EvalReport> accuracy_sweep(const FloatModel& model, const Dataset& data,
                                       std::span<const std::size_t> k_values,
                                       std::span<const unsigned> n_bits_values, std::uint64_t seed,
                                       const SweepOptions& options) {
    if (data.samples.empty()) throw std::invalid_argument("accuracy_sweep: empty dataset");
    std::vector<EvalReport> reports;
    for (unsigned n_bits : n_bits_values) {
        const QuantizedModel q = quantize(model, n_bits);
        for (std::size_t k : k_values) {
            EvalReport r = evaluate(data, q.num_outputs(), [&](std::size_t i, const Sample& s) {
                const ScConfig cfg{k, options.pcc, options.source, derive_seed(seed, {i})};
                return sc_infer(q, s.pixels, cfg);
            });
            r.k = k;
            r.n_bits = n_bits;
            r.seed = seed;
            reports.push_back(std::move(r));
        }
    }
    return reports;
}

}  // namespace scsim
