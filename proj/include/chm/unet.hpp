// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0
//
// Encoder-decoder regression network: per stage two same-padded 3x3
// convolutions + ReLU, 2x2 max-pool downsampling, 2x2 stride-2 transposed
// convolution + skip concatenation upsampling, and a final 1x1 convolution
// with logistic activation producing one band in (0, 1).

#ifndef CHM_UNET_HPP_
#define CHM_UNET_HPP_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chm/nn_ops.hpp"

namespace chm {

struct UNetConfig {
    int in_channels = 4;
    int depth = 3;         // encoder stages
    int base_channels = 8; // doubles per stage
    std::uint64_t seed = 0;

    // full-scale preset: the classical 64..1024 schedule
    static UNetConfig paper() { return {4, 4, 64, 0}; }
    // small preset used by tests and desk-scale training
    static UNetConfig desk() { return {4, 3, 8, 0}; }

    int stage_channels(int stage) const { return base_channels << stage; }
    int divisor() const { return 1 << depth; }

    void validate() const {
        if (in_channels < 1 || depth < 1 || base_channels < 1)
            throw ParameterError("unet config fields must be positive");
    }

    bool operator==(const UNetConfig&) const = default;
};

template <typename T>
struct ConvBlockT {
    TensorT<T> k;
    std::vector<T> b;
};

template <typename T>
struct UNetWeightsT {
    UNetConfig config;
    struct Stage {
        ConvBlockT<T> conv1, conv2;
    };
    struct DecoderStage {
        ConvBlockT<T> up; // (in_c, out_c, 2, 2)
        Stage convs;
    };
    std::vector<Stage> encoders; // index = stage, shallow to deep
    Stage bridge;
    std::vector<DecoderStage> decoders; // index = matching encoder stage
    ConvBlockT<T> head;                 // 1x1 to a single channel
};

using UNetWeights = UNetWeightsT<float>;

// Named view of one parameter tensor, for optimizers and checkpoints.
template <typename T>
struct ParamRef {
    std::string name;
    std::vector<T>* values;
    std::array<int, 4> shape; // biases use (1, c, 1, 1)
};

template <typename T>
std::vector<ParamRef<T>> collect_params(UNetWeightsT<T>& w) {
    std::vector<ParamRef<T>> out;
    auto add_block = [&out](const std::string& name, ConvBlockT<T>& blk) {
        out.push_back({name + ".k", &blk.k.v, {blk.k.n, blk.k.c, blk.k.h, blk.k.w}});
        out.push_back({name + ".b", &blk.b, {1, static_cast<int>(blk.b.size()), 1, 1}});
    };
    for (std::size_t i = 0; i < w.encoders.size(); ++i) {
        add_block("enc" + std::to_string(i) + ".conv1", w.encoders[i].conv1);
        add_block("enc" + std::to_string(i) + ".conv2", w.encoders[i].conv2);
    }
    add_block("bridge.conv1", w.bridge.conv1);
    add_block("bridge.conv2", w.bridge.conv2);
    for (std::size_t i = 0; i < w.decoders.size(); ++i) {
        add_block("dec" + std::to_string(i) + ".up", w.decoders[i].up);
        add_block("dec" + std::to_string(i) + ".conv1", w.decoders[i].convs.conv1);
        add_block("dec" + std::to_string(i) + ".conv2", w.decoders[i].convs.conv2);
    }
    add_block("head", w.head);
    return out;
}

template <typename T>
std::size_t parameter_count(const UNetWeightsT<T>& w) {
    std::size_t n = 0;
    for (const ParamRef<T>& p : collect_params(const_cast<UNetWeightsT<T>&>(w)))
        n += p.values->size();
    return n;
}

// He-uniform init (limit sqrt(6 / fan_in)) from one seeded generator
// streamed across parameters in traversal order; biases start at zero.
template <typename T>
UNetWeightsT<T> init_weights(const UNetConfig& cfg) {
    cfg.validate();
    UNetWeightsT<T> w;
    w.config = cfg;

    auto conv_block = [](int in_c, int out_c, int k) {
        ConvBlockT<T> blk;
        blk.k = TensorT<T>(out_c, in_c, k, k);
        blk.b.assign(out_c, T(0));
        return blk;
    };
    auto up_block = [](int in_c, int out_c) {
        ConvBlockT<T> blk;
        blk.k = TensorT<T>(in_c, out_c, 2, 2);
        blk.b.assign(out_c, T(0));
        return blk;
    };

    int ch = cfg.in_channels;
    for (int i = 0; i < cfg.depth; ++i) {
        const int oc = cfg.stage_channels(i);
        w.encoders.push_back({conv_block(ch, oc, 3), conv_block(oc, oc, 3)});
        ch = oc;
    }
    const int bridge_c = cfg.stage_channels(cfg.depth);
    w.bridge = {conv_block(ch, bridge_c, 3), conv_block(bridge_c, bridge_c, 3)};
    w.decoders.resize(cfg.depth);
    for (int i = cfg.depth - 1; i >= 0; --i) {
        const int oc = cfg.stage_channels(i);
        const int in_c = cfg.stage_channels(i + 1);
        w.decoders[i].up = up_block(in_c, oc);
        w.decoders[i].convs = {conv_block(2 * oc, oc, 3), conv_block(oc, oc, 3)};
    }
    w.head = conv_block(cfg.stage_channels(0), 1, 1);

    std::mt19937_64 rng(cfg.seed);
    for (ParamRef<T>& p : collect_params(w)) {
        if (p.name.ends_with(".b")) continue;
        // fan_in = in_channels x kernel area; upconv kernels store
        // in-channels in dim 0, regular convs in dim 1
        const bool up = p.name.find(".up.") != std::string::npos;
        const double fan_in =
            static_cast<double>(up ? p.shape[0] : p.shape[1]) * p.shape[2] * p.shape[3];
        const double limit = std::sqrt(6.0 / fan_in);
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (T& v : *p.values) v = static_cast<T>(dist(rng));
    }
    return w;
}

template <typename T>
struct UNetTape {
    TensorT<T> input;
    struct EncTape {
        TensorT<T> a1, a2; // post-relu activations; a2 doubles as the skip
        PoolResult<T> pool;
    };
    std::vector<EncTape> enc;
    TensorT<T> b1, b2;
    struct DecTape {
        TensorT<T> up_in, up_out, cat, a1, a2;
    };
    std::vector<DecTape> dec; // indexed like decoders
    TensorT<T> head_in, output;
};

namespace detail {

template <typename T>
void check_unet_input(const UNetConfig& cfg, const TensorT<T>& image) {
    if (image.c != cfg.in_channels)
        throw ShapeError("unet input must have " + std::to_string(cfg.in_channels) + " channels");
    const int d = cfg.divisor();
    if (image.h % d != 0 || image.w % d != 0)
        throw ShapeError("unet input dims must be divisible by " + std::to_string(d));
    if (image.h < d || image.w < d) throw ShapeError("unet input too small for its depth");
}

} // namespace detail

// Forward pass recording every activation needed by the backward pass.
template <typename T>
TensorT<T> unet_forward_tape(const UNetWeightsT<T>& w, const TensorT<T>& image, UNetTape<T>& tape) {
    detail::check_unet_input(w.config, image);
    const ConvSpec same{Padding::Same, 1};
    const int d = w.config.depth;

    tape.enc.clear();
    tape.dec.clear();
    tape.enc.resize(d);
    tape.dec.resize(d);
    tape.input = image;

    const TensorT<T>* cur = &tape.input;
    for (int i = 0; i < d; ++i) {
        auto& et = tape.enc[i];
        et.a1 = relu_forward(conv2d_forward(*cur, w.encoders[i].conv1.k, w.encoders[i].conv1.b, same));
        et.a2 = relu_forward(conv2d_forward(et.a1, w.encoders[i].conv2.k, w.encoders[i].conv2.b, same));
        et.pool = maxpool2x2_forward(et.a2);
        cur = &et.pool.out;
    }
    tape.b1 = relu_forward(conv2d_forward(*cur, w.bridge.conv1.k, w.bridge.conv1.b, same));
    tape.b2 = relu_forward(conv2d_forward(tape.b1, w.bridge.conv2.k, w.bridge.conv2.b, same));

    cur = &tape.b2;
    for (int i = d - 1; i >= 0; --i) {
        auto& dt = tape.dec[i];
        dt.up_in = *cur;
        dt.up_out = upconv2x2_forward(dt.up_in, w.decoders[i].up.k, w.decoders[i].up.b);
        dt.cat = concat_channels(dt.up_out, tape.enc[i].a2);
        dt.a1 = relu_forward(
            conv2d_forward(dt.cat, w.decoders[i].convs.conv1.k, w.decoders[i].convs.conv1.b, same));
        dt.a2 = relu_forward(
            conv2d_forward(dt.a1, w.decoders[i].convs.conv2.k, w.decoders[i].convs.conv2.b, same));
        cur = &dt.a2;
    }
    tape.head_in = *cur;
    tape.output = sigmoid_forward(conv2d_forward(tape.head_in, w.head.k, w.head.b, same));
    return tape.output;
}

// Inference-only forward.
template <typename T>
TensorT<T> unet_forward(const UNetWeightsT<T>& w, const TensorT<T>& image) {
    UNetTape<T> tape;
    return unet_forward_tape(w, image, tape);
}

// Parameter gradients share the weights container shape.
template <typename T>
UNetWeightsT<T> zero_like(const UNetWeightsT<T>& w) {
    UNetWeightsT<T> g = w;
    auto& mut = g;
    for (ParamRef<T>& p : collect_params(mut)) std::fill(p.values->begin(), p.values->end(), T(0));
    return g;
}

template <typename T>
void add_inplace(TensorT<T>& dst, const TensorT<T>& src) {
    require_same_shape(dst, src, "add_inplace");
    for (std::size_t i = 0; i < dst.v.size(); ++i) dst.v[i] += src.v[i];
}

// Backward pass from dL/d(output). Fills parameter gradients into `grads`
// (same container shape as the weights) and returns dL/d(input).
template <typename T>
TensorT<T> unet_backward(const UNetWeightsT<T>& w, const UNetTape<T>& tape,
                         const TensorT<T>& grad_output, UNetWeightsT<T>& grads) {
    const ConvSpec same{Padding::Same, 1};
    const int d = w.config.depth;

    TensorT<T> g = sigmoid_backward(tape.output, grad_output);
    {
        ConvGrads<T> cg = conv2d_backward(tape.head_in, w.head.k, same, g);
        grads.head.k = std::move(cg.kernel);
        grads.head.b = std::move(cg.bias);
        g = std::move(cg.input);
    }

    // decoders ran deepest-last in index order d-1..0, so the reverse
    // sweep walks 0..d-1; each stage's upconv input is the output of the
    // next-deeper decoder (or the bridge)
    std::vector<TensorT<T>> skip_grads(d);
    for (int i = 0; i < d; ++i) {
        const auto& dt = tape.dec[i];
        g = relu_backward(dt.a2, g);
        ConvGrads<T> c2 = conv2d_backward(dt.a1, w.decoders[i].convs.conv2.k, same, g);
        grads.decoders[i].convs.conv2.k = std::move(c2.kernel);
        grads.decoders[i].convs.conv2.b = std::move(c2.bias);
        g = relu_backward(dt.a1, c2.input);
        ConvGrads<T> c1 = conv2d_backward(dt.cat, w.decoders[i].convs.conv1.k, same, g);
        grads.decoders[i].convs.conv1.k = std::move(c1.kernel);
        grads.decoders[i].convs.conv1.b = std::move(c1.bias);
        TensorT<T> g_up;
        split_channels(c1.input, dt.up_out.c, g_up, skip_grads[i]);
        ConvGrads<T> cu = upconv2x2_backward(dt.up_in, w.decoders[i].up.k, g_up);
        grads.decoders[i].up.k = std::move(cu.kernel);
        grads.decoders[i].up.b = std::move(cu.bias);
        g = std::move(cu.input);
    }

    g = relu_backward(tape.b2, g);
    {
        ConvGrads<T> cg = conv2d_backward(tape.b1, w.bridge.conv2.k, same, g);
        grads.bridge.conv2.k = std::move(cg.kernel);
        grads.bridge.conv2.b = std::move(cg.bias);
        g = relu_backward(tape.b1, cg.input);
    }
    {
        const TensorT<T>& bridge_in = tape.enc[d - 1].pool.out;
        ConvGrads<T> cg = conv2d_backward(bridge_in, w.bridge.conv1.k, same, g);
        grads.bridge.conv1.k = std::move(cg.kernel);
        grads.bridge.conv1.b = std::move(cg.bias);
        g = std::move(cg.input);
    }

    for (int i = d - 1; i >= 0; --i) {
        const auto& et = tape.enc[i];
        // the stage output feeds both the pool and the skip concat
        TensorT<T> ga2 = maxpool2x2_backward(et.a2.h, et.a2.w, et.pool, g);
        add_inplace(ga2, skip_grads[i]);
        g = relu_backward(et.a2, ga2);
        ConvGrads<T> c2 = conv2d_backward(et.a1, w.encoders[i].conv2.k, same, g);
        grads.encoders[i].conv2.k = std::move(c2.kernel);
        grads.encoders[i].conv2.b = std::move(c2.bias);
        g = relu_backward(et.a1, c2.input);
        const TensorT<T>& stage_in = i == 0 ? tape.input : tape.enc[i - 1].pool.out;
        ConvGrads<T> c1 = conv2d_backward(stage_in, w.encoders[i].conv1.k, same, g);
        grads.encoders[i].conv1.k = std::move(c1.kernel);
        grads.encoders[i].conv1.b = std::move(c1.bias);
        g = std::move(c1.input);
    }
    return g;
}

// Theoretical receptive-field radius of one output pixel, from the
// kernel/stride schedule alone. The measured radius (probe a single-pixel
// perturbation) is smaller because influence decays with depth.
int theoretical_receptive_radius(const UNetConfig& cfg);

// Largest Chebyshev distance at which flipping one input pixel moves any
// output by more than `threshold`.
int measure_receptive_radius(const UNetWeightsT<float>& w, int probe_size = 128,
                             float threshold = 1e-6f);

} // namespace chm

#endif // CHM_UNET_HPP_
