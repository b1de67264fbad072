// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "chm/checkpoint.hpp"
#include "chm/loss.hpp"
#include "chm/nn_ops.hpp"
#include "chm/optimizer.hpp"
#include "chm/reference.hpp"
#include "chm/unet.hpp"

using namespace chm;

namespace {

using T64 = TensorT<double>;

T64 random_tensor(int n, int c, int h, int w, std::uint64_t seed, double lo = -1.0,
                  double hi = 1.0) {
    T64 t(n, c, h, w);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    for (double& v : t.v) v = d(rng);
    return t;
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// central finite differences over every element of `v` against the
// analytic gradient, returning the worst relative error
template <typename Loss>
double max_fd_error(std::vector<double>& v, const std::vector<double>& analytic, Loss loss,
                    double step = 1e-3) {
    REQUIRE(v.size() == analytic.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double orig = v[i];
        v[i] = orig + step;
        const double up = loss();
        v[i] = orig - step;
        const double down = loss();
        v[i] = orig;
        worst = std::max(worst, rel_err((up - down) / (2.0 * step), analytic[i]));
    }
    return worst;
}

// weighted-sum objective turns any layer output into a scalar with a
// known output gradient
double weighted_sum(const T64& out, const T64& w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < out.v.size(); ++i) acc += out.v[i] * w.v[i];
    return acc;
}

} // namespace

TEST_CASE("1x1 identity kernel reproduces the input") {
    Tensor4 x(1, 1, 4, 4);
    for (std::size_t i = 0; i < x.v.size(); ++i) x.v[i] = static_cast<float>(i) * 0.25f;
    Tensor4 k(1, 1, 1, 1);
    k.v = {1.0f};
    const Tensor4 y = conv2d_forward(x, k, {0.0f});
    CHECK(y.v == x.v);
}

TEST_CASE("all-ones 3x3 kernel counts the padded neighborhood") {
    Tensor4 x(1, 1, 5, 5, 1.0f);
    Tensor4 k(1, 1, 3, 3, 1.0f);
    const Tensor4 y = conv2d_forward(x, k, {0.0f});
    CHECK(y.at(0, 0, 2, 2) == 9.0f);
    CHECK(y.at(0, 0, 0, 0) == 4.0f);
    CHECK(y.at(0, 0, 0, 2) == 6.0f);
}

TEST_CASE("conv shape errors") {
    Tensor4 x(1, 2, 4, 4);
    Tensor4 k(1, 3, 3, 3);
    CHECK_THROWS_AS(conv2d_forward(x, k, {0.0f}), ShapeError);
    Tensor4 k2(1, 2, 3, 3);
    CHECK_THROWS_AS(conv2d_forward(x, k2, {0.0f, 0.0f}), ShapeError);
    CHECK_THROWS_AS(conv2d_forward(x, k2, {0.0f}, {Padding::Same, 2}), ShapeError);
    CHECK_THROWS_AS(conv2d_forward(x, k2, {0.0f}, {Padding::None, 3}), ShapeError);
}

TEST_CASE("conv2d gradients match central finite differences") {
    for (const ConvSpec spec : {ConvSpec{Padding::Same, 1}, ConvSpec{Padding::None, 1},
                                ConvSpec{Padding::None, 2}}) {
        T64 x = random_tensor(2, 2, 6, 7, 100);
        T64 k = random_tensor(3, 2, 3, 3, 101);
        std::vector<double> bias = {0.1, -0.2, 0.3};
        const T64 y0 = conv2d_forward(x, k, bias, spec);
        const T64 w = random_tensor(y0.n, y0.c, y0.h, y0.w, 102);

        const ConvGrads<double> g = conv2d_backward(x, k, spec, w);
        auto loss = [&] { return weighted_sum(conv2d_forward(x, k, bias, spec), w); };
        CHECK(max_fd_error(x.v, g.input.v, loss) < 1e-4);
        CHECK(max_fd_error(k.v, g.kernel.v, loss) < 1e-4);
        CHECK(max_fd_error(bias, g.bias, loss) < 1e-4);
    }
}

TEST_CASE("maxpool picks the window max and routes ties to the first element") {
    Tensor4 x(1, 1, 2, 2);
    x.v = {1.0f, 2.0f, 3.0f, 4.0f};
    const auto r = maxpool2x2_forward(x);
    CHECK(r.out.v[0] == 4.0f);

    Tensor4 flat(1, 1, 2, 2, 5.0f);
    const auto tied = maxpool2x2_forward(flat);
    CHECK(tied.argmax[0] == 0); // scan order makes the top-left win
    Tensor4 gout(1, 1, 1, 1, 1.0f);
    const Tensor4 gin = maxpool2x2_backward(2, 2, tied, gout);
    CHECK(gin.v == std::vector<float>{1.0f, 0.0f, 0.0f, 0.0f});

    Tensor4 odd(1, 1, 3, 3);
    CHECK_THROWS_AS(maxpool2x2_forward(odd), ShapeError);
}

TEST_CASE("maxpool gradient passes finite differences away from ties") {
    T64 x = random_tensor(2, 3, 4, 4, 200);
    const auto fwd = maxpool2x2_forward(x);
    const T64 w = random_tensor(fwd.out.n, fwd.out.c, fwd.out.h, fwd.out.w, 201);
    const T64 gin = maxpool2x2_backward(x.h, x.w, fwd, w);
    auto loss = [&] { return weighted_sum(maxpool2x2_forward(x).out, w); };
    CHECK(max_fd_error(x.v, gin.v, loss) < 1e-4);
}

TEST_CASE("upconv expands 1x1 input by the channel sum under an all-ones kernel") {
    Tensor4 x(1, 3, 1, 1);
    x.v = {1.0f, 2.0f, 3.0f};
    Tensor4 k(3, 2, 2, 2, 1.0f);
    const Tensor4 y = upconv2x2_forward(x, k, {0.0f, 0.0f});
    CHECK(y.n == 1);
    CHECK(y.c == 2);
    CHECK(y.h == 2);
    CHECK(y.w == 2);
    for (float v : y.v) CHECK(v == 6.0f);
}

TEST_CASE("upconv doubles spatial dims") {
    Tensor4 x(2, 4, 5, 9);
    Tensor4 k(4, 3, 2, 2, 0.5f);
    const Tensor4 y = upconv2x2_forward(x, k, std::vector<float>(3, 0.0f));
    CHECK(y.n == 2);
    CHECK(y.c == 3);
    CHECK(y.h == 10);
    CHECK(y.w == 18);
}

TEST_CASE("upconv gradients match central finite differences") {
    T64 x = random_tensor(2, 3, 3, 4, 300);
    T64 k = random_tensor(3, 2, 2, 2, 301);
    std::vector<double> bias = {0.05, -0.15};
    const T64 y0 = upconv2x2_forward(x, k, bias);
    const T64 w = random_tensor(y0.n, y0.c, y0.h, y0.w, 302);

    const ConvGrads<double> g = upconv2x2_backward(x, k, w);
    auto loss = [&] { return weighted_sum(upconv2x2_forward(x, k, bias), w); };
    CHECK(max_fd_error(x.v, g.input.v, loss) < 1e-4);
    CHECK(max_fd_error(k.v, g.kernel.v, loss) < 1e-4);
    // bias gradient equals the output-gradient sum per channel
    double want0 = 0.0;
    for (int in = 0; in < w.n; ++in)
        for (int oy = 0; oy < w.h; ++oy)
            for (int ox = 0; ox < w.w; ++ox) want0 += w.at(in, 0, oy, ox);
    CHECK(rel_err(g.bias[0], want0) < 1e-10);
}

TEST_CASE("relu and sigmoid gradients match finite differences") {
    T64 x = random_tensor(1, 2, 4, 4, 400, -2.0, 2.0);
    const T64 w = random_tensor(1, 2, 4, 4, 401);
    {
        const T64 out = relu_forward(x);
        const T64 gin = relu_backward(out, w);
        auto loss = [&] { return weighted_sum(relu_forward(x), w); };
        CHECK(max_fd_error(x.v, gin.v, loss) < 1e-4);
    }
    {
        const T64 out = sigmoid_forward(x);
        const T64 gin = sigmoid_backward(out, w);
        auto loss = [&] { return weighted_sum(sigmoid_forward(x), w); };
        CHECK(max_fd_error(x.v, gin.v, loss) < 1e-4);
    }
}

TEST_CASE("full network gradients pass finite differences (depth 2, base 2, 8x8)") {
    UNetConfig cfg;
    cfg.in_channels = 4;
    cfg.depth = 2;
    cfg.base_channels = 2;
    cfg.seed = 1234;
    UNetWeightsT<double> weights = init_weights<double>(cfg);
    T64 x = random_tensor(1, 4, 8, 8, 500, 0.0, 1.0);
    const T64 target = random_tensor(1, 1, 8, 8, 501, 0.0, 1.0);

    UNetTape<double> tape;
    const T64 pred = unet_forward_tape(weights, x, tape);
    UNetWeightsT<double> grads = zero_like(weights);
    const T64 gin = unet_backward(weights, tape, mse_loss_grad(pred, target), grads);

    auto loss = [&] { return mse_loss(unet_forward(weights, x), target); };

    // step 1e-5: the larger layer-check step trips over relu kinks when a
    // pre-activation crosses zero inside the probe interval
    const double step = 1e-5;
    const auto params = collect_params(weights);
    const auto grad_refs = collect_params(grads);
    std::size_t total = 0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        INFO("parameter ", params[pi].name);
        CHECK(max_fd_error(*params[pi].values, *grad_refs[pi].values, loss, step) < 1e-4);
        total += params[pi].values->size();
    }
    CHECK(total == parameter_count(weights));
    CHECK(max_fd_error(x.v, gin.v, loss, step) < 1e-4);
}

TEST_CASE("zero weights produce the logistic of zero everywhere") {
    UNetConfig cfg = UNetConfig::desk();
    UNetWeightsT<float> w = init_weights<float>(cfg);
    for (auto& p : collect_params(w)) std::fill(p.values->begin(), p.values->end(), 0.0f);
    Tensor4 x(1, 4, 16, 16, 0.7f);
    const Tensor4 y = unet_forward(w, x);
    CHECK(y.c == 1);
    for (float v : y.v) CHECK(v == 0.5f);
}

TEST_CASE("network output stays strictly inside (0, 1)") {
    UNetConfig cfg = UNetConfig::desk();
    cfg.seed = 9;
    const UNetWeights w = init_weights<float>(cfg);
    Tensor4 x(2, 4, 16, 16);
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<float> d(0.0f, 1.0f);
    for (float& v : x.v) v = d(rng);
    const Tensor4 y = unet_forward(w, x);
    CHECK(y.n == 2);
    CHECK(y.c == 1);
    CHECK(y.h == 16);
    CHECK(y.w == 16);
    for (float v : y.v) {
        CHECK(v > 0.0f);
        CHECK(v < 1.0f);
    }
}

TEST_CASE("golden run: seeded weights and fixed input reproduce recorded outputs") {
    // recorded once from this configuration; guards cross-run and
    // cross-platform drift of the forward pass
    UNetConfig cfg{4, 2, 4, 42};
    const UNetWeights w = init_weights<float>(cfg);
    Tensor4 x(1, 4, 16, 16);
    for (int c = 0; c < 4; ++c)
        for (int y = 0; y < 16; ++y)
            for (int xx = 0; xx < 16; ++xx)
                x.at(0, c, y, xx) = static_cast<float>((c * 31 + y * 7 + xx * 13) % 256) / 255.0f;
    const Tensor4 out = unet_forward(w, x);

    double mean = 0.0;
    for (float v : out.v) mean += v;
    mean /= static_cast<double>(out.v.size());
    CHECK(mean == doctest::Approx(0.462538304).epsilon(1e-6));
    CHECK(out.at(0, 0, 0, 0) == doctest::Approx(0.470296234).epsilon(1e-6));
    CHECK(out.at(0, 0, 3, 11) == doctest::Approx(0.430674970).epsilon(1e-6));
    CHECK(out.at(0, 0, 8, 8) == doctest::Approx(0.475129068).epsilon(1e-6));
    CHECK(out.at(0, 0, 15, 15) == doctest::Approx(0.464525521).epsilon(1e-6));
    CHECK(out.at(0, 0, 12, 2) == doctest::Approx(0.442441612).epsilon(1e-6));
}

TEST_CASE("unet rejects bad input shapes") {
    const UNetWeights w = init_weights<float>(UNetConfig::desk()); // depth 3
    CHECK_THROWS_AS(unet_forward(w, Tensor4(1, 3, 16, 16)), ShapeError);
    CHECK_THROWS_AS(unet_forward(w, Tensor4(1, 4, 12, 16)), ShapeError);
}

TEST_CASE("input translation by 2^depth translates the output on the interior") {
    UNetConfig cfg = UNetConfig::desk();
    cfg.seed = 77;
    const UNetWeights w = init_weights<float>(cfg);
    const int shift = cfg.divisor(); // 8
    const int size = 128;
    std::mt19937_64 rng(78);
    std::uniform_real_distribution<float> d(0.0f, 1.0f);
    Tensor4 base(1, 4, size + shift, size + shift);
    for (float& v : base.v) v = d(rng);

    Tensor4 a(1, 4, size, size), b(1, 4, size, size);
    for (int c = 0; c < 4; ++c)
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                a.at(0, c, y, x) = base.at(0, c, y, x);
                b.at(0, c, y, x) = base.at(0, c, y + shift, x + shift);
            }
    const Tensor4 ya = unet_forward(w, a);
    const Tensor4 yb = unet_forward(w, b);

    // the compared positions must keep the full receptive field inside
    // both crops
    const int guard = theoretical_receptive_radius(cfg) + 1;
    const int hi = size - guard - shift;
    REQUIRE(guard < hi);
    int compared = 0;
    for (int y = guard; y < hi; ++y)
        for (int x = guard; x < hi; ++x) {
            CHECK(std::abs(ya.at(0, 0, y + shift, x + shift) - yb.at(0, 0, y, x)) <= 1e-6f);
            ++compared;
        }
    CHECK(compared > 100);
}

TEST_CASE("receptive radius: theory bounds the probe, probe stays under 46 for depth 3") {
    UNetConfig cfg = UNetConfig::desk();
    cfg.seed = 5;
    CHECK(theoretical_receptive_radius(cfg) >= 40);
    const UNetWeights w = init_weights<float>(cfg);
    const int measured = measure_receptive_radius(w, 128, 1e-6f);
    CHECK(measured <= 46);
    CHECK(measured >= 4); // sanity: influence reaches beyond one conv block
}

TEST_CASE("parameter count: paper preset lands on the classical schedule") {
    const UNetWeightsT<float> paper = init_weights<float>(UNetConfig::paper());
    CHECK(parameter_count(paper) == 31032321u);
    const UNetWeightsT<float> desk = init_weights<float>(UNetConfig::desk());
    CHECK(parameter_count(desk) < 600000u);
}

TEST_CASE("mse and mae follow the definitions") {
    Tensor4 p(1, 1, 4, 4, 0.5f), t(1, 1, 4, 4, 0.5f);
    CHECK(mse_loss(p, t) == 0.0);
    CHECK(mae_metric(p, t) == 0.0);

    for (float& v : p.v) v = 0.523f;
    CHECK(mse_loss(p, t) == doctest::Approx(5.29e-4).epsilon(1e-4));
    CHECK(mae_metric(p, t) == doctest::Approx(2.3).epsilon(1e-4));

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<float> d(0.0f, 1.0f);
    for (float& v : p.v) v = d(rng);
    for (float& v : t.v) v = d(rng);
    double sq = 0.0, ab = 0.0;
    for (std::size_t i = 0; i < p.v.size(); ++i) {
        sq += (static_cast<double>(p.v[i]) - t.v[i]) * (static_cast<double>(p.v[i]) - t.v[i]);
        ab += std::abs(static_cast<double>(p.v[i]) - t.v[i]);
    }
    CHECK(mse_loss(p, t) == doctest::Approx(sq / 16.0).epsilon(1e-12));
    CHECK(mae_metric(p, t) == doctest::Approx(ab / 16.0 * 100.0).epsilon(1e-12));

    Tensor4 bad(1, 1, 2, 2);
    CHECK_THROWS_AS(mse_loss(p, bad), ShapeError);
}

TEST_CASE("rmsprop: zero gradient leaves parameters untouched") {
    UNetConfig cfg{1, 1, 2, 3};
    UNetWeightsT<float> w = init_weights<float>(cfg);
    UNetWeightsT<float> g = zero_like(w);
    const UNetWeightsT<float> before = w;
    RmspropState<float> state;
    rmsprop_step(collect_params(w), collect_params(g), state);
    const auto pb = collect_params(const_cast<UNetWeightsT<float>&>(before));
    const auto pa = collect_params(w);
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i].values == *pb[i].values);
}

TEST_CASE("rmsprop single-step hand calculation") {
    // one scalar parameter: s = 0.1, step = lr / (sqrt(0.1) + eps)
    UNetConfig cfg{1, 1, 1, 0};
    UNetWeightsT<float> w = init_weights<float>(cfg);
    UNetWeightsT<float> g = zero_like(w);
    auto params = collect_params(w);
    auto grads = collect_params(g);
    const float w0 = (*params[0].values)[0];
    (*grads[0].values)[0] = 1.0f;
    RmspropState<float> state; // lr 1e-4, decay 0.9, eps 1e-7
    rmsprop_step(params, grads, state);

    const double expect_s = 0.1;
    const double expect_dw = -1e-4 / (std::sqrt(0.1) + 1e-7);
    CHECK(state.accum[params[0].name][0] == doctest::Approx(expect_s).epsilon(1e-6));
    CHECK((*params[0].values)[0] - w0 == doctest::Approx(expect_dw).epsilon(1e-5));
}

TEST_CASE("rmsprop moves every parameter against its gradient") {
    UNetConfig cfg{2, 1, 2, 8};
    UNetWeightsT<float> w = init_weights<float>(cfg);
    UNetWeightsT<float> g = zero_like(w);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<float> d(-1.0f, 1.0f);
    for (auto& p : collect_params(g))
        for (float& v : *p.values) v = d(rng);
    const UNetWeightsT<float> before = w;
    RmspropState<float> state;
    rmsprop_step(collect_params(w), collect_params(g), state);
    const auto pb = collect_params(const_cast<UNetWeightsT<float>&>(before));
    const auto pa = collect_params(w);
    const auto pg = collect_params(g);
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pa[i].values->size(); ++j) {
            const float delta = (*pa[i].values)[j] - (*pb[i].values)[j];
            const float grad = (*pg[i].values)[j];
            if (grad != 0.0f) CHECK(delta * grad < 0.0f);
        }
}

TEST_CASE("checkpoint round-trips weights, optimizer state and epoch") {
    UNetConfig cfg = UNetConfig::desk();
    cfg.seed = 21;
    Checkpoint ckpt;
    ckpt.weights = init_weights<float>(cfg);
    ckpt.epoch = 17;
    ckpt.best_val_loss = 0.001954955;
    ckpt.opt.config.learning_rate = 1e-4;
    ckpt.opt.accum["enc0.conv1.k"] = std::vector<float>(ckpt.weights.encoders[0].conv1.k.v.size(), 0.25f);

    save_checkpoint(ckpt, "nn_ckpt.bin");
    const Checkpoint back = load_checkpoint("nn_ckpt.bin");
    CHECK(back.epoch == 17);
    CHECK(back.best_val_loss == 0.001954955);
    CHECK(back.weights.config == cfg);
    auto pa = collect_params(const_cast<UNetWeights&>(ckpt.weights));
    auto pb = collect_params(const_cast<UNetWeights&>(back.weights));
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i].values == *pb[i].values);
    CHECK(back.opt.accum.at("enc0.conv1.k") == ckpt.opt.accum.at("enc0.conv1.k"));
}

TEST_CASE("truncated checkpoints are corrupt, wrong configs are incompatible") {
    UNetConfig cfg = UNetConfig::desk();
    Checkpoint ckpt;
    ckpt.weights = init_weights<float>(cfg);
    save_checkpoint(ckpt, "nn_trunc.bin");
    std::ifstream in("nn_trunc.bin", std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out("nn_trunc.bin", std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_AS(load_checkpoint("nn_trunc.bin"), CorruptFileError);

    save_checkpoint(ckpt, "nn_cfg.bin");
    UNetConfig depth4 = cfg;
    depth4.depth = 4;
    CHECK_THROWS_AS(load_checkpoint("nn_cfg.bin", depth4), IncompatibleCheckpointError);
    CHECK_NOTHROW(load_checkpoint("nn_cfg.bin", cfg));

    std::ofstream junk("nn_junk.bin", std::ios::binary);
    junk << "not a checkpoint at all";
    junk.close();
    CHECK_THROWS_AS(load_checkpoint("nn_junk.bin"), IncompatibleCheckpointError);
}

TEST_CASE("production conv kernels match the serial reference bit-exactly") {
    std::mt19937_64 rng(91);
    std::uniform_real_distribution<float> d(-1.0f, 1.0f);
    Tensor4 x(2, 3, 12, 14);
    Tensor4 k(4, 3, 3, 3);
    std::vector<float> bias = {0.1f, 0.2f, -0.3f, 0.0f};
    for (float& v : x.v) v = d(rng);
    for (float& v : k.v) v = d(rng);

    const ConvSpec spec{Padding::Same, 1};
    const Tensor4 y_par = conv2d_forward(x, k, bias, spec);
    const Tensor4 y_ser = ref::conv2d_forward(x, k, bias, spec);
    CHECK(y_par.v == y_ser.v);

    Tensor4 gout(2, 4, 12, 14);
    for (float& v : gout.v) v = d(rng);
    const auto g_par = conv2d_backward(x, k, spec, gout);
    const auto g_ser = ref::conv2d_backward(x, k, spec, gout);
    CHECK(g_par.input.v == g_ser.input.v);
    CHECK(g_par.kernel.v == g_ser.kernel.v);
    CHECK(g_par.bias == g_ser.bias);
}
