// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0
//
// Convolution-network layers with exact analytic gradients. All kernels
// parallelize over independent output elements, so results are identical
// for any thread count. Inner sums accumulate in double.

#ifndef CHM_NN_OPS_HPP_
#define CHM_NN_OPS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "chm/parallel.hpp"
#include "chm/tensor.hpp"

namespace chm {

enum class Padding { Same, None };

struct ConvSpec {
    Padding padding = Padding::Same;
    int stride = 1;
};

namespace detail {

inline int conv_pad(Padding padding, int k, int stride) {
    if (padding == Padding::None) return 0;
    if (stride != 1) throw ShapeError("same padding requires stride 1");
    if (k % 2 == 0) throw ShapeError("same padding requires an odd kernel");
    return (k - 1) / 2;
}

inline int conv_out_dim(int in, int k, int pad, int stride) {
    const int span = in + 2 * pad - k;
    if (span < 0) throw ShapeError("kernel larger than padded input");
    return span / stride + 1;
}

} // namespace detail

// Cross-correlation. kernel is (out_c, in_c, kh, kw); bias has out_c
// entries.
template <typename T>
TensorT<T> conv2d_forward(const TensorT<T>& x, const TensorT<T>& k, const std::vector<T>& bias,
                          ConvSpec spec = {}) {
    if (spec.stride != 1 && spec.stride != 2) throw ShapeError("conv stride must be 1 or 2");
    if (k.c != x.c) throw ShapeError("conv kernel in-channels mismatch");
    if (static_cast<int>(bias.size()) != k.n) throw ShapeError("conv bias size mismatch");
    const int pad_y = detail::conv_pad(spec.padding, k.h, spec.stride);
    const int pad_x = detail::conv_pad(spec.padding, k.w, spec.stride);
    const int oh = detail::conv_out_dim(x.h, k.h, pad_y, spec.stride);
    const int ow = detail::conv_out_dim(x.w, k.w, pad_x, spec.stride);

    TensorT<T> y(x.n, k.n, oh, ow);
    const std::int64_t planes = static_cast<std::int64_t>(x.n) * k.n;
#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (std::int64_t p = 0; p < planes; ++p) {
        const int in = static_cast<int>(p / k.n);
        const int oc = static_cast<int>(p % k.n);
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                double acc = static_cast<double>(bias[oc]);
                for (int ic = 0; ic < x.c; ++ic) {
                    for (int ky = 0; ky < k.h; ++ky) {
                        const int iy = oy * spec.stride + ky - pad_y;
                        if (iy < 0 || iy >= x.h) continue;
                        for (int kx = 0; kx < k.w; ++kx) {
                            const int ix = ox * spec.stride + kx - pad_x;
                            if (ix < 0 || ix >= x.w) continue;
                            acc += static_cast<double>(x.at(in, ic, iy, ix)) *
                                   static_cast<double>(k.at(oc, ic, ky, kx));
                        }
                    }
                }
                y.at(in, oc, oy, ox) = static_cast<T>(acc);
            }
        }
    }
    return y;
}

template <typename T>
struct ConvGrads {
    TensorT<T> input;
    TensorT<T> kernel;
    std::vector<T> bias;
};

template <typename T>
ConvGrads<T> conv2d_backward(const TensorT<T>& x, const TensorT<T>& k, ConvSpec spec,
                             const TensorT<T>& gout) {
    const int pad_y = detail::conv_pad(spec.padding, k.h, spec.stride);
    const int pad_x = detail::conv_pad(spec.padding, k.w, spec.stride);
    const int oh = detail::conv_out_dim(x.h, k.h, pad_y, spec.stride);
    const int ow = detail::conv_out_dim(x.w, k.w, pad_x, spec.stride);
    if (gout.n != x.n || gout.c != k.n || gout.h != oh || gout.w != ow)
        throw ShapeError("conv gradient shape mismatch");

    ConvGrads<T> g;
    g.input = TensorT<T>(x.n, x.c, x.h, x.w);
    g.kernel = TensorT<T>(k.n, k.c, k.h, k.w);
    g.bias.assign(k.n, T(0));

    // input gradient, gathered per input element
    const std::int64_t in_planes = static_cast<std::int64_t>(x.n) * x.c;
#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (std::int64_t p = 0; p < in_planes; ++p) {
        const int in = static_cast<int>(p / x.c);
        const int ic = static_cast<int>(p % x.c);
        for (int iy = 0; iy < x.h; ++iy) {
            for (int ix = 0; ix < x.w; ++ix) {
                double acc = 0.0;
                for (int oc = 0; oc < k.n; ++oc) {
                    for (int ky = 0; ky < k.h; ++ky) {
                        const int ty = iy + pad_y - ky;
                        if (ty < 0 || ty % spec.stride != 0) continue;
                        const int oy = ty / spec.stride;
                        if (oy >= oh) continue;
                        for (int kx = 0; kx < k.w; ++kx) {
                            const int tx = ix + pad_x - kx;
                            if (tx < 0 || tx % spec.stride != 0) continue;
                            const int ox = tx / spec.stride;
                            if (ox >= ow) continue;
                            acc += static_cast<double>(gout.at(in, oc, oy, ox)) *
                                   static_cast<double>(k.at(oc, ic, ky, kx));
                        }
                    }
                }
                g.input.at(in, ic, iy, ix) = static_cast<T>(acc);
            }
        }
    }

    // kernel gradient, each (oc, ic) slice owned by one thread
    const std::int64_t k_planes = static_cast<std::int64_t>(k.n) * k.c;
#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (std::int64_t p = 0; p < k_planes; ++p) {
        const int oc = static_cast<int>(p / k.c);
        const int ic = static_cast<int>(p % k.c);
        for (int ky = 0; ky < k.h; ++ky) {
            for (int kx = 0; kx < k.w; ++kx) {
                double acc = 0.0;
                for (int in = 0; in < x.n; ++in) {
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy * spec.stride + ky - pad_y;
                        if (iy < 0 || iy >= x.h) continue;
                        for (int ox = 0; ox < ow; ++ox) {
                            const int ix = ox * spec.stride + kx - pad_x;
                            if (ix < 0 || ix >= x.w) continue;
                            acc += static_cast<double>(gout.at(in, oc, oy, ox)) *
                                   static_cast<double>(x.at(in, ic, iy, ix));
                        }
                    }
                }
                g.kernel.at(oc, ic, ky, kx) = static_cast<T>(acc);
            }
        }
    }

#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (int oc = 0; oc < k.n; ++oc) {
        double acc = 0.0;
        for (int in = 0; in < x.n; ++in)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox)
                    acc += static_cast<double>(gout.at(in, oc, oy, ox));
        g.bias[oc] = static_cast<T>(acc);
    }
    return g;
}

template <typename T>
struct PoolResult {
    TensorT<T> out;
    std::vector<std::int32_t> argmax; // flat input index per output element
};

// 2x2 max pool, stride 2. Ties go to the first element in window scan
// order (top-left, top-right, bottom-left, bottom-right).
template <typename T>
PoolResult<T> maxpool2x2_forward(const TensorT<T>& x) {
    if (x.h % 2 != 0 || x.w % 2 != 0) throw ShapeError("maxpool2x2 needs even spatial dims");
    PoolResult<T> r;
    r.out = TensorT<T>(x.n, x.c, x.h / 2, x.w / 2);
    r.argmax.assign(r.out.size(), 0);
    const std::int64_t planes = static_cast<std::int64_t>(x.n) * x.c;
#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (std::int64_t p = 0; p < planes; ++p) {
        const int in = static_cast<int>(p / x.c);
        const int ic = static_cast<int>(p % x.c);
        for (int oy = 0; oy < r.out.h; ++oy) {
            for (int ox = 0; ox < r.out.w; ++ox) {
                std::size_t best_idx = x.idx(in, ic, 2 * oy, 2 * ox);
                T best = x.v[best_idx];
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const std::size_t i = x.idx(in, ic, 2 * oy + dy, 2 * ox + dx);
                        if (x.v[i] > best) {
                            best = x.v[i];
                            best_idx = i;
                        }
                    }
                r.out.at(in, ic, oy, ox) = best;
                r.argmax[r.out.idx(in, ic, oy, ox)] = static_cast<std::int32_t>(best_idx);
            }
        }
    }
    return r;
}

template <typename T>
TensorT<T> maxpool2x2_backward(int in_h, int in_w, const PoolResult<T>& fwd,
                               const TensorT<T>& gout) {
    require_same_shape(fwd.out, gout, "maxpool2x2_backward");
    TensorT<T> gin(gout.n, gout.c, in_h, in_w);
    const std::int64_t planes = static_cast<std::int64_t>(gout.n) * gout.c;
#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (std::int64_t p = 0; p < planes; ++p) {
        const int in = static_cast<int>(p / gout.c);
        const int ic = static_cast<int>(p % gout.c);
        for (int oy = 0; oy < gout.h; ++oy)
            for (int ox = 0; ox < gout.w; ++ox) {
                const std::size_t o = gout.idx(in, ic, oy, ox);
                gin.v[fwd.argmax[o]] += gout.v[o];
            }
    }
    return gin;
}

// Transposed convolution, kernel 2x2, stride 2: doubles both spatial
// dims. kernel is (in_c, out_c, 2, 2). Every output pixel receives
// exactly one input contribution, so forward is a pure gather.
template <typename T>
TensorT<T> upconv2x2_forward(const TensorT<T>& x, const TensorT<T>& k,
                             const std::vector<T>& bias) {
    if (k.n != x.c) throw ShapeError("upconv kernel in-channels mismatch");
    if (k.h != 2 || k.w != 2) throw ShapeError("upconv kernel must be 2x2");
    if (static_cast<int>(bias.size()) != k.c) throw ShapeError("upconv bias size mismatch");
    TensorT<T> y(x.n, k.c, 2 * x.h, 2 * x.w);
    const std::int64_t planes = static_cast<std::int64_t>(x.n) * k.c;
#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (std::int64_t p = 0; p < planes; ++p) {
        const int in = static_cast<int>(p / k.c);
        const int oc = static_cast<int>(p % k.c);
        for (int oy = 0; oy < y.h; ++oy) {
            const int iy = oy >> 1, ky = oy & 1;
            for (int ox = 0; ox < y.w; ++ox) {
                const int ix = ox >> 1, kx = ox & 1;
                double acc = static_cast<double>(bias[oc]);
                for (int ic = 0; ic < x.c; ++ic)
                    acc += static_cast<double>(x.at(in, ic, iy, ix)) *
                           static_cast<double>(k.at(ic, oc, ky, kx));
                y.at(in, oc, oy, ox) = static_cast<T>(acc);
            }
        }
    }
    return y;
}

template <typename T>
ConvGrads<T> upconv2x2_backward(const TensorT<T>& x, const TensorT<T>& k,
                                const TensorT<T>& gout) {
    if (gout.n != x.n || gout.c != k.c || gout.h != 2 * x.h || gout.w != 2 * x.w)
        throw ShapeError("upconv gradient shape mismatch");
    ConvGrads<T> g;
    g.input = TensorT<T>(x.n, x.c, x.h, x.w);
    g.kernel = TensorT<T>(k.n, k.c, k.h, k.w);
    g.bias.assign(k.c, T(0));

    const std::int64_t in_planes = static_cast<std::int64_t>(x.n) * x.c;
#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (std::int64_t p = 0; p < in_planes; ++p) {
        const int in = static_cast<int>(p / x.c);
        const int ic = static_cast<int>(p % x.c);
        for (int iy = 0; iy < x.h; ++iy)
            for (int ix = 0; ix < x.w; ++ix) {
                double acc = 0.0;
                for (int oc = 0; oc < k.c; ++oc)
                    for (int ky = 0; ky < 2; ++ky)
                        for (int kx = 0; kx < 2; ++kx)
                            acc += static_cast<double>(gout.at(in, oc, 2 * iy + ky, 2 * ix + kx)) *
                                   static_cast<double>(k.at(ic, oc, ky, kx));
                g.input.at(in, ic, iy, ix) = static_cast<T>(acc);
            }
    }

    const std::int64_t k_planes = static_cast<std::int64_t>(k.n) * k.c;
#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (std::int64_t p = 0; p < k_planes; ++p) {
        const int ic = static_cast<int>(p / k.c);
        const int oc = static_cast<int>(p % k.c);
        for (int ky = 0; ky < 2; ++ky)
            for (int kx = 0; kx < 2; ++kx) {
                double acc = 0.0;
                for (int in = 0; in < x.n; ++in)
                    for (int iy = 0; iy < x.h; ++iy)
                        for (int ix = 0; ix < x.w; ++ix)
                            acc += static_cast<double>(x.at(in, ic, iy, ix)) *
                                   static_cast<double>(gout.at(in, oc, 2 * iy + ky, 2 * ix + kx));
                g.kernel.at(ic, oc, ky, kx) = static_cast<T>(acc);
            }
    }

#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (int oc = 0; oc < k.c; ++oc) {
        double acc = 0.0;
        for (int in = 0; in < gout.n; ++in)
            for (int oy = 0; oy < gout.h; ++oy)
                for (int ox = 0; ox < gout.w; ++ox)
                    acc += static_cast<double>(gout.at(in, oc, oy, ox));
        g.bias[oc] = static_cast<T>(acc);
    }
    return g;
}

template <typename T>
TensorT<T> relu_forward(const TensorT<T>& x) {
    TensorT<T> y = x;
    for (T& v : y.v) v = std::max(v, T(0));
    return y;
}

// mask from the forward output: zero where the activation was clipped
template <typename T>
TensorT<T> relu_backward(const TensorT<T>& out, const TensorT<T>& gout) {
    require_same_shape(out, gout, "relu_backward");
    TensorT<T> gin = gout;
    for (std::size_t i = 0; i < gin.v.size(); ++i)
        if (!(out.v[i] > T(0))) gin.v[i] = T(0);
    return gin;
}

template <typename T>
TensorT<T> sigmoid_forward(const TensorT<T>& x) {
    TensorT<T> y = x;
    for (T& v : y.v) v = T(1) / (T(1) + std::exp(-v));
    return y;
}

template <typename T>
TensorT<T> sigmoid_backward(const TensorT<T>& out, const TensorT<T>& gout) {
    require_same_shape(out, gout, "sigmoid_backward");
    TensorT<T> gin = gout;
    for (std::size_t i = 0; i < gin.v.size(); ++i)
        gin.v[i] *= out.v[i] * (T(1) - out.v[i]);
    return gin;
}

// channel concatenation [a | b]
template <typename T>
TensorT<T> concat_channels(const TensorT<T>& a, const TensorT<T>& b) {
    if (a.n != b.n || a.h != b.h || a.w != b.w)
        throw ShapeError("concat_channels: spatial/batch dims differ");
    TensorT<T> y(a.n, a.c + b.c, a.h, a.w);
    for (int in = 0; in < a.n; ++in) {
        std::copy_n(&a.v[a.idx(in, 0, 0, 0)], static_cast<std::size_t>(a.c) * a.h * a.w,
                    &y.v[y.idx(in, 0, 0, 0)]);
        std::copy_n(&b.v[b.idx(in, 0, 0, 0)], static_cast<std::size_t>(b.c) * b.h * b.w,
                    &y.v[y.idx(in, a.c, 0, 0)]);
    }
    return y;
}

template <typename T>
void split_channels(const TensorT<T>& g, int c_first, TensorT<T>& ga, TensorT<T>& gb) {
    ga = TensorT<T>(g.n, c_first, g.h, g.w);
    gb = TensorT<T>(g.n, g.c - c_first, g.h, g.w);
    for (int in = 0; in < g.n; ++in) {
        std::copy_n(&g.v[g.idx(in, 0, 0, 0)], static_cast<std::size_t>(c_first) * g.h * g.w,
                    &ga.v[ga.idx(in, 0, 0, 0)]);
        std::copy_n(&g.v[g.idx(in, c_first, 0, 0)],
                    static_cast<std::size_t>(g.c - c_first) * g.h * g.w,
                    &gb.v[gb.idx(in, 0, 0, 0)]);
    }
}

} // namespace chm

#endif // CHM_NN_OPS_HPP_
