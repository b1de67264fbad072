// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/unet.hpp"

#include <cmath>

namespace chm {

int theoretical_receptive_radius(const UNetConfig& cfg) {
    // receptive-field size r and jump j through the layer schedule
    long r = 1, j = 1;
    auto conv3 = [&] { r += 2 * j; };
    for (int i = 0; i < cfg.depth; ++i) {
        conv3();
        conv3();
        r += j; // 2x2 pool
        j *= 2;
    }
    conv3();
    conv3();
    for (int i = cfg.depth - 1; i >= 0; --i) {
        j /= 2;
        r += j; // 2x2 transposed conv
        conv3();
        conv3();
    }
    return static_cast<int>(r / 2);
}

int measure_receptive_radius(const UNetWeightsT<float>& w, int probe_size, float threshold) {
    const int d = w.config.divisor();
    const int size = (probe_size / d) * d;
    const int mid = size / 2;

    TensorT<float> base(1, w.config.in_channels, size, size, 0.5f);
    const TensorT<float> y0 = unet_forward(w, base);
    TensorT<float> poked = base;
    for (int ic = 0; ic < poked.c; ++ic) poked.at(0, ic, mid, mid) = 1.0f;
    const TensorT<float> y1 = unet_forward(w, poked);

    int radius = 0;
    for (int iy = 0; iy < size; ++iy)
        for (int ix = 0; ix < size; ++ix) {
            const float delta = std::fabs(y1.at(0, 0, iy, ix) - y0.at(0, 0, iy, ix));
            if (delta > threshold)
                radius = std::max(radius, std::max(std::abs(iy - mid), std::abs(ix - mid)));
        }
    return radius;
}

} // namespace chm
