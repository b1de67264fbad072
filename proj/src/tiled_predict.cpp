// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/tiled_predict.hpp"

#include <algorithm>
#include <cmath>

#include "chm/surfaces.hpp"
#include "chm/train.hpp"

namespace chm {

TilePlan plan_tiles(int width, int height, int tile, int margin, int depth) {
    if (width < 1 || height < 1) throw ParameterError("image dimensions must be positive");
    if (margin < 0) throw ParameterError("margin must be >= 0");
    if (tile <= 2 * margin) throw ParameterError("tile size must exceed twice the margin");
    const int divisor = 1 << depth;
    const int core = tile - 2 * margin;
    if (core % divisor != 0)
        throw ParameterError("tile core (tile - 2 * margin) must be divisible by 2^depth");
    if (margin % divisor != 0) throw ParameterError("margin must be divisible by 2^depth");

    TilePlan plan;
    plan.source_width = width;
    plan.source_height = height;
    plan.tile = tile;
    plan.margin = margin;
    const int kx = (width + core - 1) / core;
    const int ky = (height + core - 1) / core;
    plan.padded_width = 2 * margin + kx * core;
    plan.padded_height = 2 * margin + ky * core;
    plan.origins.reserve(static_cast<std::size_t>(kx) * ky);
    for (int iy = 0; iy < ky; ++iy)
        for (int ix = 0; ix < kx; ++ix) plan.origins.emplace_back(iy * core, ix * core);
    return plan;
}

Raster predict_image(const Raster& image, const UNetWeights& weights, const TilePlan& plan,
                     PadMode pad, std::vector<std::uint32_t>* write_counts) {
    if (image.dtype != DType::U8) throw ParameterError("predict_image expects a u8 image");
    if (image.bands != weights.config.in_channels)
        throw ShapeError("image band count does not match the network input channels");
    if (plan.source_width != image.grid.width || plan.source_height != image.grid.height)
        throw ParameterError("tile plan was made for a different image size");
    if (plan.tile % weights.config.divisor() != 0)
        throw ParameterError("tile size is not divisible by the network's 2^depth");

    const int src_w = image.grid.width, src_h = image.grid.height;
    const int m = plan.margin, tile = plan.tile;

    Raster out = Raster::make_f32(image.grid, 1, 0.0f);
    if (write_counts) write_counts->assign(static_cast<std::size_t>(src_w) * src_h, 0);

    // source pixel behind a padded coordinate; the source sits at offset
    // (margin, margin) and the border fill either replicates the edge or
    // reads as zero
    auto sample = [&](int band, int prow, int pcol) -> float {
        const int r = prow - m, c = pcol - m;
        if (r >= 0 && r < src_h && c >= 0 && c < src_w)
            return image.at_u8(band, r, c) / 255.0f;
        if (pad == PadMode::Zero) return 0.0f;
        return image.at_u8(band, std::clamp(r, 0, src_h - 1), std::clamp(c, 0, src_w - 1)) /
               255.0f;
    };

    Tensor4 window(1, image.bands, tile, tile);
    for (const auto& [orow, ocol] : plan.origins) {
        for (int b = 0; b < image.bands; ++b)
            for (int ty = 0; ty < tile; ++ty)
                for (int tx = 0; tx < tile; ++tx)
                    window.at(0, b, ty, tx) = sample(b, orow + ty, ocol + tx);

        const Tensor4 pred = unet_forward(weights, window);

        for (int ty = m; ty < tile - m; ++ty) {
            const int r = orow + ty - m;
            if (r >= src_h) break;
            for (int tx = m; tx < tile - m; ++tx) {
                const int c = ocol + tx - m;
                if (c >= src_w) break;
                out.at_f32(0, r, c) =
                    pred.at(0, 0, ty, tx) * static_cast<float>(kHeightScaleMeters);
                if (write_counts)
                    ++(*write_counts)[static_cast<std::size_t>(r) * src_w + c];
            }
        }
    }
    return out;
}

Raster quantize_heights(const Raster& heights) {
    if (heights.dtype != DType::F32 || heights.bands != 1)
        throw ParameterError("quantize_heights expects a 1-band f32 raster");
    Raster q = Raster::make_u8(heights.grid, 1);
    for (std::size_t i = 0; i < heights.f32.size(); ++i) {
        const float v = heights.f32[i];
        if (heights.is_nodata(v)) continue; // quantizes to 0
        q.u8[i] = static_cast<std::uint8_t>(
            std::clamp<long>(std::lround(static_cast<double>(v) * kChmScale), 0L, 255L));
    }
    return q;
}

} // namespace chm
