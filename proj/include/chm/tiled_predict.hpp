// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0
//
// Seam-free whole-image inference: pad, tile with overlap, predict each
// tile, center-crop and stitch. Tile cores partition the padded interior,
// so every output pixel is written exactly once and no blending happens.

#ifndef CHM_TILED_PREDICT_HPP_
#define CHM_TILED_PREDICT_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "chm/raster.hpp"
#include "chm/unet.hpp"

namespace chm {

struct TilePlan {
    int source_width = 0, source_height = 0;
    int tile = 1152;  // forwarded window, divisible by 2^depth
    int margin = 64;  // cropped from every tile side; overlap = 2 * margin
    int padded_width = 0, padded_height = 0;
    std::vector<std::pair<int, int>> origins; // (row, col), top-left in padded space

    int core() const { return tile - 2 * margin; }
};

// Smallest k per axis with k * (tile - 2 * margin) >= source dimension;
// padded dim = 2 * margin + k * core. Core and margin must be divisible
// by 2^depth so every tile is a valid network input.
TilePlan plan_tiles(int width, int height, int tile = 1152, int margin = 64, int depth = 4);

enum class PadMode { Replicate, Zero };

// 4-band u8 image -> single-band f32 height raster in meters (network
// output x 100), same grid as the input. `write_counts`, when given, is
// filled with the per-pixel stitch write count (the no-blend invariant
// makes every entry 1).
Raster predict_image(const Raster& image, const UNetWeights& weights, const TilePlan& plan,
                     PadMode pad = PadMode::Replicate,
                     std::vector<std::uint32_t>* write_counts = nullptr);

// Height raster (meters) -> quantized u8 per the 2.5x convention.
Raster quantize_heights(const Raster& heights);

} // namespace chm

#endif // CHM_TILED_PREDICT_HPP_
