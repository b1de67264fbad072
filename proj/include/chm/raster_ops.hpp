// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_RASTER_OPS_HPP_
#define CHM_RASTER_OPS_HPP_

#include <vector>

#include "chm/patch.hpp"
#include "chm/raster.hpp"

namespace chm {

// Nearest-neighbor resample onto a grid sharing the origin with output
// dimension ceil(extent / target_pixel_size). No interpolation; output
// values are a subset of input values.
Raster resample_nearest(const Raster& r, double target_pixel_size);

// Non-overlapping patches anchored at multiples of `patch`, row-major,
// partial edge patches dropped.
std::vector<PatchPair> retile(const Raster& image, const Raster& chm, int patch = 256,
                              const std::string& source_id = "");

// Zero out pixels where mask == 1; mask is a 1-band u8 raster on the same
// grid. Idempotent.
Raster apply_mask(const Raster& chm, const Raster& mask);

enum class BlockStat { Median, Mean };

// factor x factor block statistic; trailing partial blocks dropped.
// Nodata pixels are excluded; an all-nodata block stays nodata. Median of
// an even count is the mean of the two middle values.
Raster aggregate_block(const Raster& r, int factor, BlockStat stat);

} // namespace chm

#endif // CHM_RASTER_OPS_HPP_
