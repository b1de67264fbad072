// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_PNG_HPP_
#define CHM_PNG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "chm/raster.hpp"

namespace chm {

void write_png_gray8(const std::string& path, const std::vector<std::uint8_t>& pixels,
                     int width, int height);

// 8-bit grayscale render of a height raster, linear 0..102 m ramp.
// u8 rasters render their quantized values directly.
void render_height_png(const Raster& r, const std::string& path);

} // namespace chm

#endif // CHM_PNG_HPP_
