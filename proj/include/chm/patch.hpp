// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_PATCH_HPP_
#define CHM_PATCH_HPP_

#include <string>

#include "chm/raster.hpp"

namespace chm {

// Aligned (4-band image, 1-band quantized-height target) training sample.
struct PatchPair {
    Raster image;  // u8, 4 bands
    Raster target; // u8, 1 band
    int row = 0;   // pixel offset of the patch in its source raster
    int col = 0;
    std::string source_id;
};

} // namespace chm

#endif // CHM_PATCH_HPP_
