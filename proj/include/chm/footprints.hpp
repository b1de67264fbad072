// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0
//
// Building-footprint polygons and their rasterized, buffered mask.

#ifndef CHM_FOOTPRINTS_HPP_
#define CHM_FOOTPRINTS_HPP_

#include <string>
#include <vector>

#include "chm/raster.hpp"

namespace chm {

struct XY {
    double x = 0, y = 0;
};

// Each polygon is a single closed ring (first vertex implicitly joined to
// the last), coordinates in the raster CRS.
struct FootprintSet {
    std::vector<std::vector<XY>> polygons;
};

// JSON file: {"polygons": [[[x, y], ...], ...]}
FootprintSet read_footprints(const std::string& path);
void write_footprints(const FootprintSet& fps, const std::string& path);

struct FootprintMask {
    Raster mask; // u8, 1 = covered
    int skipped_rings = 0;
};

// mask = 1 where the pixel center is inside any ring (even-odd rule) or
// within `buffer` meters of any ring edge or vertex. Rings with fewer
// than 3 distinct vertices are skipped and counted.
FootprintMask rasterize_footprints(const FootprintSet& fps, const GridSpec& grid,
                                   double buffer = 2.0);

} // namespace chm

#endif // CHM_FOOTPRINTS_HPP_
