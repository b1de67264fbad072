// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0
//
// Terrain / canopy surface rasters from classified point clouds.

#ifndef CHM_SURFACES_HPP_
#define CHM_SURFACES_HPP_

#include <vector>

#include "chm/point_cloud.hpp"
#include "chm/raster.hpp"
#include "chm/tin.hpp"

namespace chm {

struct PitfreeParams {
    // ascending height-above-terrain cutoffs, first must be 0
    std::vector<double> thresholds = {0.0, 2.0, 5.0, 10.0, 15.0};
    double max_edge_base = 0.0;   // 0 = unlimited, applies to the all-returns layer
    double max_edge_layers = 1.5; // applies to each thresholded layer

    void validate() const;
};

// Replace every nodata pixel with the value of the nearest valid pixel
// (center distance, ties to the smallest row then column). No-op when the
// raster has no nodata value or no valid pixel exists.
void fill_nodata_nearest(Raster& r);

// TIN of ground returns (class 2, duplicate (x,y) keep min z), rasterized
// with unlimited edge length and gap-filled.
Raster build_dtm(const PointCloud& cloud, const GridSpec& grid);

// Pit-free canopy surface: max over the all-first-returns layer and one
// layer per threshold restricted to first returns at least that far above
// the DTM. Layers that end up with fewer than 3 usable points are skipped.
Raster build_dsm_pitfree(const PointCloud& cloud, const GridSpec& grid,
                         const PitfreeParams& params = {});

inline constexpr double kChmScale = 2.5; // quantization: stored = round(2.5 * meters)

// Quantized height: clamp(round((dsm - dtm) * 2.5), 0, 255). Nodata in
// either input quantizes to 0.
Raster build_chm(const Raster& dsm, const Raster& dtm);

inline double unscale_chm(std::uint8_t q) { return q / kChmScale; }

} // namespace chm

#endif // CHM_SURFACES_HPP_
