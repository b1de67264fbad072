// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0
//
// Seeded synthetic scene: cone-crowned trees over gently rolling terrain,
// a LiDAR-style point cloud sampling both, and a 4-band image whose bands
// are deterministic functions of canopy height plus noise. The learning
// task "recover height from the bands" is solvable by construction.

#ifndef CHM_SYNTH_HPP_
#define CHM_SYNTH_HPP_

#include <cstdint>

#include "chm/point_cloud.hpp"
#include "chm/raster.hpp"

namespace chm {

struct SynthConfig {
    std::uint64_t seed = 7;
    double extent = 192.0;      // square scene side, meters
    double point_spacing = 1.0; // ground sample spacing for the cloud
    double image_pixel = 0.6;
    int n_trees = 60;
    double min_tree_height = 5.0;
    double max_tree_height = 38.0;
    int n_noise_points = 12; // isolated high outliers, food for the ivf
    double band_noise_sigma = 3.0;
};

struct SynthScene {
    PointCloud cloud;
    Raster image;         // 4-band u8 on the image grid
    Raster truth_chm;     // 1-band u8 quantized truth heights
    Raster truth_heights; // 1-band f32 meters
};

SynthScene synth_scene(const SynthConfig& cfg = {});

} // namespace chm

#endif // CHM_SYNTH_HPP_
