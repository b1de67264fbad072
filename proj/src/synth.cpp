// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "chm/surfaces.hpp"

namespace chm {

namespace {

struct Tree {
    double x, y, radius, height;
};

double ground_elevation(double x, double y) {
    return 50.0 + 0.02 * x + 3.0 * std::sin(x / 37.0) * std::cos(y / 29.0);
}

double canopy_height(const std::vector<Tree>& trees, double x, double y) {
    double h = 0.0;
    for (const Tree& t : trees) {
        const double d = std::hypot(x - t.x, y - t.y);
        if (d < t.radius) h = std::max(h, t.height * (1.0 - d / t.radius));
    }
    return h;
}

} // namespace

SynthScene synth_scene(const SynthConfig& cfg) {
    if (cfg.extent <= 0 || cfg.point_spacing <= 0 || cfg.image_pixel <= 0)
        throw ParameterError("synth scene dimensions must be positive");

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Tree> trees;
    trees.reserve(cfg.n_trees);
    const double pad = 6.0;
    for (int i = 0; i < cfg.n_trees; ++i) {
        Tree t;
        t.x = pad + unit(rng) * (cfg.extent - 2 * pad);
        t.y = pad + unit(rng) * (cfg.extent - 2 * pad);
        t.radius = 2.0 + 4.0 * unit(rng);
        t.height = cfg.min_tree_height +
                   (cfg.max_tree_height - cfg.min_tree_height) * unit(rng);
        trees.push_back(t);
    }

    SynthScene scene;

    // point cloud: jittered grid; canopy pixels yield a crown first return
    // plus a ground second return, open pixels a single ground return
    std::vector<LidarPoint> pts;
    const int n_side = static_cast<int>(cfg.extent / cfg.point_spacing);
    std::normal_distribution<double> jitter(0.0, 0.15 * cfg.point_spacing);
    for (int j = 0; j < n_side; ++j) {
        for (int i = 0; i < n_side; ++i) {
            const double x =
                std::clamp((i + 0.5) * cfg.point_spacing + jitter(rng), 0.0, cfg.extent);
            const double y =
                std::clamp((j + 0.5) * cfg.point_spacing + jitter(rng), 0.0, cfg.extent);
            const double g = ground_elevation(x, y);
            const double h = canopy_height(trees, x, y);
            if (h > 0.5) {
                pts.push_back({x, y, g + h, 5, 1}); // high vegetation
                pts.push_back({x, y, g, kGroundClass, 2});
            } else {
                pts.push_back({x, y, g, kGroundClass, 1});
            }
        }
    }
    for (int i = 0; i < cfg.n_noise_points; ++i) {
        const double x = unit(rng) * cfg.extent;
        const double y = unit(rng) * cfg.extent;
        pts.push_back({x, y, ground_elevation(x, y) + 80.0 + 40.0 * unit(rng), 1, 1});
    }
    scene.cloud = make_cloud(std::move(pts), "synthetic-local");

    // image grid covers the scene, origin at the top-left corner
    GridSpec img_grid;
    img_grid.origin_x = 0.0;
    img_grid.origin_y = cfg.extent;
    img_grid.pixel_size = cfg.image_pixel;
    img_grid.width = static_cast<int>(std::lround(cfg.extent / cfg.image_pixel));
    img_grid.height = img_grid.width;

    scene.image = Raster::make_u8(img_grid, 4);
    scene.truth_chm = Raster::make_u8(img_grid, 1);
    scene.truth_heights = Raster::make_f32(img_grid, 1);
    scene.image.crs = scene.truth_chm.crs = scene.truth_heights.crs = "synthetic-local";

    std::normal_distribution<double> band_noise(0.0, cfg.band_noise_sigma);
    auto to_u8 = [](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    };
    for (int row = 0; row < img_grid.height; ++row) {
        const double y = img_grid.center_y(row);
        for (int col = 0; col < img_grid.width; ++col) {
            const double x = img_grid.center_x(col);
            const double h = canopy_height(trees, x, y);
            scene.truth_heights.at_f32(0, row, col) = static_cast<float>(h);
            scene.truth_chm.at_u8(0, row, col) =
                static_cast<std::uint8_t>(std::clamp(std::lround(h * kChmScale), 0L, 255L));
            scene.image.at_u8(0, row, col) = to_u8(180.0 - 1.2 * h + band_noise(rng)); // R
            scene.image.at_u8(1, row, col) = to_u8(140.0 - 0.4 * h + band_noise(rng)); // G
            scene.image.at_u8(2, row, col) = to_u8(120.0 - 0.9 * h + band_noise(rng)); // B
            scene.image.at_u8(3, row, col) = to_u8(40.0 + 1.8 * h + band_noise(rng));  // NIR
        }
    }
    return scene;
}

} // namespace chm
