// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/ivf.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "chm/parallel.hpp"

namespace chm {

namespace {

struct VoxelGrid {
    double min_x, min_y, min_z;
    double res;
    std::int64_t nx, ny;

    std::int64_t ix(double x) const { return static_cast<std::int64_t>(std::floor((x - min_x) / res)); }
    std::int64_t iy(double y) const { return static_cast<std::int64_t>(std::floor((y - min_y) / res)); }
    std::int64_t iz(double z) const { return static_cast<std::int64_t>(std::floor((z - min_z) / res)); }

    // Indices are shifted by +1 so the -1 neighbor offsets of boundary
    // voxels stay non-negative and keys cannot collide across rows.
    std::int64_t key(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return (i + 1) + nx * ((j + 1) + ny * (k + 1));
    }
};

VoxelGrid make_grid(const PointCloud& cloud, double res) {
    VoxelGrid g;
    g.min_x = cloud.bounds.min_x;
    g.min_y = cloud.bounds.min_y;
    g.min_z = cloud.bounds.min_z;
    g.res = res;
    g.nx = g.ix(cloud.bounds.max_x) + 3;
    g.ny = g.iy(cloud.bounds.max_y) + 3;
    return g;
}

} // namespace

std::vector<char> ivf_noise_mask(const PointCloud& cloud, double voxel_res, int max_other,
                                 IvfRule rule) {
    if (voxel_res <= 0.0) throw ParameterError("ivf voxel_res must be > 0");
    if (max_other < 0) throw ParameterError("ivf max_other must be >= 0");
    if (cloud.empty()) throw DegenerateInputError("ivf on empty cloud");

    const VoxelGrid g = make_grid(cloud, voxel_res);

    std::unordered_map<std::int64_t, std::int32_t> counts;
    counts.reserve(cloud.size());
    for (const LidarPoint& p : cloud.points)
        ++counts[g.key(g.ix(p.x), g.iy(p.y), g.iz(p.z))];

    const std::int64_t n = static_cast<std::int64_t>(cloud.size());
    std::vector<char> noise(cloud.size(), 0);
#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (std::int64_t i = 0; i < n; ++i) {
        const LidarPoint& p = cloud.points[i];
        const std::int64_t cx = g.ix(p.x), cy = g.iy(p.y), cz = g.iz(p.z);
        std::int32_t others = -1; // the point itself is in its own voxel
        for (std::int64_t dz = -1; dz <= 1; ++dz)
            for (std::int64_t dy = -1; dy <= 1; ++dy)
                for (std::int64_t dx = -1; dx <= 1; ++dx) {
                    auto it = counts.find(g.key(cx + dx, cy + dy, cz + dz));
                    if (it != counts.end()) others += it->second;
                }
        noise[i] = (rule == IvfRule::CountLessEqual) ? (others <= max_other) : (others < max_other);
    }
    return noise;
}

PointCloud ivf_denoise(const PointCloud& cloud, double voxel_res, int max_other, IvfRule rule) {
    const std::vector<char> noise = ivf_noise_mask(cloud, voxel_res, max_other, rule);
    PointCloud out;
    out.points.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (!noise[i]) out.points.push_back(cloud.points[i]);
    out.crs_tag = cloud.crs_tag;
    // an all-noise result is an empty cloud with undefined bounds;
    // downstream ops reject it
    if (!out.points.empty()) out.update_bounds();
    return out;
}

} // namespace chm
