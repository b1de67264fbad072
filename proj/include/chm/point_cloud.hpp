// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_POINT_CLOUD_HPP_
#define CHM_POINT_CLOUD_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "chm/error.hpp"

namespace chm {

// ASPRS class 2 marks ground returns.
inline constexpr std::uint8_t kGroundClass = 2;

struct LidarPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    std::uint8_t classification = 0;
    std::uint8_t return_number = 1;

    bool operator==(const LidarPoint&) const = default;
};

struct Bounds3 {
    double min_x = 0, min_y = 0, min_z = 0;
    double max_x = 0, max_y = 0, max_z = 0;
};

// Immutable after construction; safe to share read-only across threads.
struct PointCloud {
    std::vector<LidarPoint> points;
    Bounds3 bounds;
    std::string crs_tag;

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }

    // Recompute bounds from points. Throws on an empty cloud, whose bounds
    // are undefined.
    void update_bounds();
};

PointCloud make_cloud(std::vector<LidarPoint> points, std::string crs_tag = "");

enum class CloudFormat { Csv, Las };

// CSV: header `x,y,z,classification,return_number`, UTF-8, '.' decimal.
// LAS: uncompressed 1.2-1.4, point formats 0, 1, 6, little-endian.
PointCloud read_point_cloud(const std::string& path, CloudFormat format);
void write_point_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format);

} // namespace chm

#endif // CHM_POINT_CLOUD_HPP_
