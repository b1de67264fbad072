// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0
//
// 2.5-D Delaunay triangulation and TIN rasterization.

#ifndef CHM_TIN_HPP_
#define CHM_TIN_HPP_

#include <optional>
#include <vector>

#include "chm/raster.hpp"

namespace chm {

struct TinVertex {
    double x = 0, y = 0, z = 0;
};

// Vertex indices, counter-clockwise in the (x, y) projection.
struct TinTriangle {
    int a = 0, b = 0, c = 0;
};

struct Tin {
    std::vector<TinVertex> vertices;
    std::vector<TinTriangle> triangles;
};

enum class DuplicatePolicy { KeepMaxZ, KeepMinZ };

// Delaunay triangulation of the (x, y) projection carrying z at each
// vertex. Duplicate (x, y) are merged per `policy` (canopy surfaces keep
// the max z, terrain keeps the min). Throws DegenerateInputError for
// fewer than 3 distinct points or an all-collinear set.
Tin delaunay(const std::vector<TinVertex>& points,
             DuplicatePolicy policy = DuplicatePolicy::KeepMaxZ);

// Barycentric interpolation inside the containing triangle; nullopt
// outside the triangulation. Linear scan, meant for spot queries.
std::optional<double> tin_interpolate(const Tin& tin, double x, double y);

// Every pixel center gets the interpolated elevation. When max_edge > 0,
// pixels whose containing triangle has any 2-D edge longer than max_edge
// get nodata instead; max_edge = 0 disables the filter. Output nodata
// sentinel is kNoData.
Raster rasterize_tin(const Tin& tin, const GridSpec& grid, double max_edge = 0.0);

inline constexpr float kNoData = -9999.0f;

} // namespace chm

#endif // CHM_TIN_HPP_
