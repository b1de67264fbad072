// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_GRID_HPP_
#define CHM_GRID_HPP_

#include <cmath>
#include <cstdint>

#include "chm/error.hpp"

namespace chm {

// Georeferenced pixel grid. (origin_x, origin_y) is the outer top-left
// corner; rows grow downward (decreasing y), columns grow to the right.
struct GridSpec {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pixel_size = 1.0; // meters per pixel, square pixels
    int width = 0;
    int height = 0;

    double center_x(int col) const { return origin_x + (col + 0.5) * pixel_size; }
    double center_y(int row) const { return origin_y - (row + 0.5) * pixel_size; }

    // Pixel containing a point; no bounds check.
    int col_of(double x) const { return static_cast<int>(std::floor((x - origin_x) / pixel_size)); }
    int row_of(double y) const { return static_cast<int>(std::floor((origin_y - y) / pixel_size)); }

    bool contains(int row, int col) const {
        return row >= 0 && row < height && col >= 0 && col < width;
    }

    std::int64_t pixel_count() const {
        return static_cast<std::int64_t>(width) * height;
    }

    bool operator==(const GridSpec& o) const = default;

    void validate() const {
        if (pixel_size <= 0.0) throw ParameterError("grid pixel_size must be > 0");
        if (width < 1 || height < 1) throw ParameterError("grid must be at least 1x1");
    }
};

} // namespace chm

#endif // CHM_GRID_HPP_
