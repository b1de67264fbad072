// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0
//
// In-memory raster with bit-exact .hdr/.bin persistence.

#ifndef CHM_RASTER_HPP_
#define CHM_RASTER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chm/grid.hpp"

namespace chm {

enum class DType : std::uint8_t { U8, F32 };

const char* dtype_name(DType t);

// Band-sequential, row-major (top row first). Exactly one of the payload
// vectors is populated, matching `dtype`.
struct Raster {
    GridSpec grid;
    int bands = 1;
    DType dtype = DType::F32;
    std::vector<std::uint8_t> u8;
    std::vector<float> f32;
    std::optional<float> nodata;
    std::string crs;

    static Raster make_u8(const GridSpec& grid, int bands = 1, std::uint8_t fill = 0);
    static Raster make_f32(const GridSpec& grid, int bands = 1, float fill = 0.0f);

    std::size_t index(int band, int row, int col) const {
        return (static_cast<std::size_t>(band) * grid.height + row) * grid.width + col;
    }

    std::uint8_t& at_u8(int band, int row, int col) { return u8[index(band, row, col)]; }
    std::uint8_t at_u8(int band, int row, int col) const { return u8[index(band, row, col)]; }
    float& at_f32(int band, int row, int col) { return f32[index(band, row, col)]; }
    float at_f32(int band, int row, int col) const { return f32[index(band, row, col)]; }

    // Value as double regardless of dtype.
    double value(int band, int row, int col) const {
        return dtype == DType::U8 ? static_cast<double>(at_u8(band, row, col))
                                  : static_cast<double>(at_f32(band, row, col));
    }

    bool is_nodata(float v) const { return nodata && *nodata == v; }

    std::size_t value_count() const {
        return static_cast<std::size_t>(bands) * grid.width * grid.height;
    }
};

// `path` is the stem: `<path>.hdr` + `<path>.bin`. A trailing .hdr/.bin on
// `path` is stripped. Round trips are bit-exact; unknown header keys are
// ignored.
Raster read_raster(const std::string& path);
void write_raster(const Raster& r, const std::string& path);

} // namespace chm

#endif // CHM_RASTER_HPP_
