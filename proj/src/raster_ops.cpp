// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/raster_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "chm/parallel.hpp"
#include "chm/tin.hpp"

namespace chm {

Raster resample_nearest(const Raster& r, double target_pixel_size) {
    if (target_pixel_size <= 0.0) throw ParameterError("target pixel size must be > 0");
    const GridSpec& g = r.grid;

    GridSpec out_grid = g;
    out_grid.pixel_size = target_pixel_size;
    out_grid.width = static_cast<int>(std::ceil(g.width * g.pixel_size / target_pixel_size));
    out_grid.height = static_cast<int>(std::ceil(g.height * g.pixel_size / target_pixel_size));

    Raster out = r.dtype == DType::U8 ? Raster::make_u8(out_grid, r.bands)
                                      : Raster::make_f32(out_grid, r.bands);
    out.nodata = r.nodata;
    out.crs = r.crs;

    // source pixel under each output center; centers past the source
    // extent (possible because of the ceil) clamp to the edge pixel
    std::vector<int> src_col(out_grid.width), src_row(out_grid.height);
    for (int c = 0; c < out_grid.width; ++c)
        src_col[c] = std::clamp(g.col_of(out_grid.center_x(c)), 0, g.width - 1);
    for (int rw = 0; rw < out_grid.height; ++rw)
        src_row[rw] = std::clamp(g.row_of(out_grid.center_y(rw)), 0, g.height - 1);

    for (int b = 0; b < r.bands; ++b) {
#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
        for (int rw = 0; rw < out_grid.height; ++rw) {
            for (int c = 0; c < out_grid.width; ++c) {
                if (r.dtype == DType::U8)
                    out.at_u8(b, rw, c) = r.at_u8(b, src_row[rw], src_col[c]);
                else
                    out.at_f32(b, rw, c) = r.at_f32(b, src_row[rw], src_col[c]);
            }
        }
    }
    return out;
}

namespace {

Raster crop_u8(const Raster& r, int row0, int col0, int size) {
    GridSpec g = r.grid;
    g.origin_x += col0 * g.pixel_size;
    g.origin_y -= row0 * g.pixel_size;
    g.width = g.height = size;
    Raster out = Raster::make_u8(g, r.bands);
    out.nodata = r.nodata;
    out.crs = r.crs;
    for (int b = 0; b < r.bands; ++b)
        for (int rw = 0; rw < size; ++rw)
            for (int c = 0; c < size; ++c)
                out.at_u8(b, rw, c) = r.at_u8(b, row0 + rw, col0 + c);
    return out;
}

} // namespace

std::vector<PatchPair> retile(const Raster& image, const Raster& chm, int patch,
                              const std::string& source_id) {
    if (patch < 1) throw ParameterError("patch size must be >= 1");
    if (image.grid != chm.grid) throw AlignmentError("image and chm grids differ");
    if (image.dtype != DType::U8 || chm.dtype != DType::U8)
        throw ParameterError("retile expects u8 rasters");

    const int rows = image.grid.height / patch;
    const int cols = image.grid.width / patch;
    std::vector<PatchPair> out;
    out.reserve(static_cast<std::size_t>(rows) * cols);
    for (int pr = 0; pr < rows; ++pr) {
        for (int pc = 0; pc < cols; ++pc) {
            PatchPair pair;
            pair.row = pr * patch;
            pair.col = pc * patch;
            pair.image = crop_u8(image, pair.row, pair.col, patch);
            pair.target = crop_u8(chm, pair.row, pair.col, patch);
            pair.source_id = source_id;
            out.push_back(std::move(pair));
        }
    }
    return out;
}

Raster apply_mask(const Raster& chm, const Raster& mask) {
    if (chm.grid != mask.grid) throw AlignmentError("chm and mask grids differ");
    if (mask.dtype != DType::U8 || mask.bands != 1)
        throw ParameterError("mask must be a 1-band u8 raster");

    Raster out = chm;
    const std::size_t per_band = static_cast<std::size_t>(chm.grid.pixel_count());
    for (int b = 0; b < out.bands; ++b) {
        for (std::size_t i = 0; i < per_band; ++i) {
            if (!mask.u8[i]) continue;
            if (out.dtype == DType::U8)
                out.u8[b * per_band + i] = 0;
            else
                out.f32[b * per_band + i] = 0.0f;
        }
    }
    return out;
}

Raster aggregate_block(const Raster& r, int factor, BlockStat stat) {
    if (factor < 1) throw ParameterError("aggregation factor must be >= 1");
    if (r.dtype != DType::F32 || r.bands != 1)
        throw ParameterError("aggregate_block expects a 1-band f32 raster");

    GridSpec g = r.grid;
    g.pixel_size = r.grid.pixel_size * factor;
    g.width = r.grid.width / factor;
    g.height = r.grid.height / factor;
    if (g.width < 1 || g.height < 1)
        throw ParameterError("aggregation factor exceeds raster size");

    Raster out = Raster::make_f32(g, 1, kNoData);
    out.nodata = kNoData;
    out.crs = r.crs;

#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (int orow = 0; orow < g.height; ++orow) {
        std::vector<float> vals;
        vals.reserve(static_cast<std::size_t>(factor) * factor);
        for (int ocol = 0; ocol < g.width; ++ocol) {
            vals.clear();
            double sum = 0.0;
            for (int dr = 0; dr < factor; ++dr)
                for (int dc = 0; dc < factor; ++dc) {
                    const float v = r.at_f32(0, orow * factor + dr, ocol * factor + dc);
                    if (r.is_nodata(v)) continue;
                    vals.push_back(v);
                    sum += v;
                }
            if (vals.empty()) continue; // stays nodata
            if (stat == BlockStat::Mean) {
                out.at_f32(0, orow, ocol) = static_cast<float>(sum / vals.size());
            } else {
                const std::size_t n = vals.size();
                const std::size_t mid = n / 2;
                std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
                float med = vals[mid];
                if (n % 2 == 0) {
                    const float lower = *std::max_element(vals.begin(), vals.begin() + mid);
                    med = 0.5f * (lower + med);
                }
                out.at_f32(0, orow, ocol) = med;
            }
        }
    }
    return out;
}

} // namespace chm
