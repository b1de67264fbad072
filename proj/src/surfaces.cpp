// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "chm/parallel.hpp"

namespace chm {

void PitfreeParams::validate() const {
    if (thresholds.empty() || thresholds.front() != 0.0)
        throw ParameterError("pitfree thresholds must start at 0");
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (thresholds[i] <= thresholds[i - 1])
            throw ParameterError("pitfree thresholds must strictly increase");
    if (max_edge_base < 0.0 || max_edge_layers < 0.0)
        throw ParameterError("pitfree max edge lengths must be >= 0");
}

void fill_nodata_nearest(Raster& r) {
    if (!r.nodata || r.dtype != DType::F32) return;
    const int w = r.grid.width, h = r.grid.height;
    const float nd = *r.nodata;

    std::vector<std::pair<int, int>> holes;
    bool any_valid = false;
    for (int row = 0; row < h; ++row)
        for (int col = 0; col < w; ++col) {
            if (r.at_f32(0, row, col) == nd)
                holes.emplace_back(row, col);
            else
                any_valid = true;
        }
    if (holes.empty() || !any_valid) return;

    const Raster src = r; // fill reads the original, never its own output
    const std::int64_t nh = static_cast<std::int64_t>(holes.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(omp_thread_count())
    for (std::int64_t i = 0; i < nh; ++i) {
        const auto [row, col] = holes[i];
        // expanding square rings; a ring can only win while its nearest
        // possible center distance beats the current best
        std::int64_t best_d2 = std::numeric_limits<std::int64_t>::max();
        int best_row = -1, best_col = -1;
        const int max_ring = std::max(std::max(row, h - 1 - row), std::max(col, w - 1 - col));
        for (int ring = 1; ring <= max_ring; ++ring) {
            const std::int64_t ring_min_d2 = static_cast<std::int64_t>(ring) * ring;
            if (best_row >= 0 && ring_min_d2 > best_d2) break;
            auto consider = [&](int rr, int cc) {
                if (rr < 0 || rr >= h || cc < 0 || cc >= w) return;
                if (src.at_f32(0, rr, cc) == nd) return;
                const std::int64_t dr = rr - row, dc = cc - col;
                const std::int64_t d2 = dr * dr + dc * dc;
                if (d2 < best_d2 || (d2 == best_d2 && (rr < best_row || (rr == best_row && cc < best_col)))) {
                    best_d2 = d2;
                    best_row = rr;
                    best_col = cc;
                }
            };
            for (int cc = col - ring; cc <= col + ring; ++cc) {
                consider(row - ring, cc);
                consider(row + ring, cc);
            }
            for (int rr = row - ring + 1; rr <= row + ring - 1; ++rr) {
                consider(rr, col - ring);
                consider(rr, col + ring);
            }
        }
        if (best_row >= 0) r.at_f32(0, row, col) = src.at_f32(0, best_row, best_col);
    }
}

namespace {

std::vector<TinVertex> collect(const PointCloud& cloud, bool ground_only) {
    std::vector<TinVertex> v;
    v.reserve(cloud.size());
    for (const LidarPoint& p : cloud.points) {
        if (ground_only && p.classification != kGroundClass) continue;
        v.push_back({p.x, p.y, p.z});
    }
    return v;
}

} // namespace

Raster build_dtm(const PointCloud& cloud, const GridSpec& grid) {
    if (cloud.empty()) throw DegenerateInputError("build_dtm on empty cloud");
    const std::vector<TinVertex> ground = collect(cloud, /*ground_only=*/true);
    if (ground.size() < 3)
        throw DegenerateInputError("build_dtm needs at least 3 ground-classified points");
    const Tin tin = delaunay(ground, DuplicatePolicy::KeepMinZ);
    Raster dtm = rasterize_tin(tin, grid, /*max_edge=*/0.0);
    fill_nodata_nearest(dtm);
    return dtm;
}

Raster build_dsm_pitfree(const PointCloud& cloud, const GridSpec& grid,
                         const PitfreeParams& params) {
    if (cloud.empty()) throw DegenerateInputError("build_dsm_pitfree on empty cloud");
    params.validate();

    std::vector<TinVertex> first;
    first.reserve(cloud.size());
    for (const LidarPoint& p : cloud.points)
        if (p.return_number == 1) first.push_back({p.x, p.y, p.z});
    if (first.size() < 3)
        throw DegenerateInputError("build_dsm_pitfree needs at least 3 first returns");

    const Raster dtm = build_dtm(cloud, grid);
    auto terrain_at = [&](double x, double y) {
        const int row = std::clamp(grid.row_of(y), 0, grid.height - 1);
        const int col = std::clamp(grid.col_of(x), 0, grid.width - 1);
        return static_cast<double>(dtm.at_f32(0, row, col));
    };

    Raster out = Raster::make_f32(grid, 1, kNoData);
    out.nodata = kNoData;
    auto merge_max = [&](const Raster& layer) {
        const std::size_t n = layer.f32.size();
        for (std::size_t i = 0; i < n; ++i) {
            const float v = layer.f32[i];
            if (layer.is_nodata(v)) continue;
            float& o = out.f32[i];
            if (out.is_nodata(o) || v > o) o = v;
        }
    };

    for (std::size_t li = 0; li < params.thresholds.size(); ++li) {
        const double t = params.thresholds[li];
        const double max_edge = li == 0 ? params.max_edge_base : params.max_edge_layers;
        std::vector<TinVertex> layer_pts;
        if (li == 0) {
            layer_pts = first;
        } else {
            for (const TinVertex& p : first)
                if (p.z - terrain_at(p.x, p.y) >= t) layer_pts.push_back(p);
        }
        if (layer_pts.size() < 3) continue;
        Tin tin;
        try {
            tin = delaunay(layer_pts, DuplicatePolicy::KeepMaxZ);
        } catch (const DegenerateInputError&) {
            continue; // collinear partial layer contributes nothing
        }
        merge_max(rasterize_tin(tin, grid, max_edge));
    }

    fill_nodata_nearest(out);
    return out;
}

Raster build_chm(const Raster& dsm, const Raster& dtm) {
    if (dsm.grid != dtm.grid) throw AlignmentError("dsm and dtm grids differ");
    if (dsm.bands != 1 || dtm.bands != 1)
        throw AlignmentError("build_chm expects single-band surfaces");

    Raster chm = Raster::make_u8(dsm.grid, 1);
    const std::size_t n = chm.u8.size();
    for (std::size_t i = 0; i < n; ++i) {
        const float s = dsm.f32[i], t = dtm.f32[i];
        if (dsm.is_nodata(s) || dtm.is_nodata(t)) continue; // stays 0
        const long q = std::lround((static_cast<double>(s) - t) * kChmScale);
        chm.u8[i] = static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
    }
    return chm;
}

} // namespace chm
