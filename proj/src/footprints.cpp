// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/footprints.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "chm/parallel.hpp"

namespace chm {

FootprintSet read_footprints(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!j.contains("polygons") || !j["polygons"].is_array())
        throw ParseError(path + ": missing 'polygons' array");

    FootprintSet fps;
    for (const auto& ring : j["polygons"]) {
        std::vector<XY> pts;
        for (const auto& v : ring) {
            if (!v.is_array() || v.size() != 2)
                throw ParseError(path + ": vertex must be [x, y]");
            pts.push_back({v[0].get<double>(), v[1].get<double>()});
        }
        fps.polygons.push_back(std::move(pts));
    }
    return fps;
}

void write_footprints(const FootprintSet& fps, const std::string& path) {
    nlohmann::json rings = nlohmann::json::array();
    for (const auto& ring : fps.polygons) {
        nlohmann::json r = nlohmann::json::array();
        for (const XY& p : ring) r.push_back({p.x, p.y});
        rings.push_back(std::move(r));
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << nlohmann::json{{"polygons", rings}}.dump(1) << "\n";
}

namespace {

// drop consecutive duplicates (and the closing repeat, if present)
std::vector<XY> distinct_ring(const std::vector<XY>& ring) {
    std::vector<XY> out;
    for (const XY& p : ring) {
        if (!out.empty() && out.back().x == p.x && out.back().y == p.y) continue;
        out.push_back(p);
    }
    if (out.size() > 1 && out.front().x == out.back().x && out.front().y == out.back().y)
        out.pop_back();
    return out;
}

bool point_in_ring(const std::vector<XY>& ring, double x, double y) {
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const XY& a = ring[j];
        const XY& b = ring[i];
        if ((b.y > y) != (a.y > y)) {
            const double t = (y - b.y) / (a.y - b.y);
            if (x < b.x + t * (a.x - b.x)) inside = !inside;
        }
    }
    return inside;
}

double dist2_to_segment(double px, double py, const XY& a, const XY& b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double wx = px - a.x, wy = py - a.y;
    const double vv = vx * vx + vy * vy;
    double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = wx - t * vx, dy = wy - t * vy;
    return dx * dx + dy * dy;
}

} // namespace

FootprintMask rasterize_footprints(const FootprintSet& fps, const GridSpec& grid, double buffer) {
    grid.validate();
    if (buffer < 0.0) throw ParameterError("footprint buffer must be >= 0");

    FootprintMask result;
    result.mask = Raster::make_u8(grid, 1, 0);

    std::vector<std::vector<XY>> rings;
    for (const auto& raw : fps.polygons) {
        std::vector<XY> ring = distinct_ring(raw);
        if (ring.size() < 3) {
            ++result.skipped_rings;
            continue;
        }
        rings.push_back(std::move(ring));
    }
    if (rings.empty()) return result;

    // ring bboxes expanded by the buffer cut the per-pixel work down
    struct Box {
        double x0, y0, x1, y1;
    };
    std::vector<Box> boxes;
    boxes.reserve(rings.size());
    for (const auto& ring : rings) {
        Box b{ring[0].x, ring[0].y, ring[0].x, ring[0].y};
        for (const XY& p : ring) {
            b.x0 = std::min(b.x0, p.x);
            b.y0 = std::min(b.y0, p.y);
            b.x1 = std::max(b.x1, p.x);
            b.y1 = std::max(b.y1, p.y);
        }
        b.x0 -= buffer;
        b.y0 -= buffer;
        b.x1 += buffer;
        b.y1 += buffer;
        boxes.push_back(b);
    }

    const double buf2 = buffer * buffer;
#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (int row = 0; row < grid.height; ++row) {
        const double y = grid.center_y(row);
        for (int col = 0; col < grid.width; ++col) {
            const double x = grid.center_x(col);
            bool hit = false;
            for (std::size_t k = 0; k < rings.size() && !hit; ++k) {
                const Box& b = boxes[k];
                if (x < b.x0 || x > b.x1 || y < b.y0 || y > b.y1) continue;
                const auto& ring = rings[k];
                if (point_in_ring(ring, x, y)) {
                    hit = true;
                    break;
                }
                if (buffer > 0.0) {
                    const std::size_t n = ring.size();
                    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                        if (dist2_to_segment(x, y, ring[j], ring[i]) <= buf2) {
                            hit = true;
                            break;
                        }
                    }
                }
            }
            if (hit) result.mask.at_u8(0, row, col) = 1;
        }
    }
    return result;
}

} // namespace chm
