// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace chm::ref {

std::vector<char> ivf_noise_mask(const PointCloud& cloud, double voxel_res, int max_other,
                                 IvfRule rule) {
    if (voxel_res <= 0.0) throw ParameterError("ivf voxel_res must be > 0");
    if (cloud.empty()) throw DegenerateInputError("ivf on empty cloud");

    const double mx = cloud.bounds.min_x, my = cloud.bounds.min_y, mz = cloud.bounds.min_z;
    auto cell = [&](const LidarPoint& p) {
        return std::array<std::int64_t, 3>{
            static_cast<std::int64_t>(std::floor((p.x - mx) / voxel_res)),
            static_cast<std::int64_t>(std::floor((p.y - my) / voxel_res)),
            static_cast<std::int64_t>(std::floor((p.z - mz) / voxel_res))};
    };

    struct Key {
        std::int64_t x, y, z;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::size_t h = static_cast<std::size_t>(k.x) * 0x9E3779B97F4A7C15ull;
            h ^= static_cast<std::size_t>(k.y) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
            h ^= static_cast<std::size_t>(k.z) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
            return h;
        }
    };
    std::unordered_map<Key, int, KeyHash> counts;
    for (const LidarPoint& p : cloud.points) {
        const auto c = cell(p);
        ++counts[{c[0], c[1], c[2]}];
    }

    std::vector<char> noise(cloud.size(), 0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto c = cell(cloud.points[i]);
        int others = -1;
        for (std::int64_t dz = -1; dz <= 1; ++dz)
            for (std::int64_t dy = -1; dy <= 1; ++dy)
                for (std::int64_t dx = -1; dx <= 1; ++dx) {
                    auto it = counts.find({c[0] + dx, c[1] + dy, c[2] + dz});
                    if (it != counts.end()) others += it->second;
                }
        noise[i] = (rule == IvfRule::CountLessEqual) ? (others <= max_other) : (others < max_other);
    }
    return noise;
}

Raster rasterize_tin(const Tin& tin, const GridSpec& grid, double max_edge) {
    grid.validate();
    Raster out = Raster::make_f32(grid, 1, kNoData);
    out.nodata = kNoData;
    if (tin.triangles.empty()) return out;

    double lo_x = tin.vertices[0].x, hi_x = lo_x, lo_y = tin.vertices[0].y, hi_y = lo_y;
    for (const TinVertex& v : tin.vertices) {
        lo_x = std::min(lo_x, v.x);
        hi_x = std::max(hi_x, v.x);
        lo_y = std::min(lo_y, v.y);
        hi_y = std::max(hi_y, v.y);
    }
    const double diag2 = (hi_x - lo_x) * (hi_x - lo_x) + (hi_y - lo_y) * (hi_y - lo_y);
    const double eps = 1e-12 * std::max(diag2, 1.0);
    const double m2 = max_edge * max_edge;

    for (int row = 0; row < grid.height; ++row) {
        const double y = grid.center_y(row);
        for (int col = 0; col < grid.width; ++col) {
            const double x = grid.center_x(col);
            for (std::size_t ti = 0; ti < tin.triangles.size(); ++ti) {
                const TinTriangle& t = tin.triangles[ti];
                const TinVertex& a = tin.vertices[t.a];
                const TinVertex& b = tin.vertices[t.b];
                const TinVertex& c = tin.vertices[t.c];
                const double oa = (c.x - b.x) * (y - b.y) - (c.y - b.y) * (x - b.x);
                const double ob = (a.x - c.x) * (y - c.y) - (a.y - c.y) * (x - c.x);
                const double oc = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
                const double denom = oa + ob + oc;
                if (denom <= 0.0) continue;
                if (oa < -eps || ob < -eps || oc < -eps) continue;
                bool long_edge = false;
                if (max_edge > 0.0) {
                    auto len2 = [](const TinVertex& u, const TinVertex& v) {
                        return (u.x - v.x) * (u.x - v.x) + (u.y - v.y) * (u.y - v.y);
                    };
                    long_edge = len2(a, b) > m2 || len2(b, c) > m2 || len2(c, a) > m2;
                }
                if (!long_edge)
                    out.at_f32(0, row, col) = static_cast<float>(
                        (oa * a.z + ob * b.z + oc * c.z) / denom);
                break;
            }
        }
    }
    return out;
}

Tensor4 conv2d_forward(const Tensor4& x, const Tensor4& k, const std::vector<float>& bias,
                       ConvSpec spec) {
    const int pad_y = spec.padding == Padding::Same ? (k.h - 1) / 2 : 0;
    const int pad_x = spec.padding == Padding::Same ? (k.w - 1) / 2 : 0;
    const int oh = (x.h + 2 * pad_y - k.h) / spec.stride + 1;
    const int ow = (x.w + 2 * pad_x - k.w) / spec.stride + 1;
    Tensor4 y(x.n, k.n, oh, ow);
    for (int in = 0; in < x.n; ++in)
        for (int oc = 0; oc < k.n; ++oc)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    double acc = bias[oc];
                    for (int ic = 0; ic < x.c; ++ic)
                        for (int ky = 0; ky < k.h; ++ky) {
                            const int iy = oy * spec.stride + ky - pad_y;
                            if (iy < 0 || iy >= x.h) continue;
                            for (int kx = 0; kx < k.w; ++kx) {
                                const int ix = ox * spec.stride + kx - pad_x;
                                if (ix < 0 || ix >= x.w) continue;
                                acc += static_cast<double>(x.at(in, ic, iy, ix)) *
                                       static_cast<double>(k.at(oc, ic, ky, kx));
                            }
                        }
                    y.at(in, oc, oy, ox) = static_cast<float>(acc);
                }
    return y;
}

ConvGrads<float> conv2d_backward(const Tensor4& x, const Tensor4& k, ConvSpec spec,
                                 const Tensor4& gout) {
    const int pad_y = spec.padding == Padding::Same ? (k.h - 1) / 2 : 0;
    const int pad_x = spec.padding == Padding::Same ? (k.w - 1) / 2 : 0;
    const int oh = gout.h, ow = gout.w;

    ConvGrads<float> g;
    g.input = Tensor4(x.n, x.c, x.h, x.w);
    g.kernel = Tensor4(k.n, k.c, k.h, k.w);
    g.bias.assign(k.n, 0.0f);

    for (int in = 0; in < x.n; ++in)
        for (int ic = 0; ic < x.c; ++ic)
            for (int iy = 0; iy < x.h; ++iy)
                for (int ix = 0; ix < x.w; ++ix) {
                    double acc = 0.0;
                    for (int oc = 0; oc < k.n; ++oc)
                        for (int ky = 0; ky < k.h; ++ky) {
                            const int ty = iy + pad_y - ky;
                            if (ty < 0 || ty % spec.stride != 0) continue;
                            const int oy = ty / spec.stride;
                            if (oy >= oh) continue;
                            for (int kx = 0; kx < k.w; ++kx) {
                                const int tx = ix + pad_x - kx;
                                if (tx < 0 || tx % spec.stride != 0) continue;
                                const int ox = tx / spec.stride;
                                if (ox >= ow) continue;
                                acc += static_cast<double>(gout.at(in, oc, oy, ox)) *
                                       static_cast<double>(k.at(oc, ic, ky, kx));
                            }
                        }
                    g.input.at(in, ic, iy, ix) = static_cast<float>(acc);
                }

    for (int oc = 0; oc < k.n; ++oc)
        for (int ic = 0; ic < k.c; ++ic)
            for (int ky = 0; ky < k.h; ++ky)
                for (int kx = 0; kx < k.w; ++kx) {
                    double acc = 0.0;
                    for (int in = 0; in < x.n; ++in)
                        for (int oy = 0; oy < oh; ++oy) {
                            const int iy = oy * spec.stride + ky - pad_y;
                            if (iy < 0 || iy >= x.h) continue;
                            for (int ox = 0; ox < ow; ++ox) {
                                const int ix = ox * spec.stride + kx - pad_x;
                                if (ix < 0 || ix >= x.w) continue;
                                acc += static_cast<double>(gout.at(in, oc, oy, ox)) *
                                       static_cast<double>(x.at(in, ic, iy, ix));
                            }
                        }
                    g.kernel.at(oc, ic, ky, kx) = static_cast<float>(acc);
                }

    for (int oc = 0; oc < k.n; ++oc) {
        double acc = 0.0;
        for (int in = 0; in < x.n; ++in)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox)
                    acc += static_cast<double>(gout.at(in, oc, oy, ox));
        g.bias[oc] = static_cast<float>(acc);
    }
    return g;
}

Raster aggregate_block(const Raster& r, int factor, BlockStat stat) {
    if (factor < 1) throw ParameterError("aggregation factor must be >= 1");
    GridSpec g = r.grid;
    g.pixel_size = r.grid.pixel_size * factor;
    g.width = r.grid.width / factor;
    g.height = r.grid.height / factor;
    Raster out = Raster::make_f32(g, 1, kNoData);
    out.nodata = kNoData;

    std::vector<float> vals;
    for (int orow = 0; orow < g.height; ++orow)
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
            if (vals.empty()) continue;
            if (stat == BlockStat::Mean) {
                out.at_f32(0, orow, ocol) = static_cast<float>(sum / vals.size());
            } else {
                const std::size_t mid = vals.size() / 2;
                std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
                float med = vals[mid];
                if (vals.size() % 2 == 0) {
                    const float lower = *std::max_element(vals.begin(), vals.begin() + mid);
                    med = 0.5f * (lower + med);
                }
                out.at_f32(0, orow, ocol) = med;
            }
        }
    return out;
}

Raster rasterize_footprints_mask(const FootprintSet& fps, const GridSpec& grid, double buffer) {
    Raster mask = Raster::make_u8(grid, 1, 0);

    std::vector<std::vector<XY>> rings;
    for (const auto& raw : fps.polygons) {
        std::vector<XY> ring;
        for (const XY& p : raw) {
            if (!ring.empty() && ring.back().x == p.x && ring.back().y == p.y) continue;
            ring.push_back(p);
        }
        if (ring.size() > 1 && ring.front().x == ring.back().x && ring.front().y == ring.back().y)
            ring.pop_back();
        if (ring.size() >= 3) rings.push_back(std::move(ring));
    }

    const double buf2 = buffer * buffer;
    for (int row = 0; row < grid.height; ++row) {
        const double y = grid.center_y(row);
        for (int col = 0; col < grid.width; ++col) {
            const double x = grid.center_x(col);
            bool hit = false;
            for (const auto& ring : rings) {
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
                if (inside) {
                    hit = true;
                    break;
                }
                if (buffer > 0.0) {
                    for (std::size_t i = 0, j = n - 1; i < n && !hit; j = i++) {
                        const double vx = ring[i].x - ring[j].x, vy = ring[i].y - ring[j].y;
                        const double wx = x - ring[j].x, wy = y - ring[j].y;
                        const double vv = vx * vx + vy * vy;
                        double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
                        t = std::clamp(t, 0.0, 1.0);
                        const double dx = wx - t * vx, dy = wy - t * vy;
                        if (dx * dx + dy * dy <= buf2) hit = true;
                    }
                    if (hit) break;
                }
            }
            if (hit) mask.at_u8(0, row, col) = 1;
        }
    }
    return mask;
}

} // namespace chm::ref
