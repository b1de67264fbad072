// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/tin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "chm/parallel.hpp"

namespace chm {

namespace {

// Twice the signed area of (a, b, c); positive for counter-clockwise.
inline double orient2d(double ax, double ay, double bx, double by, double cx, double cy) {
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

// Positive iff (dx, dy) lies strictly inside the circumcircle of the
// counter-clockwise triangle (a, b, c). Coordinates are translated by d
// first, which keeps the determinant terms at the distance scale.
inline double incircle(double ax, double ay, double bx, double by, double cx, double cy,
                       double dx, double dy) {
    const double adx = ax - dx, ady = ay - dy;
    const double bdx = bx - dx, bdy = by - dy;
    const double cdx = cx - dx, cdy = cy - dy;
    const double ad2 = adx * adx + ady * ady;
    const double bd2 = bdx * bdx + bdy * bdy;
    const double cd2 = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd2 - bd2 * cdy) - ady * (bdx * cd2 - bd2 * cdx) +
           ad2 * (bdx * cdy - bdy * cdx);
}

std::uint64_t morton2(std::uint32_t x, std::uint32_t y) {
    auto spread = [](std::uint64_t v) {
        v &= 0xFFFFFFFFull;
        v = (v | (v << 16)) & 0x0000FFFF0000FFFFull;
        v = (v | (v << 8)) & 0x00FF00FF00FF00FFull;
        v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0Full;
        v = (v | (v << 2)) & 0x3333333333333333ull;
        v = (v | (v << 1)) & 0x5555555555555555ull;
        return v;
    };
    return spread(x) | (spread(y) << 1);
}

struct BwTriangle {
    int v[3];   // CCW
    int adj[3]; // adj[i] shares edge (v[i], v[(i+1)%3]); -1 = open
    bool alive = true;
};

// cavity boundary edge, oriented CCW seen from the insertion point
struct RimEdge {
    int a, b, outer;
};

class Triangulator {
public:
    Triangulator(std::vector<TinVertex> verts) : pts_(std::move(verts)) {}

    Tin run() {
        const int n = static_cast<int>(pts_.size());
        double lo_x = pts_[0].x, hi_x = pts_[0].x, lo_y = pts_[0].y, hi_y = pts_[0].y;
        for (const TinVertex& p : pts_) {
            lo_x = std::min(lo_x, p.x);
            hi_x = std::max(hi_x, p.x);
            lo_y = std::min(lo_y, p.y);
            hi_y = std::max(hi_y, p.y);
        }
        const double diag = std::hypot(hi_x - lo_x, hi_y - lo_y);

        // Insertion in Morton order keeps the walk short.
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        const double inv = diag > 0 ? (static_cast<double>(0xFFFF) / diag) : 0.0;
        std::vector<std::uint64_t> code(n);
        for (int i = 0; i < n; ++i)
            code[i] = morton2(static_cast<std::uint32_t>((pts_[i].x - lo_x) * inv),
                              static_cast<std::uint32_t>((pts_[i].y - lo_y) * inv));
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return code[a] < code[b]; });

        // Super-triangle far enough out that its circumcircles cannot
        // shadow any real triangle of sane aspect ratio, close enough
        // that the incircle determinant keeps ~8 digits of headroom.
        const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
        const double r = 1.0e4 * std::max(diag, 1.0);
        super_ = static_cast<int>(pts_.size());
        pts_.push_back({cx - 2.0 * r, cy - r, 0.0});
        pts_.push_back({cx + 2.0 * r, cy - r, 0.0});
        pts_.push_back({cx, cy + 2.0 * r, 0.0});
        tris_.push_back({{super_, super_ + 1, super_ + 2}, {-1, -1, -1}, true});

        int hint = 0;
        for (int idx : order) hint = insert(idx, hint);

        Tin out;
        out.vertices.assign(pts_.begin(), pts_.begin() + n);
        for (const BwTriangle& t : tris_) {
            if (!t.alive) continue;
            if (t.v[0] >= super_ || t.v[1] >= super_ || t.v[2] >= super_) continue;
            out.triangles.push_back({t.v[0], t.v[1], t.v[2]});
        }
        return out;
    }

private:
    double px(int i) const { return pts_[i].x; }
    double py(int i) const { return pts_[i].y; }

    double tri_orient(const BwTriangle& t, double x, double y, int edge) const {
        const int a = t.v[edge], b = t.v[(edge + 1) % 3];
        return orient2d(px(a), py(a), px(b), py(b), x, y);
    }

    bool circumcircle_contains(const BwTriangle& t, double x, double y) const {
        return incircle(px(t.v[0]), py(t.v[0]), px(t.v[1]), py(t.v[1]), px(t.v[2]), py(t.v[2]),
                        x, y) > 0.0;
    }

    int locate(double x, double y, int hint) const {
        int cur = hint;
        if (cur < 0 || cur >= static_cast<int>(tris_.size()) || !tris_[cur].alive) cur = -1;
        if (cur < 0) {
            for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
                if (tris_[i].alive) {
                    cur = i;
                    break;
                }
        }
        const int cap = 2 * static_cast<int>(tris_.size()) + 64;
        for (int step = 0; step < cap; ++step) {
            const BwTriangle& t = tris_[cur];
            int exit_edge = -1;
            for (int e = 0; e < 3; ++e) {
                if (tri_orient(t, x, y, e) < 0.0) {
                    exit_edge = e;
                    break;
                }
            }
            if (exit_edge < 0) return cur;
            const int nb = t.adj[exit_edge];
            if (nb < 0) break;
            cur = nb;
        }
        // walk cycled on a near-degenerate patch; fall back to the
        // triangle with the least-negative containment margin
        int best = -1;
        double best_margin = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
            if (!tris_[i].alive) continue;
            double m = std::numeric_limits<double>::infinity();
            for (int e = 0; e < 3; ++e) m = std::min(m, tri_orient(tris_[i], x, y, e));
            if (m > best_margin) {
                best_margin = m;
                best = i;
            }
        }
        return best;
    }

    int insert(int vi, int hint) {
        const double x = px(vi), y = py(vi);
        const int seed = locate(x, y, hint);

        // grow the cavity of triangles whose circumcircle contains the
        // point; the containing triangle belongs regardless of the
        // predicate so numerically degenerate seeds cannot strand us
        cavity_.clear();
        in_cavity_.assign(tris_.size(), 0);
        stack_.clear();
        stack_.push_back(seed);
        in_cavity_[seed] = 1;
        while (!stack_.empty()) {
            const int ti = stack_.back();
            stack_.pop_back();
            cavity_.push_back(ti);
            for (int e = 0; e < 3; ++e) {
                const int nb = tris_[ti].adj[e];
                if (nb < 0 || in_cavity_[nb]) continue;
                if (circumcircle_contains(tris_[nb], x, y)) {
                    in_cavity_[nb] = 1;
                    stack_.push_back(nb);
                }
            }
        }

        // boundary edges, CCW around the cavity as seen from inside
        rim_.clear();
        for (int ti : cavity_) {
            for (int e = 0; e < 3; ++e) {
                const int nb = tris_[ti].adj[e];
                if (nb >= 0 && in_cavity_[nb]) continue;
                rim_.push_back({tris_[ti].v[e], tris_[ti].v[(e + 1) % 3], nb});
            }
        }
        for (int ti : cavity_) tris_[ti].alive = false;

        // one new triangle per rim edge, stitched by shared vertices
        edge_map_.clear();
        int last = -1;
        for (const auto& rm : rim_) {
            const int nt = static_cast<int>(tris_.size());
            tris_.push_back({{rm.a, rm.b, vi}, {rm.outer, -1, -1}, true});
            if (rm.outer >= 0) {
                BwTriangle& o = tris_[rm.outer];
                for (int e = 0; e < 3; ++e)
                    if (o.v[e] == rm.b && o.v[(e + 1) % 3] == rm.a) o.adj[e] = nt;
            }
            // edge (b, vi) of nt pairs with edge (vi, a)=(vi, b') of the rim
            // neighbor; key by the rim vertex
            if (auto it = edge_map_.find(rm.b); it != edge_map_.end()) {
                tris_[nt].adj[1] = it->second;
                tris_[it->second].adj[2] = nt;
                edge_map_.erase(it);
            } else {
                edge_map_.emplace(rm.b, nt);
            }
            if (auto it = edge_map_.find(rm.a); it != edge_map_.end()) {
                tris_[nt].adj[2] = it->second;
                tris_[it->second].adj[1] = nt;
                edge_map_.erase(it);
            } else {
                edge_map_.emplace(rm.a, nt);
            }
            last = nt;
        }
        return last;
    }

    std::vector<TinVertex> pts_;
    std::vector<BwTriangle> tris_;
    int super_ = 0;

    // scratch, reused across insertions
    std::vector<int> cavity_;
    std::vector<char> in_cavity_;
    std::vector<int> stack_;
    std::vector<RimEdge> rim_;
    std::unordered_map<int, int> edge_map_;
};

} // namespace

Tin delaunay(const std::vector<TinVertex>& points, DuplicatePolicy policy) {
    // merge duplicate (x, y), first occurrence keeps its slot
    std::vector<TinVertex> uniq;
    uniq.reserve(points.size());
    std::unordered_map<std::uint64_t, std::vector<int>> seen;
    auto hash_xy = [](double x, double y) {
        x += 0.0; // fold -0.0 onto +0.0 so bit-hashing agrees with ==
        y += 0.0;
        std::uint64_t hx, hy;
        std::memcpy(&hx, &x, 8);
        std::memcpy(&hy, &y, 8);
        return hx * 0x9E3779B97F4A7C15ull ^ (hy + 0x9E3779B97F4A7C15ull);
    };
    for (const TinVertex& p : points) {
        auto& slots = seen[hash_xy(p.x, p.y)];
        int found = -1;
        for (int s : slots)
            if (uniq[s].x == p.x && uniq[s].y == p.y) {
                found = s;
                break;
            }
        if (found < 0) {
            slots.push_back(static_cast<int>(uniq.size()));
            uniq.push_back(p);
        } else if (policy == DuplicatePolicy::KeepMaxZ ? (p.z > uniq[found].z)
                                                       : (p.z < uniq[found].z)) {
            uniq[found].z = p.z;
        }
    }

    if (uniq.size() < 3)
        throw DegenerateInputError("delaunay needs at least 3 distinct (x, y) points");

    double lo_x = uniq[0].x, hi_x = uniq[0].x, lo_y = uniq[0].y, hi_y = uniq[0].y;
    for (const TinVertex& p : uniq) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    const double diag2 = (hi_x - lo_x) * (hi_x - lo_x) + (hi_y - lo_y) * (hi_y - lo_y);
    bool collinear = true;
    for (std::size_t i = 2; i < uniq.size() && collinear; ++i) {
        if (std::abs(orient2d(uniq[0].x, uniq[0].y, uniq[1].x, uniq[1].y, uniq[i].x, uniq[i].y)) >
            1e-12 * diag2)
            collinear = false;
    }
    if (collinear) throw DegenerateInputError("delaunay input points are collinear");

    return Triangulator(std::move(uniq)).run();
}

namespace {

struct Bary {
    double z;
    bool inside;
};

inline Bary barycentric(const Tin& tin, const TinTriangle& t, double x, double y, double eps) {
    const TinVertex& a = tin.vertices[t.a];
    const TinVertex& b = tin.vertices[t.b];
    const TinVertex& c = tin.vertices[t.c];
    const double oa = orient2d(b.x, b.y, c.x, c.y, x, y);
    const double ob = orient2d(c.x, c.y, a.x, a.y, x, y);
    const double oc = orient2d(a.x, a.y, b.x, b.y, x, y);
    const double denom = oa + ob + oc; // == orient2d(a, b, c)
    Bary r{0.0, false};
    if (denom <= 0.0) return r;
    if (oa >= -eps && ob >= -eps && oc >= -eps) {
        r.z = (oa * a.z + ob * b.z + oc * c.z) / denom;
        r.inside = true;
    }
    return r;
}

double containment_eps(const Tin& tin) {
    if (tin.vertices.empty()) return 0.0;
    double lo_x = tin.vertices[0].x, hi_x = lo_x, lo_y = tin.vertices[0].y, hi_y = lo_y;
    for (const TinVertex& v : tin.vertices) {
        lo_x = std::min(lo_x, v.x);
        hi_x = std::max(hi_x, v.x);
        lo_y = std::min(lo_y, v.y);
        hi_y = std::max(hi_y, v.y);
    }
    const double diag2 = (hi_x - lo_x) * (hi_x - lo_x) + (hi_y - lo_y) * (hi_y - lo_y);
    return 1e-12 * std::max(diag2, 1.0);
}

} // namespace

std::optional<double> tin_interpolate(const Tin& tin, double x, double y) {
    const double eps = containment_eps(tin);
    for (const TinTriangle& t : tin.triangles) {
        const Bary b = barycentric(tin, t, x, y, eps);
        if (b.inside) return b.z;
    }
    return std::nullopt;
}

Raster rasterize_tin(const Tin& tin, const GridSpec& grid, double max_edge) {
    grid.validate();
    if (max_edge < 0.0) throw ParameterError("max_edge must be >= 0");

    Raster out = Raster::make_f32(grid, 1, kNoData);
    out.nodata = kNoData;
    if (tin.triangles.empty()) return out;

    // uniform-grid index over triangle bboxes
    const int nt = static_cast<int>(tin.triangles.size());
    std::vector<char> blocked(nt, 0);
    if (max_edge > 0.0) {
        const double m2 = max_edge * max_edge;
        for (int i = 0; i < nt; ++i) {
            const TinTriangle& t = tin.triangles[i];
            const TinVertex& a = tin.vertices[t.a];
            const TinVertex& b = tin.vertices[t.b];
            const TinVertex& c = tin.vertices[t.c];
            auto len2 = [](const TinVertex& u, const TinVertex& v) {
                return (u.x - v.x) * (u.x - v.x) + (u.y - v.y) * (u.y - v.y);
            };
            blocked[i] = len2(a, b) > m2 || len2(b, c) > m2 || len2(c, a) > m2;
        }
    }

    const int bins_x = std::max(1, grid.width / 4);
    const int bins_y = std::max(1, grid.height / 4);
    const double span_x = grid.width * grid.pixel_size;
    const double span_y = grid.height * grid.pixel_size;
    std::vector<std::vector<int>> bins(static_cast<std::size_t>(bins_x) * bins_y);
    auto bin_x = [&](double x) {
        return std::clamp(static_cast<int>((x - grid.origin_x) / span_x * bins_x), 0, bins_x - 1);
    };
    auto bin_y = [&](double y) {
        return std::clamp(static_cast<int>((grid.origin_y - y) / span_y * bins_y), 0, bins_y - 1);
    };
    for (int i = 0; i < nt; ++i) {
        const TinTriangle& t = tin.triangles[i];
        const TinVertex& a = tin.vertices[t.a];
        const TinVertex& b = tin.vertices[t.b];
        const TinVertex& c = tin.vertices[t.c];
        const int x0 = bin_x(std::min({a.x, b.x, c.x}));
        const int x1 = bin_x(std::max({a.x, b.x, c.x}));
        const int y0 = bin_y(std::max({a.y, b.y, c.y}));
        const int y1 = bin_y(std::min({a.y, b.y, c.y}));
        for (int by = y0; by <= y1; ++by)
            for (int bx = x0; bx <= x1; ++bx)
                bins[static_cast<std::size_t>(by) * bins_x + bx].push_back(i);
    }

    const double eps = containment_eps(tin);
#pragma omp parallel for schedule(static) num_threads(omp_thread_count())
    for (int row = 0; row < grid.height; ++row) {
        const double y = grid.center_y(row);
        const int by = bin_y(y);
        for (int col = 0; col < grid.width; ++col) {
            const double x = grid.center_x(col);
            const auto& cand = bins[static_cast<std::size_t>(by) * bins_x + bin_x(x)];
            // smallest triangle index wins so shared-edge pixels are
            // deterministic for any thread count
            for (int ti : cand) {
                const Bary bc = barycentric(tin, tin.triangles[ti], x, y, eps);
                if (!bc.inside) continue;
                if (!blocked[ti]) out.at_f32(0, row, col) = static_cast<float>(bc.z);
                break;
            }
        }
    }
    return out;
}

} // namespace chm
