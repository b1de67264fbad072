// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0
//
// Independent brute-force oracles used by the tests. Everything here
// favors obviousness over speed and avoids the production code paths.

#ifndef CHM_TESTS_ORACLES_HPP_
#define CHM_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "chm/ivf.hpp"
#include "chm/point_cloud.hpp"
#include "chm/tin.hpp"

namespace oracle {

// All-pairs voxel-neighborhood count: point i is noise iff the number of
// other points whose voxel index differs by at most 1 on every axis
// satisfies the rule.
inline std::vector<char> ivf_noise_allpairs(const chm::PointCloud& cloud, double res,
                                            int max_other,
                                            chm::IvfRule rule = chm::IvfRule::CountLessEqual) {
    const std::size_t n = cloud.size();
    const double mx = cloud.bounds.min_x, my = cloud.bounds.min_y, mz = cloud.bounds.min_z;
    std::vector<std::int64_t> cx(n), cy(n), cz(n);
    for (std::size_t i = 0; i < n; ++i) {
        cx[i] = static_cast<std::int64_t>(std::floor((cloud.points[i].x - mx) / res));
        cy[i] = static_cast<std::int64_t>(std::floor((cloud.points[i].y - my) / res));
        cz[i] = static_cast<std::int64_t>(std::floor((cloud.points[i].z - mz) / res));
    }
    std::vector<char> noise(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        int others = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (std::llabs(cx[i] - cx[j]) <= 1 && std::llabs(cy[i] - cy[j]) <= 1 &&
                std::llabs(cz[i] - cz[j]) <= 1)
                ++others;
        }
        noise[i] = (rule == chm::IvfRule::CountLessEqual) ? (others <= max_other)
                                                          : (others < max_other);
    }
    return noise;
}

// > 0 when p is strictly inside the circumcircle of the CCW triangle.
inline double incircle_det(double ax, double ay, double bx, double by, double cx, double cy,
                           double px, double py) {
    const double adx = ax - px, ady = ay - py;
    const double bdx = bx - px, bdy = by - py;
    const double cdx = cx - px, cdy = cy - py;
    const double ad2 = adx * adx + ady * ady;
    const double bd2 = bdx * bdx + bdy * bdy;
    const double cd2 = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd2 - bd2 * cdy) - ady * (bdx * cd2 - bd2 * cdx) +
           ad2 * (bdx * cdy - bdy * cdx);
}

// Empty-circumcircle property of a finished triangulation: no vertex may
// sit inside any triangle's circumcircle beyond the stated epsilon
// (normalized by the determinant's natural quartic length scale).
inline bool delaunay_empty_circumcircle(const chm::Tin& tin, double eps_rel) {
    double lo_x = tin.vertices[0].x, hi_x = lo_x, lo_y = tin.vertices[0].y, hi_y = lo_y;
    for (const chm::TinVertex& v : tin.vertices) {
        lo_x = std::min(lo_x, v.x);
        hi_x = std::max(hi_x, v.x);
        lo_y = std::min(lo_y, v.y);
        hi_y = std::max(hi_y, v.y);
    }
    const double diag = std::hypot(hi_x - lo_x, hi_y - lo_y);
    const double tol = eps_rel * diag * diag * diag * diag;
    for (const chm::TinTriangle& t : tin.triangles) {
        const chm::TinVertex& a = tin.vertices[t.a];
        const chm::TinVertex& b = tin.vertices[t.b];
        const chm::TinVertex& c = tin.vertices[t.c];
        for (std::size_t vi = 0; vi < tin.vertices.size(); ++vi) {
            if (static_cast<int>(vi) == t.a || static_cast<int>(vi) == t.b ||
                static_cast<int>(vi) == t.c)
                continue;
            const chm::TinVertex& p = tin.vertices[vi];
            if (incircle_det(a.x, a.y, b.x, b.y, c.x, c.y, p.x, p.y) > tol) return false;
        }
    }
    return true;
}

// Barycentric evaluation against an explicit triangle list, first
// containing triangle in index order wins.
inline std::optional<double> interpolate_bruteforce(const chm::Tin& tin, double x, double y,
                                                    double max_edge = 0.0) {
    for (const chm::TinTriangle& t : tin.triangles) {
        const chm::TinVertex& a = tin.vertices[t.a];
        const chm::TinVertex& b = tin.vertices[t.b];
        const chm::TinVertex& c = tin.vertices[t.c];
        const double oa = (c.x - b.x) * (y - b.y) - (c.y - b.y) * (x - b.x);
        const double ob = (a.x - c.x) * (y - c.y) - (a.y - c.y) * (x - c.x);
        const double oc = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
        const double denom = oa + ob + oc;
        if (denom <= 0.0) continue;
        const double eps = 1e-12 * denom;
        if (oa < -eps || ob < -eps || oc < -eps) continue;
        if (max_edge > 0.0) {
            auto len2 = [](const chm::TinVertex& u, const chm::TinVertex& v) {
                return (u.x - v.x) * (u.x - v.x) + (u.y - v.y) * (u.y - v.y);
            };
            if (len2(a, b) > max_edge * max_edge || len2(b, c) > max_edge * max_edge ||
                len2(c, a) > max_edge * max_edge)
                return std::nullopt;
        }
        return (oa * a.z + ob * b.z + oc * c.z) / denom;
    }
    return std::nullopt;
}

} // namespace oracle

#endif // CHM_TESTS_ORACLES_HPP_
