// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "chm/las_io.hpp"

namespace chm {

void PointCloud::update_bounds() {
    if (points.empty()) throw DegenerateInputError("empty point cloud has no bounds");
    Bounds3 b;
    b.min_x = b.max_x = points[0].x;
    b.min_y = b.max_y = points[0].y;
    b.min_z = b.max_z = points[0].z;
    for (const LidarPoint& p : points) {
        b.min_x = std::min(b.min_x, p.x);
        b.max_x = std::max(b.max_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_y = std::max(b.max_y, p.y);
        b.min_z = std::min(b.min_z, p.z);
        b.max_z = std::max(b.max_z, p.z);
    }
    bounds = b;
}

PointCloud make_cloud(std::vector<LidarPoint> points, std::string crs_tag) {
    PointCloud c;
    c.points = std::move(points);
    c.crs_tag = std::move(crs_tag);
    c.update_bounds();
    for (const LidarPoint& p : c.points) {
        if (!std::isfinite(p.z)) throw ParseError("non-finite z coordinate in point cloud");
        if (p.return_number < 1) throw ParseError("return_number must be >= 1");
    }
    return c;
}

namespace {

PointCloud read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw DegenerateInputError(path + ": empty file");
    // tolerate a UTF-8 BOM and trailing CR
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line != "x,y,z,classification,return_number")
        throw ParseError(path + ":1: expected header 'x,y,z,classification,return_number'");

    std::vector<LidarPoint> pts;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        LidarPoint p;
        long cls = 0, ret = 0;
        char c1, c2, c3, c4;
        std::istringstream ss(line);
        ss >> p.x >> c1 >> p.y >> c2 >> p.z >> c3 >> cls >> c4 >> ret;
        if (!ss || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',')
            throw ParseError(path + ":" + std::to_string(lineno) + ": malformed row '" + line + "'");
        ss >> std::ws;
        if (!ss.eof())
            throw ParseError(path + ":" + std::to_string(lineno) + ": trailing data in row");
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
            throw ParseError(path + ":" + std::to_string(lineno) + ": non-finite coordinate");
        if (cls < 0 || cls > 255)
            throw ParseError(path + ":" + std::to_string(lineno) + ": classification out of [0,255]");
        if (ret < 1 || ret > 255)
            throw ParseError(path + ":" + std::to_string(lineno) + ": return_number out of [1,255]");
        p.classification = static_cast<std::uint8_t>(cls);
        p.return_number = static_cast<std::uint8_t>(ret);
        pts.push_back(p);
    }
    if (pts.empty()) throw DegenerateInputError(path + ": no points");
    return make_cloud(std::move(pts));
}

void write_csv(const PointCloud& cloud, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "x,y,z,classification,return_number\n";
    out.precision(17);
    for (const LidarPoint& p : cloud.points) {
        out << p.x << ',' << p.y << ',' << p.z << ','
            << static_cast<int>(p.classification) << ','
            << static_cast<int>(p.return_number) << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

} // namespace

PointCloud read_point_cloud(const std::string& path, CloudFormat format) {
    return format == CloudFormat::Csv ? read_csv(path) : read_las(path);
}

void write_point_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format) {
    if (format == CloudFormat::Csv)
        write_csv(cloud, path);
    else
        write_las(cloud, path);
}

} // namespace chm
