// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0
//
// Minimal uncompressed LAS reader/writer. Reads versions 1.2-1.4 with
// point record formats 0, 1 and 6; writes 1.4 / format 6. Only the fields
// carried by LidarPoint are interpreted, the rest pass through unused.

#ifndef CHM_LAS_IO_HPP_
#define CHM_LAS_IO_HPP_

#include <string>

#include "chm/point_cloud.hpp"

namespace chm {

PointCloud read_las(const std::string& path);
void write_las(const PointCloud& cloud, const std::string& path);

} // namespace chm

#endif // CHM_LAS_IO_HPP_
