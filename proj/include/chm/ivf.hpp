// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_IVF_HPP_
#define CHM_IVF_HPP_

#include <vector>

#include "chm/point_cloud.hpp"

namespace chm {

// The source paper leaves the threshold comparison unstated; both
// conventions are supported and CountLessEqual ("maximal number of other
// points" survives) is the default.
enum class IvfRule { CountLessEqual, CountLess };

// A point is noise iff the number of OTHER points inside its 3x3x3 voxel
// neighborhood satisfies the rule against max_other. The voxel lattice is
// anchored at the cloud bounds minimum. mask[i] != 0 marks noise.
std::vector<char> ivf_noise_mask(const PointCloud& cloud, double voxel_res = 1.0,
                                 int max_other = 5, IvfRule rule = IvfRule::CountLessEqual);

// Returns the subset of points not flagged as noise, order preserved.
PointCloud ivf_denoise(const PointCloud& cloud, double voxel_res = 1.0, int max_other = 5,
                       IvfRule rule = IvfRule::CountLessEqual);

} // namespace chm

#endif // CHM_IVF_HPP_
