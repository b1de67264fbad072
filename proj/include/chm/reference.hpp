// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0
//
// Plain serial implementations of the parallel kernels. Tests pin the
// OpenMP kernels against these, and the benchmark compares their
// runtimes. Linked by tests and the benchmark only.

#ifndef CHM_REFERENCE_HPP_
#define CHM_REFERENCE_HPP_

#include <vector>

#include "chm/footprints.hpp"
#include "chm/ivf.hpp"
#include "chm/nn_ops.hpp"
#include "chm/raster_ops.hpp"
#include "chm/tin.hpp"

namespace chm::ref {

std::vector<char> ivf_noise_mask(const PointCloud& cloud, double voxel_res, int max_other,
                                 IvfRule rule = IvfRule::CountLessEqual);

// Linear scan over every triangle per pixel; no spatial index.
Raster rasterize_tin(const Tin& tin, const GridSpec& grid, double max_edge = 0.0);

Tensor4 conv2d_forward(const Tensor4& x, const Tensor4& k, const std::vector<float>& bias,
                       ConvSpec spec = {});
ConvGrads<float> conv2d_backward(const Tensor4& x, const Tensor4& k, ConvSpec spec,
                                 const Tensor4& gout);

Raster aggregate_block(const Raster& r, int factor, BlockStat stat);

Raster rasterize_footprints_mask(const FootprintSet& fps, const GridSpec& grid, double buffer);

} // namespace chm::ref

#endif // CHM_REFERENCE_HPP_
