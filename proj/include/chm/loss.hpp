// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_LOSS_HPP_
#define CHM_LOSS_HPP_

#include "chm/tensor.hpp"

namespace chm {

// Mean over all elements, accumulated in double.
template <typename T>
double mse_loss(const TensorT<T>& pred, const TensorT<T>& target) {
    require_same_shape(pred, target, "mse_loss");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.v.size(); ++i) {
        const double d = static_cast<double>(pred.v[i]) - static_cast<double>(target.v[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(pred.v.size());
}

// d(mse)/d(pred) = 2 (pred - target) / N
template <typename T>
TensorT<T> mse_loss_grad(const TensorT<T>& pred, const TensorT<T>& target) {
    require_same_shape(pred, target, "mse_loss_grad");
    TensorT<T> g(pred.n, pred.c, pred.h, pred.w);
    const double inv_n = 2.0 / static_cast<double>(pred.v.size());
    for (std::size_t i = 0; i < pred.v.size(); ++i)
        g.v[i] = static_cast<T>((static_cast<double>(pred.v[i]) - static_cast<double>(target.v[i])) *
                                inv_n);
    return g;
}

// Mean absolute error, reported in meters: inputs live in [0, 1] scaled
// units where 1.0 = `scale` meters.
template <typename T>
double mae_metric(const TensorT<T>& pred, const TensorT<T>& target, double scale = 100.0) {
    require_same_shape(pred, target, "mae_metric");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.v.size(); ++i)
        acc += std::abs(static_cast<double>(pred.v[i]) - static_cast<double>(target.v[i]));
    return acc / static_cast<double>(pred.v.size()) * scale;
}

} // namespace chm

#endif // CHM_LOSS_HPP_
