// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_TENSOR_HPP_
#define CHM_TENSOR_HPP_

#include <cstddef>
#include <vector>

#include "chm/error.hpp"

namespace chm {

// NCHW tensor, contiguous, row-major within an image plane. Production
// code instantiates float; the gradient-check oracles instantiate double.
template <typename T>
struct TensorT {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<T> v;

    TensorT() = default;
    TensorT(int n_, int c_, int h_, int w_, T fill = T(0))
        : n(n_), c(c_), h(h_), w(w_),
          v(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

    std::size_t idx(int in, int ic, int iy, int ix) const {
        return ((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix;
    }
    T& at(int in, int ic, int iy, int ix) { return v[idx(in, ic, iy, ix)]; }
    T at(int in, int ic, int iy, int ix) const { return v[idx(in, ic, iy, ix)]; }

    std::size_t size() const { return v.size(); }
    bool same_shape(const TensorT& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }
};

using Tensor4 = TensorT<float>;

template <typename T>
void require_same_shape(const TensorT<T>& a, const TensorT<T>& b, const char* what) {
    if (!a.same_shape(b)) throw ShapeError(std::string(what) + ": tensor shapes differ");
}

} // namespace chm

#endif // CHM_TENSOR_HPP_
