// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_OPTIMIZER_HPP_
#define CHM_OPTIMIZER_HPP_

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "chm/unet.hpp"

namespace chm {

struct RmspropConfig {
    double learning_rate = 1e-4;
    double decay = 0.9;   // squared-gradient accumulator decay
    double epsilon = 1e-7;
};

// Per-parameter squared-gradient accumulators, keyed by parameter name so
// checkpoints survive container reshuffles.
template <typename T>
struct RmspropState {
    RmspropConfig config;
    std::map<std::string, std::vector<T>> accum;
};

// s <- decay * s + (1 - decay) * g^2;  w <- w - lr * g / (sqrt(s) + eps)
template <typename T>
void rmsprop_step(const std::vector<ParamRef<T>>& params, const std::vector<ParamRef<T>>& grads,
                  RmspropState<T>& state) {
    if (params.size() != grads.size())
        throw ShapeError("rmsprop_step: parameter/gradient lists differ in length");
    const double rho = state.config.decay;
    const double lr = state.config.learning_rate;
    const double eps = state.config.epsilon;
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::vector<T>& w = *params[i].values;
        const std::vector<T>& g = *grads[i].values;
        if (w.size() != g.size())
            throw ShapeError("rmsprop_step: gradient size mismatch for " + params[i].name);
        std::vector<T>& s = state.accum[params[i].name];
        if (s.size() != w.size()) s.assign(w.size(), T(0));
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double gj = static_cast<double>(g[j]);
            const double sj = rho * static_cast<double>(s[j]) + (1.0 - rho) * gj * gj;
            s[j] = static_cast<T>(sj);
            w[j] = static_cast<T>(static_cast<double>(w[j]) -
                                  lr * gj / (std::sqrt(sj) + eps));
        }
    }
}

} // namespace chm

#endif // CHM_OPTIMIZER_HPP_
