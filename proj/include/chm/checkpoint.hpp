// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0
//
// Versioned little-endian checkpoint: network config, weights, optimizer
// accumulators and the epoch counter, with per-tensor shape records.

#ifndef CHM_CHECKPOINT_HPP_
#define CHM_CHECKPOINT_HPP_

#include <cstdint>
#include <string>

#include "chm/optimizer.hpp"
#include "chm/unet.hpp"

namespace chm {

struct Checkpoint {
    UNetWeights weights; // weights.config carries the architecture
    RmspropState<float> opt;
    std::uint64_t epoch = 0;
    double best_val_loss = 0.0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);

Checkpoint load_checkpoint(const std::string& path);

// load_checkpoint + config guard: a checkpoint written under a different
// architecture raises IncompatibleCheckpointError.
Checkpoint load_checkpoint(const std::string& path, const UNetConfig& expected);

} // namespace chm

#endif // CHM_CHECKPOINT_HPP_
