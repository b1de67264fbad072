// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_TRAIN_HPP_
#define CHM_TRAIN_HPP_

#include <string>
#include <vector>

#include "chm/checkpoint.hpp"
#include "chm/dataset.hpp"

namespace chm {

// 1.0 in network output space corresponds to this many meters.
inline constexpr double kHeightScaleMeters = 100.0;

struct TrainConfig {
    int epochs = 500;
    int batch_size = 32;
    double learning_rate = 1e-4;
    double val_fraction = 0.1;
    std::uint64_t seed = 0;
    bool augment = true;

    void validate() const {
        if (epochs < 0) throw ParameterError("epochs must be >= 0");
        if (batch_size < 1) throw ParameterError("batch_size must be >= 1");
        if (val_fraction <= 0.0 || val_fraction >= 1.0)
            throw ParameterError("val_fraction must be in (0, 1)");
    }
};

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_mae_m = 0.0;
};

struct TrainResult {
    Checkpoint best;
    std::vector<EpochLog> log;
    // target pixels whose scaled height exceeded 1.0 (heights above the
    // 100 m output ceiling), counted over one pass of the dataset
    std::uint64_t clamped_target_pixels = 0;
};

// Copy a patch into one slot of a batched input/target tensor pair.
// Images scale by /255 onto [0, 1]; targets unquantize to meters (/2.5)
// and scale by /100, clamping at 1. Returns the number of clamped pixels.
void fill_image_slot(Tensor4& batch, int slot, const Raster& image, bool flip_h, bool flip_v);
std::uint64_t fill_target_slot(Tensor4& batch, int slot, const Raster& target, bool flip_h,
                               bool flip_v);

// Seeded shuffle + batches + RMSprop, validation after every epoch, best
// validation loss checkpointed. Deterministic for a fixed seed. Empty
// `checkpoint_path` / `log_path` skip the file outputs.
TrainResult train(const Dataset& dataset, const UNetConfig& net_cfg, const TrainConfig& cfg,
                  const std::string& checkpoint_path = "", const std::string& log_path = "");

void write_train_log(const TrainResult& result, const std::string& path);

} // namespace chm

#endif // CHM_TRAIN_HPP_
