// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_DATASET_HPP_
#define CHM_DATASET_HPP_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "chm/patch.hpp"

namespace chm {

struct DatasetItem {
    PatchPair pair;
    bool background = false; // true for vegetation-free filler patches
};

struct Dataset {
    std::vector<DatasetItem> items;
    std::size_t size() const { return items.size(); }
};

// Concatenate training pairs with vegetation-free background patches.
// Background patches must carry all-zero targets.
Dataset assemble_dataset(std::vector<PatchPair> pairs, std::vector<PatchPair> empties);

// Seeded uniform shuffle, then prefix split: the first round(n * val_fraction)
// shuffled items validate, the rest train. Disjoint and exhaustive.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t n, double val_fraction, std::uint64_t seed);

std::pair<Dataset, Dataset> split(const Dataset& dataset, double val_fraction,
                                  std::uint64_t seed);

// Independent 50% horizontal and 50% vertical flips, image and target
// flipped together. Horizontal is drawn first.
void augment_flips(PatchPair& pair, std::mt19937_64& rng);

// in-place mirror helpers, exposed for the augmentation tests
void flip_raster(Raster& r, bool horizontal, bool vertical);

} // namespace chm

#endif // CHM_DATASET_HPP_
