// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace chm {

Dataset assemble_dataset(std::vector<PatchPair> pairs, std::vector<PatchPair> empties) {
    Dataset ds;
    ds.items.reserve(pairs.size() + empties.size());
    for (PatchPair& p : pairs) ds.items.push_back({std::move(p), false});
    for (PatchPair& p : empties) {
        for (std::uint8_t v : p.target.u8)
            if (v != 0)
                throw ParameterError("background patch '" + p.source_id +
                                     "' has a nonzero target pixel");
        ds.items.push_back({std::move(p), true});
    }
    return ds;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t n, double val_fraction, std::uint64_t seed) {
    if (n < 2) throw ParameterError("split needs at least 2 items");
    if (val_fraction <= 0.0 || val_fraction >= 1.0)
        throw ParameterError("val_fraction must be in (0, 1)");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * val_fraction));
    std::vector<std::size_t> val(order.begin(), order.begin() + n_val);
    std::vector<std::size_t> train(order.begin() + n_val, order.end());
    return {std::move(train), std::move(val)};
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double val_fraction,
                                  std::uint64_t seed) {
    const auto [train_idx, val_idx] = split_indices(dataset.size(), val_fraction, seed);
    Dataset train, val;
    train.items.reserve(train_idx.size());
    val.items.reserve(val_idx.size());
    for (std::size_t i : train_idx) train.items.push_back(dataset.items[i]);
    for (std::size_t i : val_idx) val.items.push_back(dataset.items[i]);
    return {std::move(train), std::move(val)};
}

void flip_raster(Raster& r, bool horizontal, bool vertical) {
    if (!horizontal && !vertical) return;
    const int w = r.grid.width, h = r.grid.height;
    Raster src = r;
    for (int b = 0; b < r.bands; ++b)
        for (int row = 0; row < h; ++row)
            for (int col = 0; col < w; ++col) {
                const int sr = vertical ? h - 1 - row : row;
                const int sc = horizontal ? w - 1 - col : col;
                if (r.dtype == DType::U8)
                    r.at_u8(b, row, col) = src.at_u8(b, sr, sc);
                else
                    r.at_f32(b, row, col) = src.at_f32(b, sr, sc);
            }
}

void augment_flips(PatchPair& pair, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(0.5);
    const bool horizontal = coin(rng);
    const bool vertical = coin(rng);
    flip_raster(pair.image, horizontal, vertical);
    flip_raster(pair.target, horizontal, vertical);
}

} // namespace chm
