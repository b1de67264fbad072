// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "chm/loss.hpp"
#include "chm/surfaces.hpp"

namespace chm {

void fill_image_slot(Tensor4& batch, int slot, const Raster& image, bool flip_h, bool flip_v) {
    const int h = image.grid.height, w = image.grid.width;
    if (batch.c != image.bands || batch.h != h || batch.w != w)
        throw ShapeError("image patch does not match batch tensor shape");
    for (int b = 0; b < image.bands; ++b)
        for (int row = 0; row < h; ++row)
            for (int col = 0; col < w; ++col) {
                const int sr = flip_v ? h - 1 - row : row;
                const int sc = flip_h ? w - 1 - col : col;
                batch.at(slot, b, row, col) = image.at_u8(b, sr, sc) / 255.0f;
            }
}

std::uint64_t fill_target_slot(Tensor4& batch, int slot, const Raster& target, bool flip_h,
                               bool flip_v) {
    const int h = target.grid.height, w = target.grid.width;
    if (batch.c != 1 || batch.h != h || batch.w != w)
        throw ShapeError("target patch does not match batch tensor shape");
    std::uint64_t clamped = 0;
    for (int row = 0; row < h; ++row)
        for (int col = 0; col < w; ++col) {
            const int sr = flip_v ? h - 1 - row : row;
            const int sc = flip_h ? w - 1 - col : col;
            const double meters = unscale_chm(target.at_u8(0, sr, sc));
            double scaled = meters / kHeightScaleMeters;
            if (scaled > 1.0) {
                scaled = 1.0;
                ++clamped;
            }
            batch.at(slot, 0, row, col) = static_cast<float>(scaled);
        }
    return clamped;
}

namespace {

struct Batcher {
    const Dataset& ds;
    int patch_h, patch_w, image_bands;

    explicit Batcher(const Dataset& dataset) : ds(dataset) {
        if (ds.items.empty()) throw ParameterError("training dataset is empty");
        const Raster& img = ds.items[0].pair.image;
        patch_h = img.grid.height;
        patch_w = img.grid.width;
        image_bands = img.bands;
        for (const DatasetItem& item : ds.items) {
            if (item.pair.image.grid.height != patch_h || item.pair.image.grid.width != patch_w ||
                item.pair.image.bands != image_bands)
                throw ShapeError("dataset patches disagree in size");
            if (item.pair.target.grid.height != patch_h || item.pair.target.grid.width != patch_w)
                throw ShapeError("dataset target does not match its image patch");
        }
    }

    // flips[i] = (flip_h, flip_v) per slot; empty = no augmentation
    std::uint64_t build(const std::vector<std::size_t>& idx, std::size_t first, std::size_t count,
                        const std::vector<std::pair<bool, bool>>& flips, Tensor4& images,
                        Tensor4& targets) const {
        images = Tensor4(static_cast<int>(count), image_bands, patch_h, patch_w);
        targets = Tensor4(static_cast<int>(count), 1, patch_h, patch_w);
        std::uint64_t clamped = 0;
        for (std::size_t s = 0; s < count; ++s) {
            const PatchPair& pair = ds.items[idx[first + s]].pair;
            const auto [fh, fv] = flips.empty() ? std::pair{false, false} : flips[s];
            fill_image_slot(images, static_cast<int>(s), pair.image, fh, fv);
            clamped += fill_target_slot(targets, static_cast<int>(s), pair.target, fh, fv);
        }
        return clamped;
    }
};

} // namespace

TrainResult train(const Dataset& dataset, const UNetConfig& net_cfg, const TrainConfig& cfg,
                  const std::string& checkpoint_path, const std::string& log_path) {
    cfg.validate();
    net_cfg.validate();

    const Batcher batcher(dataset);
    auto [train_idx, val_idx] = split_indices(dataset.size(), cfg.val_fraction, cfg.seed);
    if (train_idx.empty()) throw ParameterError("split left no training items");

    TrainResult result;
    result.best.weights = init_weights<float>(net_cfg);
    result.best.opt.config.learning_rate = cfg.learning_rate;
    result.best.best_val_loss = std::numeric_limits<double>::infinity();

    // count target clamping once over the raw dataset
    {
        Tensor4 t(1, 1, batcher.patch_h, batcher.patch_w);
        for (const DatasetItem& item : dataset.items)
            result.clamped_target_pixels += fill_target_slot(t, 0, item.pair.target, false, false);
    }

    UNetWeights weights = result.best.weights;
    RmspropState<float> opt;
    opt.config.learning_rate = cfg.learning_rate;
    UNetWeights grads = zero_like(weights);
    const auto param_refs = collect_params(weights);
    const auto grad_refs = collect_params(grads);

    std::mt19937_64 rng(cfg.seed);
    std::bernoulli_distribution coin(0.5);

    Tensor4 images, targets;
    UNetTape<float> tape;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(train_idx.begin(), train_idx.end(), rng);

        double train_sq_sum = 0.0;
        std::size_t train_elems = 0;
        for (std::size_t first = 0; first < train_idx.size(); first += cfg.batch_size) {
            const std::size_t count =
                std::min<std::size_t>(cfg.batch_size, train_idx.size() - first);
            std::vector<std::pair<bool, bool>> flips;
            if (cfg.augment) {
                flips.resize(count);
                for (auto& f : flips) {
                    f.first = coin(rng);
                    f.second = coin(rng);
                }
            }
            batcher.build(train_idx, first, count, flips, images, targets);

            const Tensor4& pred = unet_forward_tape(weights, images, tape);
            const double batch_loss = mse_loss(pred, targets);
            if (!std::isfinite(batch_loss))
                throw DivergedTrainingError("non-finite training loss at epoch " +
                                            std::to_string(epoch));
            train_sq_sum += batch_loss * static_cast<double>(pred.size());
            train_elems += pred.size();

            const Tensor4 gl = mse_loss_grad(pred, targets);
            unet_backward(weights, tape, gl, grads);
            rmsprop_step(param_refs, grad_refs, opt);
        }

        // validation, never augmented
        double val_sq_sum = 0.0, val_abs_sum = 0.0;
        std::size_t val_elems = 0;
        for (std::size_t first = 0; first < val_idx.size(); first += cfg.batch_size) {
            const std::size_t count = std::min<std::size_t>(cfg.batch_size, val_idx.size() - first);
            batcher.build(val_idx, first, count, {}, images, targets);
            const Tensor4 pred = unet_forward(weights, images);
            for (std::size_t i = 0; i < pred.v.size(); ++i) {
                const double d = static_cast<double>(pred.v[i]) - targets.v[i];
                val_sq_sum += d * d;
                val_abs_sum += std::abs(d);
            }
            val_elems += pred.size();
        }
        const double val_loss = val_elems ? val_sq_sum / val_elems : 0.0;
        const double val_mae_m =
            val_elems ? val_abs_sum / val_elems * kHeightScaleMeters : 0.0;
        if (!std::isfinite(val_loss))
            throw DivergedTrainingError("non-finite validation loss at epoch " +
                                        std::to_string(epoch));

        result.log.push_back(
            {epoch, train_elems ? train_sq_sum / train_elems : 0.0, val_loss, val_mae_m});

        if (val_loss < result.best.best_val_loss) {
            result.best.weights = weights;
            result.best.opt = opt;
            result.best.epoch = static_cast<std::uint64_t>(epoch);
            result.best.best_val_loss = val_loss;
            if (!checkpoint_path.empty()) save_checkpoint(result.best, checkpoint_path);
        }
    }

    if (cfg.epochs == 0 && !checkpoint_path.empty()) save_checkpoint(result.best, checkpoint_path);
    if (!log_path.empty()) write_train_log(result, log_path);
    return result;
}

void write_train_log(const TrainResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "# clamped_target_pixels = " << result.clamped_target_pixels << "\n";
    out << "epoch,train_loss,val_loss,val_mae_m\n";
    out.precision(17);
    for (const EpochLog& row : result.log)
        out << row.epoch << ',' << row.train_loss << ',' << row.val_loss << ',' << row.val_mae_m
            << '\n';
    if (!out) throw IoError("failed writing " + path);
}

} // namespace chm
