// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#include "chm/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace chm {

namespace {

double value_at(const Raster& r, std::size_t i) {
    return r.dtype == DType::U8 ? static_cast<double>(r.u8[i]) : static_cast<double>(r.f32[i]);
}

bool valid_at(const Raster& r, std::size_t i) {
    if (r.dtype != DType::F32 || !r.nodata) return true;
    return r.f32[i] != *r.nodata;
}

} // namespace

SiteReport compute_metrics(const Raster& pred, const Raster& obs, const Raster* mask,
                           const std::string& site_id) {
    if (pred.grid != obs.grid) throw AlignmentError("pred and obs grids differ");
    if (mask && mask->grid != obs.grid) throw AlignmentError("mask grid differs");

    SiteReport rep;
    rep.site_id = site_id;
    double abs_sum = 0.0, sq_sum = 0.0, obs_sum = 0.0;
    const std::size_t n = static_cast<std::size_t>(pred.grid.pixel_count());
    for (std::size_t i = 0; i < n; ++i) {
        if (!valid_at(pred, i) || !valid_at(obs, i)) continue;
        if (mask && mask->u8[i] == 0) continue;
        const double d = value_at(pred, i) - value_at(obs, i);
        abs_sum += std::abs(d);
        sq_sum += d * d;
        obs_sum += value_at(obs, i);
        ++rep.n_pixels;
    }
    if (rep.n_pixels == 0) throw DegenerateInputError("no valid pixels to score");
    rep.mae = abs_sum / static_cast<double>(rep.n_pixels);
    rep.rmse = std::sqrt(sq_sum / static_cast<double>(rep.n_pixels));
    rep.mean_obs_height = obs_sum / static_cast<double>(rep.n_pixels);
    if (rep.mean_obs_height > 0.0) {
        rep.rel_mae = rep.mae / rep.mean_obs_height;
        rep.rel_mae_defined = true;
    }
    return rep;
}

std::vector<std::pair<float, float>> scatter_sample(const Raster& pred, const Raster& obs,
                                                    std::size_t n, std::uint64_t seed) {
    if (pred.grid != obs.grid) throw AlignmentError("pred and obs grids differ");

    std::vector<std::size_t> valid;
    const std::size_t total = static_cast<std::size_t>(pred.grid.pixel_count());
    for (std::size_t i = 0; i < total; ++i)
        if (valid_at(pred, i) && valid_at(obs, i)) valid.push_back(i);

    if (n < valid.size()) {
        // partial Fisher-Yates: the first n entries become the sample
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, valid.size() - 1);
            std::swap(valid[i], valid[pick(rng)]);
        }
        valid.resize(n);
    }

    std::vector<std::pair<float, float>> rows;
    rows.reserve(valid.size());
    for (std::size_t i : valid)
        rows.emplace_back(static_cast<float>(value_at(obs, i)),
                          static_cast<float>(value_at(pred, i)));
    return rows;
}

void write_scatter_csv(const std::vector<std::pair<float, float>>& rows,
                       const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "obs_m,pred_m\n";
    out.precision(9);
    for (const auto& [obs, pred] : rows) out << obs << ',' << pred << '\n';
    if (!out) throw IoError("failed writing " + path);
}

ProductComparison compare_to_product(const Raster& pred_fine, const Raster& product,
                                     const Raster& obs_fine, BlockStat stat) {
    if (pred_fine.grid != obs_fine.grid)
        throw AlignmentError("prediction and observation grids differ");
    const double ratio = product.grid.pixel_size / pred_fine.grid.pixel_size;
    const int factor = static_cast<int>(std::lround(ratio));
    if (factor < 1 || std::abs(ratio - factor) > 1e-9 * factor)
        throw AlignmentError("product resolution is not an integer multiple of the fine grid");

    ProductComparison cmp;
    cmp.factor = factor;
    const Raster pred_agg = factor == 1 ? pred_fine : aggregate_block(pred_fine, factor, stat);
    const Raster obs_agg = factor == 1 ? obs_fine : aggregate_block(obs_fine, factor, stat);

    if (product.grid.width != pred_agg.grid.width ||
        product.grid.height != pred_agg.grid.height)
        throw AlignmentError("product grid does not match the aggregated extent");

    // score both sources on the pixels valid everywhere
    Raster common = Raster::make_u8(pred_agg.grid, 1, 0);
    const std::size_t n = static_cast<std::size_t>(pred_agg.grid.pixel_count());
    for (std::size_t i = 0; i < n; ++i)
        common.u8[i] =
            valid_at(pred_agg, i) && valid_at(obs_agg, i) && valid_at(product, i) ? 1 : 0;

    Raster product_aligned = product;
    product_aligned.grid = pred_agg.grid; // dims checked above; unify origins
    cmp.product_vs_obs = compute_metrics(product_aligned, obs_agg, &common, "product");
    cmp.pred_vs_obs = compute_metrics(pred_agg, obs_agg, &common, "prediction");
    return cmp;
}

LandscapeStats landscape_stats(const Raster& median_heights) {
    if (median_heights.dtype != DType::F32 || median_heights.bands != 1)
        throw ParameterError("landscape_stats expects a 1-band f32 raster");

    LandscapeStats s;
    std::vector<float> forest;
    std::uint64_t ge2 = 0, ge40 = 0, ge50 = 0;
    const std::size_t n = static_cast<std::size_t>(median_heights.grid.pixel_count());
    for (std::size_t i = 0; i < n; ++i) {
        if (!valid_at(median_heights, i)) continue;
        const float v = median_heights.f32[i];
        ++s.n_pixels;
        s.max_median_height_m = std::max(s.max_median_height_m, static_cast<double>(v));
        if (v >= 2.0f) ++ge2;
        if (v >= 5.0f) forest.push_back(v);
        if (v >= 40.0f) ++ge40;
        if (v >= 50.0f) ++ge50;
    }
    if (s.n_pixels == 0) throw DegenerateInputError("no valid pixels for landscape stats");

    s.frac_ge_2m = static_cast<double>(ge2) / static_cast<double>(s.n_pixels);
    s.frac_ge_5m = static_cast<double>(forest.size()) / static_cast<double>(s.n_pixels);
    if (!forest.empty()) {
        const std::size_t mid = forest.size() / 2;
        std::nth_element(forest.begin(), forest.begin() + mid, forest.end());
        double med = forest[mid];
        if (forest.size() % 2 == 0) {
            const float lower = *std::max_element(forest.begin(), forest.begin() + mid);
            med = 0.5 * (static_cast<double>(lower) + med);
        }
        s.median_forest_height_m = med;
        s.frac_forest_ge_40m = static_cast<double>(ge40) / static_cast<double>(forest.size());
        s.frac_forest_ge_50m = static_cast<double>(ge50) / static_cast<double>(forest.size());
    }
    return s;
}

std::string site_report_csv(const std::vector<SiteReport>& reports) {
    std::ostringstream out;
    out.precision(9);
    out << "site_id,n_pixels,mae_m,rmse_m,rel_mae,mean_obs_height_m\n";
    for (const SiteReport& r : reports) {
        out << r.site_id << ',' << r.n_pixels << ',' << r.mae << ',' << r.rmse << ',';
        if (r.rel_mae_defined)
            out << r.rel_mae;
        else
            out << "undefined";
        out << ',' << r.mean_obs_height << '\n';
    }
    return out.str();
}

std::string site_report_text(const SiteReport& r) {
    std::ostringstream out;
    out.precision(4);
    out << "site " << (r.site_id.empty() ? "(unnamed)" : r.site_id) << ": " << r.n_pixels
        << " px, MAE " << r.mae << " m, RMSE " << r.rmse << " m";
    if (r.rel_mae_defined) out << ", relMAE " << r.rel_mae;
    out << ", mean obs " << r.mean_obs_height << " m";
    return out.str();
}

std::string landscape_stats_csv(const LandscapeStats& s) {
    std::ostringstream out;
    out.precision(9);
    out << "n_pixels,frac_ge_2m,frac_ge_5m,median_forest_height_m,frac_forest_ge_40m,"
           "frac_forest_ge_50m,max_median_height_m\n"
        << s.n_pixels << ',' << s.frac_ge_2m << ',' << s.frac_ge_5m << ','
        << s.median_forest_height_m << ',' << s.frac_forest_ge_40m << ','
        << s.frac_forest_ge_50m << ',' << s.max_median_height_m << '\n';
    return out.str();
}

std::string landscape_stats_text(const LandscapeStats& s) {
    std::ostringstream out;
    out.precision(4);
    out << "pixels " << s.n_pixels << "\n"
        << "vegetation >= 2 m: " << 100.0 * s.frac_ge_2m << " %\n"
        << "forest (>= 5 m):   " << 100.0 * s.frac_ge_5m << " %\n"
        << "median forest height: " << s.median_forest_height_m << " m\n"
        << "forest >= 40 m: " << 100.0 * s.frac_forest_ge_40m << " % of forest\n"
        << "forest >= 50 m: " << 100.0 * s.frac_forest_ge_50m << " % of forest\n"
        << "max median height: " << s.max_median_height_m << " m";
    return out.str();
}

} // namespace chm
