// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_EVALUATE_HPP_
#define CHM_EVALUATE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chm/raster.hpp"
#include "chm/raster_ops.hpp"

namespace chm {

struct SiteReport {
    std::string site_id;
    std::uint64_t n_pixels = 0;
    double mae = 0.0;  // meters
    double rmse = 0.0; // meters
    double rel_mae = 0.0;
    double mean_obs_height = 0.0;
    bool rel_mae_defined = false; // only when mean observed height > 0
};

struct LandscapeStats {
    std::uint64_t n_pixels = 0;
    double frac_ge_2m = 0.0;
    double frac_ge_5m = 0.0; // forest fraction
    double median_forest_height_m = 0.0;
    double frac_forest_ge_40m = 0.0; // relative to forest pixels
    double frac_forest_ge_50m = 0.0;
    double max_median_height_m = 0.0;
};

// MAE / RMSE / relative MAE over valid pixels (nodata in either raster
// skipped; optional u8 mask keeps pixels where mask != 0). f64 sums.
SiteReport compute_metrics(const Raster& pred, const Raster& obs, const Raster* mask = nullptr,
                           const std::string& site_id = "");

// Seeded uniform sample of valid pixels without replacement, written as
// `obs_m,pred_m` rows. n larger than the valid count takes everything.
std::vector<std::pair<float, float>> scatter_sample(const Raster& pred, const Raster& obs,
                                                    std::size_t n, std::uint64_t seed);
void write_scatter_csv(const std::vector<std::pair<float, float>>& rows,
                       const std::string& path);

struct ProductComparison {
    SiteReport product_vs_obs;
    SiteReport pred_vs_obs; // our prediction aggregated to the product grid
    int factor = 1;
};

// Aggregate the fine prediction and observation onto the product's
// coarser grid (integer factor, mean by default) and score both sources
// against the aggregated observation on common valid pixels.
ProductComparison compare_to_product(const Raster& pred_fine, const Raster& product,
                                     const Raster& obs_fine,
                                     BlockStat stat = BlockStat::Mean);

// Fractions over valid pixels of an (already aggregated) median height
// raster. Forest = pixels >= 5 m; the 40/50 m fractions are relative to
// forest pixels.
LandscapeStats landscape_stats(const Raster& median_heights);

std::string site_report_csv(const std::vector<SiteReport>& reports);
std::string site_report_text(const SiteReport& r);
std::string landscape_stats_csv(const LandscapeStats& s);
std::string landscape_stats_text(const LandscapeStats& s);

} // namespace chm

#endif // CHM_EVALUATE_HPP_
