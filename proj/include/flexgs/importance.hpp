#pragma once

// Global importance scores: for each row, the number of pixels it
// contributes to across a set of views, weighted by activated opacity and a
// volume term that damps very large Gaussians. No gradients, single pass.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "flexgs/camera.hpp"
#include "flexgs/model.hpp"

namespace flexgs {

struct ImportanceParams {
    double cap_percentile = 0.9;  // volume percentile used as the cap
    double exponent = 0.1;        // volume term is (min(v, cap)/cap)^exponent
};

// Volume weight for one row given a positive cap.
double volume_weight(double volume, double cap, double exponent = 0.1);

struct ImportanceScores {
    std::vector<double> score;            // per row, >= 0
    std::vector<uint32_t> rank;           // row indices, descending score,
                                          // ties by ascending row index
    double volume_cap = 0.0;
};

// score = hit_count * activated_opacity * volume_weight, with hit counts
// accumulated over all cameras. Deterministic for identical inputs.
ImportanceScores compute_scores(const GaussianModel& model, const std::vector<Camera>& cameras,
                                const ImportanceParams& params = {});

// Raw little-endian f32 per row, in row order.
void export_scores(const ImportanceScores& scores, const std::filesystem::path& path);

}  // namespace flexgs
