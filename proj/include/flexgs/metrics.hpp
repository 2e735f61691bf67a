#pragma once

// Image quality metrics over linear [0,1] float RGB buffers, plus size
// accounting helpers.

#include <vector>

#include "flexgs/camera.hpp"
#include "flexgs/model.hpp"

namespace flexgs {

inline constexpr double kPsnrCapDb = 100.0;   // applied when mse < 1e-10

// Mean squared error over all pixels and channels, accumulated in double.
double mse(const ImageBuffer& a, const ImageBuffer& b);

// 10*log10(1/mse) with MAX = 1.0, capped at 100 dB for near-identical pairs.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

// Mean structural similarity: 11x11 Gaussian window (sigma 1.5), constants
// C1 = 0.01^2 and C2 = 0.03^2, computed per channel over positions where the
// window fits entirely inside the image, then averaged. Requires both image
// sides >= 11.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

struct QualityReport {
    double psnr_db = 0.0;
    double ssim = 0.0;
    double mse = 0.0;  // consistent with psnr_db: mse = 10^(-psnr/10)
};

// Renders both models for every camera and averages metrics across views
// (PSNR averaged in dB).
QualityReport mean_quality(const GaussianModel& reference, const GaussianModel& candidate,
                           const std::vector<Camera>& cameras);

// Same, but against pre-rendered reference views (index-aligned with cameras).
QualityReport mean_quality_vs(const std::vector<ImageBuffer>& reference_views,
                              const GaussianModel& candidate,
                              const std::vector<Camera>& cameras);

struct SizeReport {
    double ratio = 0.0;          // original / compressed
    double reduction_pct = 0.0;  // 100 * (1 - compressed/original)
};

SizeReport compression_ratio(uint64_t original_bytes, uint64_t compressed_bytes);

}  // namespace flexgs
