#pragma once

// CPU tile-based elliptical splatting renderer. Gaussians are projected to
// screen-space ellipses, binned into 16x16 pixel tiles, depth-sorted per
// tile, and alpha-composited front to back. Images are linear float RGB on
// a black background; no tone mapping.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "flexgs/camera.hpp"
#include "flexgs/model.hpp"

namespace flexgs {

inline constexpr float kNearPlane = 0.01f;
inline constexpr float kLowPass = 0.3f;           // added to cov2d diagonal
inline constexpr float kAlphaFloor = 1.0f / 255.0f;
inline constexpr float kTransmittanceFloor = 1e-4f;
inline constexpr int kTileSize = 16;
inline constexpr float kFootprintSigma = 3.0f;    // footprint radius in sigmas

struct ActivatedGaussian {
    Eigen::Vector3f position;
    Eigen::Vector3f scale;       // activated (exp of stored)
    Eigen::Quaternionf rotation; // unit quaternion
    float opacity = 0.0f;        // activated (sigmoid of stored)
};

ActivatedGaussian activate_row(const GaussianModel& model, std::size_t row);

struct ProjectedGaussian {
    Eigen::Vector2f mean2d;   // pixel coordinates
    Eigen::Matrix2f cov2d;    // includes the low-pass term
    float depth = 0.0f;       // camera-space z
};

// Returns nullopt when the center is behind the near plane.
std::optional<ProjectedGaussian> project_gaussian(const ActivatedGaussian& g, const Camera& cam);

// View-dependent color: 0.5 + base (degree 0) + higher-order terms for the
// given unit view direction. sh_adv may be null (treated as all zeros);
// result is unclamped.
Eigen::Vector3f evaluate_sh(const float* sh_base, const float* sh_adv, const Eigen::Vector3f& dir);

// Per-row contribution counters, accumulated across render calls.
struct RenderStats {
    std::vector<uint64_t> hits;
    uint64_t views_rendered = 0;
};

// Renders one view. When stats is non-null, a row's counter is incremented
// once per pixel it contributes to (alpha >= 1/255 inside its footprint and
// the pixel is not yet saturated).
ImageBuffer render(const GaussianModel& model, const Camera& cam, RenderStats* stats = nullptr);

}  // namespace flexgs
