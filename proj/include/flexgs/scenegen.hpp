#pragma once

// Deterministic synthetic scenes for testing and benchmarks. All sampling
// is counter-based (see prng.hpp), so a spec generates bit-identical models
// and cameras on every platform. Gaussians are laid out in spatial clusters
// (rows of one cluster are contiguous), which gives per-region value ranges
// far narrower than the global range, as in captured scenes. A configurable
// fraction of rows at the end gets near-zero opacity and tiny volume; these
// are guaranteed low-importance so pruning behavior has a clean signal.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "flexgs/camera.hpp"
#include "flexgs/model.hpp"

namespace flexgs {

struct SceneSpec {
    uint64_t seed = 42;
    std::size_t n_gaussians = 2000;
    double extent = 10.0;                  // positions span [-extent/2, extent/2]^3
    double opacity_range[2] = {0.35, 0.95};  // activated opacities of normal rows
    double scale_range[2] = {0.03, 0.15};    // activated scales of normal rows
    double sh_energy = 0.2;                // magnitude of high-order SH coefficients
    double low_importance_fraction = 0.3;  // trailing rows made invisible
    std::size_t n_clusters = 32;
    std::size_t n_cameras = 8;
    double orbit_radius = 14.0;
    double orbit_elevation = 0.45;         // radians above the horizontal plane
    int image_width = 96;
    int image_height = 96;
    double focal = 85.0;
};

std::string scene_spec_to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(const std::string& text);

std::pair<GaussianModel, std::vector<Camera>> generate_scene(const SceneSpec& spec);

struct FixturePaths {
    std::filesystem::path model_ply;
    std::filesystem::path cameras_json;
};

// Writes model.ply and cameras.json into dir (created if needed).
FixturePaths write_fixture(const SceneSpec& spec, const std::filesystem::path& dir);

}  // namespace flexgs
