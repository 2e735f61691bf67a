#pragma once

// Pinhole cameras and float RGB image buffers. Cameras serialize to a JSON
// array of {width, height, fx, fy, cx, cy, world_to_camera} objects where
// world_to_camera is a rigid 4x4 matrix given as 16 floats, row-major.

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <vector>

namespace flexgs {

struct Camera {
    int width = 0;
    int height = 0;
    float fx = 0.0f;
    float fy = 0.0f;
    float cx = 0.0f;
    float cy = 0.0f;
    Eigen::Matrix4f world_to_camera = Eigen::Matrix4f::Identity();

    Eigen::Matrix3f rotation() const { return world_to_camera.topLeftCorner<3, 3>(); }
    Eigen::Vector3f translation() const { return world_to_camera.topRightCorner<3, 1>(); }
    // Camera center in world coordinates.
    Eigen::Vector3f position() const { return -rotation().transpose() * translation(); }
};

// Throws FormatError when dimensions or focal lengths are not positive or
// the rotation block is not orthonormal (1e-4 tolerance).
void validate_camera(const Camera& cam);

std::vector<Camera> load_cameras(const std::filesystem::path& path);
void save_cameras(const std::vector<Camera>& cams, const std::filesystem::path& path);

struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<float> rgb;  // height x width x 3, row-major, linear [0,1]

    ImageBuffer() = default;
    ImageBuffer(int w, int h) : width(w), height(h), rgb(std::size_t(w) * h * 3, 0.0f) {}

    float* pixel(int x, int y) { return rgb.data() + (std::size_t(y) * width + x) * 3; }
    const float* pixel(int x, int y) const {
        return rgb.data() + (std::size_t(y) * width + x) * 3;
    }
};

}  // namespace flexgs
