#pragma once

#include <filesystem>

#include "flexgs/camera.hpp"

namespace flexgs {

// 8-bit RGB PNG; values are clamped to [0,1] and scaled by 255 with
// round-to-nearest. Output bytes are deterministic for identical buffers.
void write_png(const ImageBuffer& img, const std::filesystem::path& path);

// Binary PFM (color, little-endian, bottom-up rows), full float precision.
void write_pfm(const ImageBuffer& img, const std::filesystem::path& path);
ImageBuffer read_pfm(const std::filesystem::path& path);

}  // namespace flexgs
