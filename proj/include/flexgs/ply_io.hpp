#pragma once

// Binary little-endian PLY import/export for Gaussian point clouds.
// Files carry 62 float properties per vertex: position, normals (ignored on
// load, written as zeros), 3 base SH coefficients, 45 higher-order SH
// coefficients, opacity logit, 3 log scales, 4 quaternion components.

#include <cstddef>
#include <filesystem>
#include <stdexcept>

#include "flexgs/model.hpp"

namespace flexgs {

// Malformed or unsupported input (bad header, wrong properties, truncation,
// non-finite payload). Maps to the CLI's data-format exit code.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kPlyPropertyCount = 62;

// Byte length of the canonical header for a given vertex count.
std::size_t ply_header_size(std::size_t vertex_count);

GaussianModel load_ply(const std::filesystem::path& path);

// Writes the canonical layout. Normals are zero; rows with sh_mask set get
// zeros for the 45 high-order SH properties.
void write_ply(const GaussianModel& model, const std::filesystem::path& path);

}  // namespace flexgs
