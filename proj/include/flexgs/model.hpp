#pragma once

// In-memory Gaussian point cloud: N rows x 59 float32 attributes plus a
// per-row flag marking rows whose high-order SH block has been dropped.
// Attribute values are stored raw (pre-activation); activations are applied
// by consumers such as the renderer.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace flexgs {

enum class ChannelGroup : uint8_t {
    Position = 0,
    SHBase = 1,
    SHAdv = 2,
    Opacity = 3,
    Scale = 4,
    Rotation = 5,
};

inline constexpr std::size_t kChannelGroupCount = 6;
inline constexpr std::size_t kChannelCount = 59;

// Channel layout mirrors the serialized column order (normals excluded).
inline constexpr std::size_t kPositionBegin = 0;   // x, y, z
inline constexpr std::size_t kShBaseBegin = 3;     // f_dc_0..2
inline constexpr std::size_t kShAdvBegin = 6;      // f_rest_0..44
inline constexpr std::size_t kShAdvCount = 45;
inline constexpr std::size_t kOpacityChannel = 51;
inline constexpr std::size_t kScaleBegin = 52;     // scale_0..2
inline constexpr std::size_t kRotationBegin = 55;  // rot_0..3
inline constexpr std::size_t kNonShAdvCount = kChannelCount - kShAdvCount;  // 14

struct ChannelInfo {
    std::string name;
    ChannelGroup group;
};

struct ChannelSchema {
    std::array<ChannelInfo, kChannelCount> channels;

    static const ChannelSchema& canonical();
    std::size_t group_width(ChannelGroup g) const;
};

const char* channel_group_name(ChannelGroup g);
ChannelGroup channel_group_of(std::size_t channel);
bool is_sh_adv_channel(std::size_t channel);

struct GaussianModel {
    std::size_t rows = 0;
    std::vector<float> data;       // rows x kChannelCount, row-major
    std::vector<uint8_t> sh_mask;  // 1 = SH_adv block logically absent

    const ChannelSchema& schema() const { return ChannelSchema::canonical(); }

    float* row(std::size_t r) { return data.data() + r * kChannelCount; }
    const float* row(std::size_t r) const { return data.data() + r * kChannelCount; }
    float& at(std::size_t r, std::size_t c) { return data[r * kChannelCount + c]; }
    float at(std::size_t r, std::size_t c) const { return data[r * kChannelCount + c]; }
    bool masked(std::size_t r) const { return sh_mask[r] != 0; }

    void resize(std::size_t n) {
        rows = n;
        data.assign(n * kChannelCount, 0.0f);
        sh_mask.assign(n, 0);
    }
};

// Activations. Stored values are raw: opacity is a logit, scales are logs,
// rotations are unnormalized quaternions. Computed in double so that
// inverse(activate(x)) recovers x to well below 1e-6 over sane ranges.
inline double activate_opacity(double logit) { return 1.0 / (1.0 + std::exp(-logit)); }
inline double inverse_opacity(double a) { return std::log(a / (1.0 - a)); }
inline double activate_scale(double log_s) { return std::exp(log_s); }
inline double inverse_scale(double s) { return std::log(s); }

struct Violation {
    std::size_t row;
    std::size_t channel;  // first offending channel
    std::string rule;
};

// Checks: every value finite; rotation quaternions have nonzero norm (so
// normalization is defined); activated opacities/scales land in range.
std::vector<Violation> validate(const GaussianModel& model);

GaussianModel deep_copy(const GaussianModel& model);

// FNV-1a over row count, attribute bytes, and mask bytes. Used by tests to
// prove non-mutation of inputs.
uint64_t model_checksum(const GaussianModel& model);

// Serialized size of the model at full float32 precision: header plus
// 59 floats per intact row and 14 floats per SH-dropped row.
uint64_t model_byte_size(const GaussianModel& model);

}  // namespace flexgs
