#include "flexgs/model.hpp"

#include <cmath>

#include "flexgs/ply_io.hpp"

namespace flexgs {

namespace {

ChannelSchema build_canonical() {
    ChannelSchema s;
    std::size_t i = 0;
    const char* pos[] = {"x", "y", "z"};
    for (const char* n : pos) s.channels[i++] = {n, ChannelGroup::Position};
    for (int k = 0; k < 3; ++k)
        s.channels[i++] = {"f_dc_" + std::to_string(k), ChannelGroup::SHBase};
    for (int k = 0; k < 45; ++k)
        s.channels[i++] = {"f_rest_" + std::to_string(k), ChannelGroup::SHAdv};
    s.channels[i++] = {"opacity", ChannelGroup::Opacity};
    for (int k = 0; k < 3; ++k)
        s.channels[i++] = {"scale_" + std::to_string(k), ChannelGroup::Scale};
    for (int k = 0; k < 4; ++k)
        s.channels[i++] = {"rot_" + std::to_string(k), ChannelGroup::Rotation};
    return s;
}

}  // namespace

const ChannelSchema& ChannelSchema::canonical() {
    static const ChannelSchema s = build_canonical();
    return s;
}

std::size_t ChannelSchema::group_width(ChannelGroup g) const {
    std::size_t n = 0;
    for (const auto& c : channels)
        if (c.group == g) ++n;
    return n;
}

const char* channel_group_name(ChannelGroup g) {
    switch (g) {
        case ChannelGroup::Position: return "position";
        case ChannelGroup::SHBase: return "sh_base";
        case ChannelGroup::SHAdv: return "sh_adv";
        case ChannelGroup::Opacity: return "opacity";
        case ChannelGroup::Scale: return "scale";
        case ChannelGroup::Rotation: return "rotation";
    }
    return "?";
}

ChannelGroup channel_group_of(std::size_t channel) {
    if (channel < kShBaseBegin) return ChannelGroup::Position;
    if (channel < kShAdvBegin) return ChannelGroup::SHBase;
    if (channel < kOpacityChannel) return ChannelGroup::SHAdv;
    if (channel == kOpacityChannel) return ChannelGroup::Opacity;
    if (channel < kRotationBegin) return ChannelGroup::Scale;
    return ChannelGroup::Rotation;
}

bool is_sh_adv_channel(std::size_t channel) {
    return channel >= kShAdvBegin && channel < kShAdvBegin + kShAdvCount;
}

std::vector<Violation> validate(const GaussianModel& model) {
    std::vector<Violation> out;
    for (std::size_t r = 0; r < model.rows; ++r) {
        const float* row = model.row(r);
        for (std::size_t c = 0; c < kChannelCount; ++c) {
            if (!std::isfinite(row[c])) {
                out.push_back({r, c, "non-finite value"});
                break;
            }
        }
        double qn = 0.0;
        for (std::size_t c = kRotationBegin; c < kRotationBegin + 4; ++c)
            qn += static_cast<double>(row[c]) * row[c];
        if (!(qn > 0.0) || !std::isfinite(qn))
            out.push_back({r, kRotationBegin, "non-normalizable rotation"});
        double a = activate_opacity(row[kOpacityChannel]);
        if (!(a >= 0.0 && a <= 1.0))
            out.push_back({r, kOpacityChannel, "activated opacity outside [0,1]"});
        for (std::size_t c = kScaleBegin; c < kScaleBegin + 3; ++c) {
            if (!(activate_scale(row[c]) > 0.0)) {
                out.push_back({r, c, "activated scale not positive"});
                break;
            }
        }
    }
    return out;
}

GaussianModel deep_copy(const GaussianModel& model) { return model; }

uint64_t model_checksum(const GaussianModel& model) {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    uint64_t rows = model.rows;
    mix(&rows, sizeof rows);
    mix(model.data.data(), model.data.size() * sizeof(float));
    mix(model.sh_mask.data(), model.sh_mask.size());
    return h;
}

uint64_t model_byte_size(const GaussianModel& model) {
    uint64_t bytes = ply_header_size(model.rows);
    for (std::size_t r = 0; r < model.rows; ++r)
        bytes += 4ULL * (model.masked(r) ? kNonShAdvCount : kChannelCount);
    return bytes;
}

}  // namespace flexgs
