#include "flexgs/plans.hpp"

#include <json.hpp>

#include "flexgs/ply_io.hpp"

namespace flexgs {

QuantizationPlan default_quantization_plan() {
    QuantizationPlan p;
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        ChannelGroup g = channel_group_of(c);
        bool sh = (g == ChannelGroup::SHBase || g == ChannelGroup::SHAdv);
        p.bitwidths[c] = sh ? 4 : 8;
    }
    return p;
}

QuantizationPlan uniform_quantization_plan(int bits) {
    QuantizationPlan p;
    p.bitwidths.fill(static_cast<uint8_t>(bits));
    return p;
}

std::string bitwidth_profile(const QuantizationPlan& plan) {
    auto width_of = [&plan](std::size_t channel) { return int(plan.bitwidths[channel]); };
    std::string s;
    s += "pos" + std::to_string(width_of(kPositionBegin));
    s += "-shb" + std::to_string(width_of(kShBaseBegin));
    s += "-sha" + std::to_string(width_of(kShAdvBegin));
    s += "-op" + std::to_string(width_of(kOpacityChannel));
    s += "-scl" + std::to_string(width_of(kScaleBegin));
    s += "-rot" + std::to_string(width_of(kRotationBegin));
    return s;
}

std::string quantization_plan_to_json(const QuantizationPlan& plan) {
    nlohmann::json j;
    j["bitwidths"] = plan.bitwidths;
    j["group_count"] = plan.group_count;
    j["int4_threshold_db"] = plan.int4_threshold_db;
    return j.dump(2);
}

QuantizationPlan quantization_plan_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad quantization plan json: ") + e.what());
    }
    QuantizationPlan p = default_quantization_plan();
    if (j.contains("bitwidths")) {
        const auto& bw = j.at("bitwidths");
        if (!bw.is_array() || bw.size() != kChannelCount)
            throw FormatError("quantization plan: bitwidths must be an array of 59 integers");
        for (std::size_t c = 0; c < kChannelCount; ++c) {
            int b = bw[c].get<int>();
            if (b != 4 && b != 8)
                throw FormatError("quantization plan: bit-width must be 4 or 8");
            p.bitwidths[c] = static_cast<uint8_t>(b);
        }
    }
    if (j.contains("group_count")) {
        p.group_count = j.at("group_count").get<uint32_t>();
        if (p.group_count == 0) throw FormatError("quantization plan: group_count must be >= 1");
    }
    if (j.contains("int4_threshold_db"))
        p.int4_threshold_db = j.at("int4_threshold_db").get<float>();
    return p;
}

}  // namespace flexgs
