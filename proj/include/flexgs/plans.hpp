#pragma once

// Tunable compression knobs: row pruning fractions and per-channel
// quantization bit-widths. These are the coordinates the search moves in.

#include <array>
#include <cstdint>
#include <string>

#include "flexgs/model.hpp"

namespace flexgs {

struct PruningPlan {
    // Fractions of rows by descending importance: the top ceil(alpha*N) rows
    // keep everything, the bottom floor(beta*N) are removed, the band in
    // between keeps everything except the high-order SH block.
    double alpha = 1.0;
    double beta = 0.0;

    bool operator==(const PruningPlan&) const = default;
};

struct QuantizationPlan {
    std::array<uint8_t, kChannelCount> bitwidths{};
    uint32_t group_count = 1000;
    // Loss gap (dB) under which a channel group is considered insensitive
    // enough for 4-bit storage.
    float int4_threshold_db = 0.25f;

    bool operator==(const QuantizationPlan&) const = default;
};

// Default widths: 8 bits for geometry-critical groups (position, scale,
// rotation, opacity), 4 bits for both SH blocks.
QuantizationPlan default_quantization_plan();
QuantizationPlan uniform_quantization_plan(int bits);

struct CompressionPlan {
    PruningPlan prune;
    QuantizationPlan quant;

    bool operator==(const CompressionPlan&) const = default;
};

// Short human-readable summary of the bit-width assignment, e.g.
// "pos8-shb4-sha4-op8-scl8-rot8". Used in sweep output.
std::string bitwidth_profile(const QuantizationPlan& plan);

std::string quantization_plan_to_json(const QuantizationPlan& plan);
QuantizationPlan quantization_plan_from_json(const std::string& text);

}  // namespace flexgs
