#pragma once

// Mixed-precision grouped quantization. Each channel is cut into contiguous
// row groups; every group stores its own (min, max) range and codes each
// value with round-to-nearest (halves away from zero) at 4 or 8 bits.
// Sensitivity probing measures, per semantic channel group, how much
// quality drops when only that group goes to 4 bits.

#include <array>
#include <cstdint>
#include <vector>

#include "flexgs/camera.hpp"
#include "flexgs/model.hpp"
#include "flexgs/plans.hpp"

namespace flexgs {

// Group geometry: size = ceil(rows / group_count), count = ceil(rows / size).
std::size_t quant_group_size(std::size_t rows, uint32_t group_count);
std::size_t quant_group_count(std::size_t rows, uint32_t group_count);

struct GroupRange {
    float min = 0.0f;
    float max = 0.0f;
};

struct QuantizedChannel {
    std::vector<GroupRange> groups;
    std::vector<uint8_t> codes;  // one per row; values < 2^bitwidth
};

// Quantizes n strided values (data[0], data[stride], ...). A group whose
// range is empty (min == max) codes everything as 0 and decodes to min.
QuantizedChannel quantize_channel(const float* data, std::size_t stride, std::size_t n,
                                  int bitwidth, uint32_t group_count);

// Reconstructs into out[0], out[stride], ... Exact inverse of the group
// arithmetic: min + code * (max - min) / (2^bitwidth - 1), evaluated in
// double and rounded once to float.
void dequantize_channel(const QuantizedChannel& qc, std::size_t n, int bitwidth,
                        uint32_t group_count, float* out, std::size_t stride);

// Rows are stored as two segments: intact rows first, then SH-masked rows
// (which carry only the 14 non-SH_adv channels). Each segment restarts
// group numbering.
struct QuantizedSegment {
    std::size_t rows = 0;
    // Indexed by channel; SH_adv entries stay empty in the masked segment.
    std::array<QuantizedChannel, kChannelCount> channels;
};

struct QuantizedModel {
    CompressionPlan plan;
    QuantizedSegment full;
    QuantizedSegment sh_pruned;

    std::size_t total_rows() const { return full.rows + sh_pruned.rows; }
};

// Quantizes a model whose unmasked rows all precede its masked rows (the
// order apply_pruning produces). Throws std::invalid_argument otherwise.
QuantizedModel apply_quantization(const GaussianModel& model, const QuantizationPlan& plan);

// Reconstructs a model: full rows with every channel, masked rows with
// zeroed SH_adv and the mask bit set. Bit-exact regardless of whether the
// quantized form came from memory or from a container file.
GaussianModel dequantize_model(const QuantizedModel& qm);

// Mean PSNR gap (dB) versus the all-8-bit configuration when only the
// channels in `subset` drop to 4 bits. One entry per subset.
struct SensitivityProbe {
    double all_int8_psnr_db = 0.0;
    std::vector<double> gap_db;
};

SensitivityProbe probe_subsets(const GaussianModel& model, const std::vector<Camera>& cameras,
                               const std::vector<ImageBuffer>& reference_views,
                               const std::vector<std::vector<std::size_t>>& subsets,
                               uint32_t group_count);

// The six semantic channel groups, each as a channel index list, in
// ChannelGroup order.
std::vector<std::vector<std::size_t>> semantic_channel_subsets();

// Probes the six semantic groups and assigns 4 bits to groups whose gap is
// within threshold_db, 8 bits to the rest.
struct SensitivityReport {
    double all_int8_psnr_db = 0.0;
    std::array<double, kChannelGroupCount> group_gap_db{};
};

SensitivityReport probe_channel_sensitivity(const GaussianModel& model,
                                            const std::vector<Camera>& cameras,
                                            const std::vector<ImageBuffer>& reference_views,
                                            uint32_t group_count);

QuantizationPlan assign_bitwidths(const SensitivityReport& report, float threshold_db,
                                  uint32_t group_count);

}  // namespace flexgs
