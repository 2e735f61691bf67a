#include "flexgs/mpq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flexgs/metrics.hpp"
#include "flexgs/renderer.hpp"

namespace flexgs {

std::size_t quant_group_size(std::size_t rows, uint32_t group_count) {
    if (group_count == 0) throw std::invalid_argument("group_count must be >= 1");
    if (rows == 0) return 0;
    return (rows + group_count - 1) / group_count;
}

std::size_t quant_group_count(std::size_t rows, uint32_t group_count) {
    std::size_t size = quant_group_size(rows, group_count);
    return size == 0 ? 0 : (rows + size - 1) / size;
}

QuantizedChannel quantize_channel(const float* data, std::size_t stride, std::size_t n,
                                  int bitwidth, uint32_t group_count) {
    if (bitwidth != 4 && bitwidth != 8)
        throw std::invalid_argument("bitwidth must be 4 or 8");
    QuantizedChannel qc;
    if (n == 0) return qc;
    const std::size_t gsize = quant_group_size(n, group_count);
    const double levels = double((1 << bitwidth) - 1);
    qc.groups.reserve(quant_group_count(n, group_count));
    qc.codes.resize(n);

    for (std::size_t begin = 0; begin < n; begin += gsize) {
        const std::size_t end = std::min(n, begin + gsize);
        float lo = data[begin * stride], hi = lo;
        for (std::size_t i = begin + 1; i < end; ++i) {
            float v = data[i * stride];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        qc.groups.push_back({lo, hi});
        if (lo == hi) {
            for (std::size_t i = begin; i < end; ++i) qc.codes[i] = 0;
            continue;
        }
        const double range = double(hi) - double(lo);
        for (std::size_t i = begin; i < end; ++i) {
            double t = (double(data[i * stride]) - double(lo)) * levels / range;
            long code = std::lround(t);  // halves round away from zero
            code = std::clamp(code, 0L, long(levels));
            qc.codes[i] = uint8_t(code);
        }
    }
    return qc;
}

void dequantize_channel(const QuantizedChannel& qc, std::size_t n, int bitwidth,
                        uint32_t group_count, float* out, std::size_t stride) {
    if (n == 0) return;
    const std::size_t gsize = quant_group_size(n, group_count);
    const double levels = double((1 << bitwidth) - 1);
    if (qc.codes.size() != n || qc.groups.size() != quant_group_count(n, group_count))
        throw std::invalid_argument("dequantize_channel: shape mismatch");
    for (std::size_t begin = 0, g = 0; begin < n; begin += gsize, ++g) {
        const std::size_t end = std::min(n, begin + gsize);
        const GroupRange r = qc.groups[g];
        const double step = (double(r.max) - double(r.min)) / levels;
        for (std::size_t i = begin; i < end; ++i)
            out[i * stride] = float(double(r.min) + double(qc.codes[i]) * step);
    }
}

namespace {

QuantizedSegment quantize_segment(const GaussianModel& model, std::size_t row_begin,
                                  std::size_t row_end, bool sh_pruned,
                                  const QuantizationPlan& plan) {
    QuantizedSegment seg;
    seg.rows = row_end - row_begin;
    if (seg.rows == 0) return seg;
    const float* base = model.row(row_begin);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        if (sh_pruned && is_sh_adv_channel(c)) continue;
        seg.channels[c] = quantize_channel(base + c, kChannelCount, seg.rows,
                                           plan.bitwidths[c], plan.group_count);
    }
    return seg;
}

void dequantize_segment(const QuantizedSegment& seg, bool sh_pruned,
                        const CompressionPlan& plan, GaussianModel& out,
                        std::size_t row_begin) {
    if (seg.rows == 0) return;
    float* base = out.row(row_begin);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        if (sh_pruned && is_sh_adv_channel(c)) continue;  // stays zero
        dequantize_channel(seg.channels[c], seg.rows, plan.quant.bitwidths[c],
                           plan.quant.group_count, base + c, kChannelCount);
    }
}

}  // namespace

QuantizedModel apply_quantization(const GaussianModel& model, const QuantizationPlan& plan) {
    std::size_t n_full = 0;
    while (n_full < model.rows && !model.masked(n_full)) ++n_full;
    for (std::size_t r = n_full; r < model.rows; ++r)
        if (!model.masked(r))
            throw std::invalid_argument(
                "apply_quantization: masked rows must form a suffix (run pruning first)");

    QuantizedModel qm;
    qm.plan.quant = plan;
    qm.full = quantize_segment(model, 0, n_full, false, plan);
    qm.sh_pruned = quantize_segment(model, n_full, model.rows, true, plan);
    return qm;
}

GaussianModel dequantize_model(const QuantizedModel& qm) {
    GaussianModel out;
    out.resize(qm.total_rows());
    dequantize_segment(qm.full, false, qm.plan, out, 0);
    dequantize_segment(qm.sh_pruned, true, qm.plan, out, qm.full.rows);
    for (std::size_t r = qm.full.rows; r < out.rows; ++r) out.sh_mask[r] = 1;
    return out;
}

std::vector<std::vector<std::size_t>> semantic_channel_subsets() {
    std::vector<std::vector<std::size_t>> subsets(kChannelGroupCount);
    for (std::size_t c = 0; c < kChannelCount; ++c)
        subsets[std::size_t(channel_group_of(c))].push_back(c);
    return subsets;
}

SensitivityProbe probe_subsets(const GaussianModel& model, const std::vector<Camera>& cameras,
                               const std::vector<ImageBuffer>& reference_views,
                               const std::vector<std::vector<std::size_t>>& subsets,
                               uint32_t group_count) {
    QuantizationPlan int8 = uniform_quantization_plan(8);
    int8.group_count = group_count;

    // Reconstruct every channel at both widths once; probe configurations
    // are assembled by column swaps.
    GaussianModel deq8 = dequantize_model(apply_quantization(model, int8));
    QuantizationPlan int4 = uniform_quantization_plan(4);
    int4.group_count = group_count;
    GaussianModel deq4 = dequantize_model(apply_quantization(model, int4));

    SensitivityProbe probe;
    probe.all_int8_psnr_db = mean_quality_vs(reference_views, deq8, cameras).psnr_db;

    GaussianModel work = deq8;
    for (const auto& subset : subsets) {
        for (std::size_t c : subset)
            for (std::size_t r = 0; r < work.rows; ++r) work.at(r, c) = deq4.at(r, c);
        double psnr_db = mean_quality_vs(reference_views, work, cameras).psnr_db;
        probe.gap_db.push_back(probe.all_int8_psnr_db - psnr_db);
        for (std::size_t c : subset)
            for (std::size_t r = 0; r < work.rows; ++r) work.at(r, c) = deq8.at(r, c);
    }
    return probe;
}

SensitivityReport probe_channel_sensitivity(const GaussianModel& model,
                                            const std::vector<Camera>& cameras,
                                            const std::vector<ImageBuffer>& reference_views,
                                            uint32_t group_count) {
    SensitivityProbe probe =
        probe_subsets(model, cameras, reference_views, semantic_channel_subsets(), group_count);
    SensitivityReport report;
    report.all_int8_psnr_db = probe.all_int8_psnr_db;
    for (std::size_t g = 0; g < kChannelGroupCount; ++g) report.group_gap_db[g] = probe.gap_db[g];
    return report;
}

QuantizationPlan assign_bitwidths(const SensitivityReport& report, float threshold_db,
                                  uint32_t group_count) {
    QuantizationPlan plan;
    plan.group_count = group_count;
    plan.int4_threshold_db = threshold_db;
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        double gap = report.group_gap_db[std::size_t(channel_group_of(c))];
        plan.bitwidths[c] = gap <= threshold_db ? 4 : 8;
    }
    return plan;
}

}  // namespace flexgs
