#include "flexgs/importance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "flexgs/ply_io.hpp"
#include "flexgs/renderer.hpp"

namespace flexgs {

double volume_weight(double volume, double cap, double exponent) {
    if (!(cap > 0.0)) throw std::invalid_argument("volume_weight: cap must be positive");
    double v = std::min(volume, cap);
    return std::pow(v / cap, exponent);
}

ImportanceScores compute_scores(const GaussianModel& model, const std::vector<Camera>& cameras,
                                const ImportanceParams& params) {
    if (cameras.empty()) throw std::invalid_argument("compute_scores: no cameras");

    RenderStats stats;
    for (const auto& cam : cameras) render(model, cam, &stats);

    ImportanceScores out;
    out.score.assign(model.rows, 0.0);
    out.rank.resize(model.rows);
    std::iota(out.rank.begin(), out.rank.end(), 0u);
    if (model.rows == 0) return out;

    std::vector<double> volumes(model.rows);
    for (std::size_t i = 0; i < model.rows; ++i) {
        const float* row = model.row(i);
        volumes[i] = activate_scale(row[kScaleBegin]) * activate_scale(row[kScaleBegin + 1]) *
                     activate_scale(row[kScaleBegin + 2]);
    }
    // Cap at the given percentile of activated volumes (nearest-rank on the
    // ascending order).
    std::vector<double> sorted = volumes;
    std::sort(sorted.begin(), sorted.end());
    std::size_t idx = std::min(model.rows - 1,
                               std::size_t(params.cap_percentile * double(model.rows)));
    out.volume_cap = sorted[idx];

    for (std::size_t i = 0; i < model.rows; ++i) {
        double sigma = activate_opacity(model.row(i)[kOpacityChannel]);
        double gamma = out.volume_cap > 0.0
                           ? volume_weight(volumes[i], out.volume_cap, params.exponent)
                           : 0.0;
        out.score[i] = double(stats.hits[i]) * sigma * gamma;
    }

    std::stable_sort(out.rank.begin(), out.rank.end(), [&](uint32_t a, uint32_t b) {
        if (out.score[a] != out.score[b]) return out.score[a] > out.score[b];
        return a < b;
    });
    return out;
}

void export_scores(const ImportanceScores& scores, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    for (double s : scores.score) {
        float f = float(s);
        out.write(reinterpret_cast<const char*>(&f), sizeof f);
    }
    if (!out) throw FormatError("short write to " + path.string());
}

}  // namespace flexgs
