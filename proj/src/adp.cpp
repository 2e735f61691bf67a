#include "flexgs/adp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "flexgs/fgc.hpp"

namespace flexgs {

namespace {
// A masked row keeps most of its visual contribution (base color, geometry,
// opacity survive); weight of its score in the retained-quality proxy.
constexpr double kMaskedScoreWeight = 0.7;
}  // namespace

PruneBands prune_bands(std::size_t rows, const PruningPlan& plan) {
    if (!(plan.alpha >= 0.0 && plan.alpha <= 1.0) || !(plan.beta >= 0.0 && plan.beta <= 1.0) ||
        plan.alpha + plan.beta > 1.0 + 1e-12)
        throw std::invalid_argument("pruning plan: need 0 <= alpha, beta and alpha + beta <= 1");
    PruneBands b;
    b.full = std::size_t(std::ceil(plan.alpha * double(rows) - 1e-9));
    b.removed = std::size_t(std::floor(plan.beta * double(rows) + 1e-9));
    b.full = std::min(b.full, rows);
    b.removed = std::min(b.removed, rows - b.full);
    b.sh_masked = rows - b.full - b.removed;
    return b;
}

GaussianModel apply_pruning(const GaussianModel& model, const ImportanceScores& scores,
                            const PruningPlan& plan) {
    if (scores.rank.size() != model.rows)
        throw std::invalid_argument("apply_pruning: score/model row count mismatch");
    PruneBands bands = prune_bands(model.rows, plan);

    GaussianModel out;
    out.resize(bands.full + bands.sh_masked);
    for (std::size_t i = 0; i < out.rows; ++i) {
        std::size_t src = scores.rank[i];
        std::memcpy(out.row(i), model.row(src), kChannelCount * sizeof(float));
        bool src_masked = model.masked(src);
        out.sh_mask[i] = (i >= bands.full || src_masked) ? 1 : 0;
    }
    return out;
}

PruningPlan row_prune_plan(double ratio) { return {1.0 - ratio, ratio}; }

PruningPlan sh_prune_plan(double ratio) { return {1.0 - ratio, 0.0}; }

std::vector<PruneCandidate> default_candidate_grid() {
    std::vector<PruneCandidate> grid;
    for (double row : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5})
        for (double sh : {0.0, 0.25, 0.5, 0.75, 1.0}) grid.push_back({row, sh});
    return grid;
}

uint64_t estimated_plan_bytes(std::size_t rows, const PruningPlan& prune,
                              const QuantizationPlan& quant) {
    PruneBands bands = prune_bands(rows, prune);
    CompressionPlan plan{prune, quant};
    return estimate_compressed_size(bands.full, bands.sh_masked, plan);
}

std::vector<PruningPlan> candidate_frontier(const std::vector<PruneCandidate>& grid,
                                            std::size_t rows, const ImportanceScores& scores,
                                            const QuantizationPlan& quant) {
    if (scores.score.size() != rows)
        throw std::invalid_argument("candidate_frontier: score/row count mismatch");

    // Prefix sums over scores in rank order give each candidate's retained
    // score mass in O(1).
    std::vector<double> prefix(rows + 1, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        prefix[i + 1] = prefix[i] + scores.score[scores.rank[i]];

    struct Entry {
        PruningPlan plan;
        uint64_t bytes;
        double proxy;
    };
    std::vector<Entry> entries;
    entries.reserve(grid.size());
    for (const auto& cand : grid) {
        PruningPlan plan = cand.to_plan();
        PruneBands bands = prune_bands(rows, plan);
        double kept_full = prefix[bands.full];
        double kept_masked = prefix[bands.full + bands.sh_masked] - prefix[bands.full];
        entries.push_back(
            {plan, estimated_plan_bytes(rows, plan, quant), kept_full + kMaskedScoreWeight * kept_masked});
    }

    // Drop points dominated in the (size, proxy) tradeoff.
    std::vector<Entry> kept;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < entries.size() && !dominated; ++j) {
            if (i == j) continue;
            bool no_worse = entries[j].bytes <= entries[i].bytes &&
                            entries[j].proxy >= entries[i].proxy;
            bool better = entries[j].bytes < entries[i].bytes ||
                          entries[j].proxy > entries[i].proxy;
            dominated = no_worse && better;
        }
        if (!dominated) kept.push_back(entries[i]);
    }

    std::stable_sort(kept.begin(), kept.end(), [](const Entry& a, const Entry& b) {
        if (a.bytes != b.bytes) return a.bytes > b.bytes;
        return a.plan.alpha > b.plan.alpha;
    });

    std::vector<PruningPlan> path;
    path.reserve(kept.size());
    for (const auto& e : kept) {
        if (!path.empty() && path.back() == e.plan) continue;  // dedupe grid collisions
        path.push_back(e.plan);
    }
    return path;
}

}  // namespace flexgs
