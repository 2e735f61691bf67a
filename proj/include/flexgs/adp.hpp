#pragma once

// Attribute-wise pruning: rows ordered by descending importance are split
// into three bands. The top band keeps every attribute, the middle band
// drops only the 45 high-order SH coefficients (mask bit; values zeroed at
// serialization), the bottom band is removed outright.

#include <cstdint>
#include <vector>

#include "flexgs/importance.hpp"
#include "flexgs/model.hpp"
#include "flexgs/plans.hpp"

namespace flexgs {

struct PruneBands {
    std::size_t full = 0;
    std::size_t sh_masked = 0;
    std::size_t removed = 0;
};

// Band sizes for N rows under a plan: full = ceil(alpha*N),
// removed = floor(beta*N), masked = remainder.
PruneBands prune_bands(std::size_t rows, const PruningPlan& plan);

// Returns a new model whose rows are ordered by descending importance with
// band assignment applied. The input is not modified. Requires
// scores.rank to cover exactly model.rows rows and 0 <= beta, alpha <= 1,
// alpha + beta <= 1.
GaussianModel apply_pruning(const GaussianModel& model, const ImportanceScores& scores,
                            const PruningPlan& plan);

// Baselines: remove the bottom `ratio` fraction of rows outright (no
// masking), or mask the bottom `ratio` fraction (no removal).
PruningPlan row_prune_plan(double ratio);
PruningPlan sh_prune_plan(double ratio);

// One grid point of the pruning design space.
struct PruneCandidate {
    double row_fraction = 0.0;  // removed outright (beta)
    double sh_fraction = 0.0;   // fraction of the remaining rows SH-masked

    PruningPlan to_plan() const {
        return {(1.0 - row_fraction) * (1.0 - sh_fraction), row_fraction};
    }
};

// Default grid: row fractions {0,0.1,...,0.5} x SH fractions {0,0.25,...,1}.
std::vector<PruneCandidate> default_candidate_grid();

// Orders grid points into a search path: estimates the serialized size of
// each candidate under `quant`, drops points dominated in the
// (size, retained-score) tradeoff, and sorts by size descending (ties
// toward larger alpha). The first entry is the quality-most candidate.
std::vector<PruningPlan> candidate_frontier(const std::vector<PruneCandidate>& grid,
                                            std::size_t rows, const ImportanceScores& scores,
                                            const QuantizationPlan& quant);

// Serialized size estimate used for frontier ordering (same formula as the
// container writer).
uint64_t estimated_plan_bytes(std::size_t rows, const PruningPlan& prune,
                              const QuantizationPlan& quant);

}  // namespace flexgs
