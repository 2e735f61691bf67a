#pragma once

// Constraint-driven search over the ordered pruning path. Candidates are
// sorted from largest (best quality) to smallest serialized size; the walk
// starts at the midpoint and steps toward smaller sizes while the
// constraint holds, or back toward quality while it does not, stopping at
// the boundary candidate. Quality drops are measured against the first
// (largest) candidate on the path, rendered once as the reference point.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "flexgs/adp.hpp"
#include "flexgs/camera.hpp"
#include "flexgs/importance.hpp"
#include "flexgs/model.hpp"
#include "flexgs/mpq.hpp"
#include "flexgs/plans.hpp"

namespace flexgs {

struct Constraint {
    enum class Kind {
        MaxPsnrDropDb,       // candidate's drop vs the quality-most candidate
        MaxCompressedBytes,  // serialized size budget
        MinCompressionRatio, // original bytes / serialized bytes
    };
    Kind kind = Kind::MaxPsnrDropDb;
    double value = 1.0;
};

struct SearchStep {
    std::size_t candidate = 0;   // index into the path
    double psnr_drop_db = 0.0;
    uint64_t bytes = 0;
    double seconds = 0.0;
};

struct SearchOutcome {
    bool feasible = false;
    std::size_t chosen = 0;      // boundary candidate, or best effort when infeasible
    std::vector<SearchStep> steps;  // every evaluation, in evaluation order
};

// Evaluator for one path index: returns (psnr drop dB, serialized bytes).
using PathEvaluator = std::function<std::pair<double, uint64_t>(std::size_t)>;

// Generic walk; each index is evaluated at most once. input_bytes is only
// used to translate ratio constraints into byte budgets.
SearchOutcome search_path(std::size_t count, const PathEvaluator& eval,
                          const Constraint& constraint, uint64_t input_bytes);

struct CandidateEvaluation {
    double psnr_db = 0.0;
    double ssim = 0.0;
    uint64_t bytes = 0;
};

// Full pipeline for one candidate: prune, quantize, reconstruct, render,
// compare against the reference views. The input model is untouched.
CandidateEvaluation evaluate_candidate(const GaussianModel& model,
                                       const ImportanceScores& scores,
                                       const CompressionPlan& plan,
                                       const std::vector<Camera>& eval_cameras,
                                       const std::vector<ImageBuffer>& reference_views);

struct CompressOptions {
    QuantizationPlan quant = default_quantization_plan();
    std::vector<PruneCandidate> grid = default_candidate_grid();
    bool joint_bitwidths = false;     // add uniform INT8/INT4 ends to the path
    bool probe_sensitivity = false;   // derive bit-widths from a probe run
    std::size_t eval_views = 32;      // first N cameras form the eval set
    // Cameras used for importance scoring; eval cameras are reused when empty.
    std::vector<Camera> scoring_cameras;
};

struct TimeBreakdown {
    double scoring_s = 0.0;
    double adaptation_s = 0.0;
    double storage_s = 0.0;
};

struct CompressReport {
    bool feasible = false;
    std::size_t chosen = 0;
    CompressionPlan chosen_plan;
    double psnr_drop_db = 0.0;   // of the chosen candidate
    double ssim = 0.0;
    double reference_psnr_db = 0.0;
    uint64_t input_bytes = 0;
    uint64_t output_bytes = 0;
    std::vector<CompressionPlan> path;
    SearchOutcome search;
    TimeBreakdown times;
};

// End-to-end compression: scores rows, builds the candidate path, searches
// for the boundary candidate, and writes it to output_path. The input model
// is not modified. Always writes a container, even when the constraint is
// infeasible (feasible=false in the report).
CompressReport compress(const GaussianModel& model, const std::vector<Camera>& cameras,
                        const Constraint& constraint, const CompressOptions& options,
                        const std::filesystem::path& output_path);

// JSON-lines trace: one line per evaluation plus a final summary line.
void write_trace(const CompressReport& report, const std::filesystem::path& path);

}  // namespace flexgs
