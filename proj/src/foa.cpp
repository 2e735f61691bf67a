#include "flexgs/foa.hpp"

#include <chrono>
#include <fstream>
#include <json.hpp>
#include <map>
#include <stdexcept>

#include "flexgs/fgc.hpp"
#include "flexgs/metrics.hpp"
#include "flexgs/ply_io.hpp"
#include "flexgs/renderer.hpp"

namespace flexgs {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

bool satisfies(const Constraint& c, double drop_db, uint64_t bytes, uint64_t input_bytes) {
    switch (c.kind) {
        case Constraint::Kind::MaxPsnrDropDb:
            return drop_db <= c.value;
        case Constraint::Kind::MaxCompressedBytes:
            return double(bytes) <= c.value;
        case Constraint::Kind::MinCompressionRatio:
            return double(input_bytes) / double(bytes) >= c.value;
    }
    return false;
}

}  // namespace

SearchOutcome search_path(std::size_t count, const PathEvaluator& eval,
                          const Constraint& constraint, uint64_t input_bytes) {
    if (count == 0) throw std::invalid_argument("search_path: empty candidate path");

    SearchOutcome out;
    std::map<std::size_t, bool> feasible_at;
    auto visit = [&](std::size_t i) {
        auto it = feasible_at.find(i);
        if (it != feasible_at.end()) return it->second;
        double t0 = now_seconds();
        auto [drop, bytes] = eval(i);
        bool ok = satisfies(constraint, drop, bytes, input_bytes);
        out.steps.push_back({i, drop, bytes, now_seconds() - t0});
        feasible_at.emplace(i, ok);
        return ok;
    };

    // Under a quality budget the feasible region is the large-size prefix and
    // the goal is its last (smallest) candidate; under a size budget the
    // feasible region is the small-size suffix and the goal is its first
    // (highest-quality) candidate.
    const bool quality_budget = constraint.kind == Constraint::Kind::MaxPsnrDropDb;
    const std::size_t mid = count / 2;

    if (visit(mid)) {
        // Feasible at the midpoint: advance deeper into the feasible region
        // and stop just before it ends.
        std::size_t i = mid;
        while (true) {
            if (quality_budget ? i + 1 >= count : i == 0) {
                out.chosen = i;
                break;
            }
            std::size_t next = quality_budget ? i + 1 : i - 1;
            if (!visit(next)) {
                out.chosen = i;
                break;
            }
            i = next;
        }
        out.feasible = true;
        return out;
    }

    // Infeasible at the midpoint: back toward the feasible region; the first
    // feasible candidate met is the boundary.
    std::size_t i = mid;
    while (true) {
        if (quality_budget ? i == 0 : i + 1 >= count) {
            out.feasible = false;
            out.chosen = quality_budget ? 0 : count - 1;  // best effort
            return out;
        }
        i = quality_budget ? i - 1 : i + 1;
        if (visit(i)) {
            out.feasible = true;
            out.chosen = i;
            return out;
        }
    }
}

CandidateEvaluation evaluate_candidate(const GaussianModel& model,
                                       const ImportanceScores& scores,
                                       const CompressionPlan& plan,
                                       const std::vector<Camera>& eval_cameras,
                                       const std::vector<ImageBuffer>& reference_views) {
    GaussianModel pruned = apply_pruning(model, scores, plan.prune);
    QuantizedModel qm = apply_quantization(pruned, plan.quant);
    qm.plan.prune = plan.prune;
    CandidateEvaluation ev;
    ev.bytes = estimate_compressed_size(qm.full.rows, qm.sh_pruned.rows, qm.plan);
    GaussianModel deq = dequantize_model(qm);
    QualityReport q = mean_quality_vs(reference_views, deq, eval_cameras);
    ev.psnr_db = q.psnr_db;
    ev.ssim = q.ssim;
    return ev;
}

CompressReport compress(const GaussianModel& model, const std::vector<Camera>& cameras,
                        const Constraint& constraint, const CompressOptions& options,
                        const std::filesystem::path& output_path) {
    if (cameras.empty()) throw std::invalid_argument("compress: need at least one camera");

    CompressReport report;
    report.input_bytes = model_byte_size(model);

    double t0 = now_seconds();
    const std::vector<Camera>& scoring_cams =
        options.scoring_cameras.empty() ? cameras : options.scoring_cameras;
    ImportanceScores scores = compute_scores(model, scoring_cams);
    report.times.scoring_s = now_seconds() - t0;

    t0 = now_seconds();
    std::vector<Camera> eval_cams(
        cameras.begin(),
        cameras.begin() + std::ptrdiff_t(std::min(options.eval_views, cameras.size())));
    std::vector<ImageBuffer> reference_views;
    reference_views.reserve(eval_cams.size());
    for (const auto& cam : eval_cams) reference_views.push_back(render(model, cam));

    QuantizationPlan quant = options.quant;
    if (options.probe_sensitivity) {
        SensitivityReport sens =
            probe_channel_sensitivity(model, eval_cams, reference_views, quant.group_count);
        quant = assign_bitwidths(sens, quant.int4_threshold_db, quant.group_count);
    }

    std::vector<PruningPlan> prune_path =
        candidate_frontier(options.grid, model.rows, scores, quant);
    for (const auto& p : prune_path) report.path.push_back({p, quant});
    if (options.joint_bitwidths) {
        QuantizationPlan int8 = uniform_quantization_plan(8);
        int8.group_count = quant.group_count;
        QuantizationPlan int4 = uniform_quantization_plan(4);
        int4.group_count = quant.group_count;
        report.path.insert(report.path.begin(), {prune_path.front(), int8});
        report.path.push_back({prune_path.back(), int4});
    }

    // The first (largest) candidate anchors the drop scale; evaluate it once.
    std::map<std::size_t, CandidateEvaluation> cache;
    auto eval_at = [&](std::size_t i) -> const CandidateEvaluation& {
        auto it = cache.find(i);
        if (it == cache.end()) {
            it = cache.emplace(i, evaluate_candidate(model, scores, report.path[i], eval_cams,
                                                     reference_views))
                     .first;
        }
        return it->second;
    };
    report.reference_psnr_db = eval_at(0).psnr_db;

    report.search = search_path(
        report.path.size(),
        [&](std::size_t i) -> std::pair<double, uint64_t> {
            const CandidateEvaluation& ev = eval_at(i);
            return {report.reference_psnr_db - ev.psnr_db, ev.bytes};
        },
        constraint, report.input_bytes);
    report.feasible = report.search.feasible;
    report.chosen = report.search.chosen;
    report.chosen_plan = report.path[report.chosen];
    const CandidateEvaluation& chosen_ev = eval_at(report.chosen);
    report.psnr_drop_db = report.reference_psnr_db - chosen_ev.psnr_db;
    report.ssim = chosen_ev.ssim;
    report.times.adaptation_s = now_seconds() - t0;

    t0 = now_seconds();
    GaussianModel pruned = apply_pruning(model, scores, report.chosen_plan.prune);
    QuantizedModel qm = apply_quantization(pruned, report.chosen_plan.quant);
    qm.plan.prune = report.chosen_plan.prune;
    report.output_bytes = write_fgc(qm, output_path);
    if (report.output_bytes != chosen_ev.bytes)
        throw std::logic_error("compress: written size diverged from the search estimate");
    report.times.storage_s = now_seconds() - t0;
    return report;
}

void write_trace(const CompressReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    for (std::size_t k = 0; k < report.search.steps.size(); ++k) {
        const SearchStep& s = report.search.steps[k];
        const CompressionPlan& plan = report.path[s.candidate];
        nlohmann::json j;
        j["step"] = k;
        j["candidate"] = s.candidate;
        j["alpha"] = plan.prune.alpha;
        j["beta"] = plan.prune.beta;
        j["bitwidth_profile"] = bitwidth_profile(plan.quant);
        j["psnr_drop_db"] = s.psnr_drop_db;
        j["estimated_bytes"] = s.bytes;
        j["seconds"] = s.seconds;
        out << j.dump() << "\n";
    }
    nlohmann::json fin;
    fin["chosen"] = report.chosen;
    fin["feasible"] = report.feasible;
    fin["psnr_drop_db"] = report.psnr_drop_db;
    fin["output_bytes"] = report.output_bytes;
    out << fin.dump() << "\n";
}

}  // namespace flexgs
