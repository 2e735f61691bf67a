// Acceptance suite: nine scripted checks with explicit tolerances and
// runtime budgets, one result line each. Runs standalone or under ctest and
// exits nonzero when any executed check fails. The last check needs a real
// pretrained model and is skipped unless FLEXGS_TRUCK_PLY is set
// (FLEXGS_TRUCK_CAMERAS optionally supplies captured views).

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "flexgs/adp.hpp"
#include "flexgs/camera.hpp"
#include "flexgs/fgc.hpp"
#include "flexgs/foa.hpp"
#include "flexgs/importance.hpp"
#include "flexgs/metrics.hpp"
#include "flexgs/model.hpp"
#include "flexgs/mpq.hpp"
#include "flexgs/ply_io.hpp"
#include "flexgs/prng.hpp"
#include "flexgs/renderer.hpp"
#include "flexgs/scenegen.hpp"
#include "test_helpers.hpp"

using namespace flexgs;
namespace fs = std::filesystem;

namespace {

constexpr double kC0 = 0.28209479177387814;

struct Outcome {
    bool pass = true;
    bool skipped = false;
    std::string detail;
};

void fail(Outcome& o, const std::string& msg) {
    if (o.pass) {
        o.pass = false;
        o.detail = msg;
    }
}

template <typename... Args>
std::string strf(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// Shared mid-size fixture: 50k gaussians in 32 clusters, strong view
// dependence, 40% of rows effectively invisible, 32 orbit views at 128x128.
SceneSpec default_fixture() {
    SceneSpec spec;
    spec.seed = 1001;
    spec.n_gaussians = 50000;
    spec.sh_energy = 0.25;
    spec.low_importance_fraction = 0.4;
    spec.n_cameras = 32;
    spec.image_width = 128;
    spec.image_height = 128;
    spec.focal = 113.0;
    return spec;
}

// 1. Reconstruction error of every element stays within half its group's
// step, over 1000 random channels spanning lengths 1..1e5 and a 200x spread
// of per-channel value ranges, at both bit widths. The bound is checked on
// the decode value (min + code * step, in double); the stored float32 must
// additionally be bit-exactly that value rounded once, which pins the
// output to the correctly rounded decode with zero slack. Checking the
// bound on the stored float directly would reject every float32
// implementation: an element sitting exactly on a code midpoint decodes
// half an ulp past the bound whenever the final rounding goes outward.
Outcome check_error_bound() {
    Outcome o;
    CounterRng rng(501);
    uint64_t checked = 0;
    uint64_t bound_violations = 0;
    uint64_t rounding_violations = 0;
    double worst = 0.0;
    const double len_span = std::log(100000.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n;
        if (trial == 0)
            n = 1;
        else if (trial == 1)
            n = 100000;
        else
            n = std::size_t(std::exp(rng.next(0.0, len_span)));
        const double half_span = std::exp(rng.next(std::log(0.05), std::log(10.0)));
        const double offset = rng.next(-2.0 * half_span, 2.0 * half_span);
        std::vector<float> vals(n);
        for (auto& v : vals) v = float(rng.next(offset - half_span, offset + half_span));

        const int bits = (trial % 2) ? 4 : 8;
        const auto gc = uint32_t(std::clamp<std::size_t>(n / 8, 1, 1000));
        QuantizedChannel qc = quantize_channel(vals.data(), 1, n, bits, gc);
        std::vector<float> back(n);
        dequantize_channel(qc, n, bits, gc, back.data(), 1);

        const std::size_t gsize = quant_group_size(n, gc);
        const double levels = double((1 << bits) - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const GroupRange& g = qc.groups[i / gsize];
            const double step = (double(g.max) - double(g.min)) / levels;
            const double decoded = double(g.min) + double(qc.codes[i]) * step;
            const double err = std::fabs(decoded - double(vals[i]));
            ++checked;
            if (step == 0.0 ? err != 0.0 : err > 0.5 * step)
                ++bound_violations;
            else if (step > 0.0)
                worst = std::max(worst, err / (0.5 * step));
            if (back[i] != float(decoded)) ++rounding_violations;
        }
    }
    if (bound_violations)
        fail(o, strf("%llu of %llu elements exceeded half a step",
                     (unsigned long long)bound_violations, (unsigned long long)checked));
    if (rounding_violations)
        fail(o, strf("%llu stored values are not the rounded decode",
                     (unsigned long long)rounding_violations));
    if (o.pass)
        o.detail = strf("%llu elements, worst error at %.4f of the bound, outputs correctly "
                        "rounded",
                        (unsigned long long)checked, worst);
    return o;
}

// 2. Per-group ranges beat one global range per channel: mean PSNR at least
// 0.1 dB higher and total squared parameter error strictly lower, at
// identical bit widths.
Outcome check_grouping_benefit() {
    Outcome o;
    auto scene = generate_scene(default_fixture());
    const GaussianModel& model = scene.first;
    std::vector<Camera> eval(scene.second.begin(), scene.second.begin() + 8);
    std::vector<ImageBuffer> refs;
    refs.reserve(eval.size());
    for (const auto& cam : eval) refs.push_back(render(model, cam));

    QuantizationPlan grouped = default_quantization_plan();
    QuantizationPlan global = grouped;
    global.group_count = 1;
    GaussianModel recon_grouped = dequantize_model(apply_quantization(model, grouped));
    GaussianModel recon_global = dequantize_model(apply_quantization(model, global));

    const double psnr_grouped = mean_quality_vs(refs, recon_grouped, eval).psnr_db;
    const double psnr_global = mean_quality_vs(refs, recon_global, eval).psnr_db;
    auto sse = [&model](const GaussianModel& recon) {
        double total = 0.0;
        for (std::size_t i = 0; i < model.data.size(); ++i) {
            const double d = double(model.data[i]) - double(recon.data[i]);
            total += d * d;
        }
        return total;
    };
    const double sse_grouped = sse(recon_grouped);
    const double sse_global = sse(recon_global);

    if (psnr_grouped - psnr_global < 0.1)
        fail(o, strf("psnr delta %.4f dB below 0.1", psnr_grouped - psnr_global));
    if (!(sse_grouped < sse_global))
        fail(o, strf("sse %.6g not below %.6g", sse_grouped, sse_global));
    if (o.pass)
        o.detail = strf("psnr +%.2f dB, sse %.4g vs %.4g", psnr_grouped - psnr_global,
                        sse_grouped, sse_global);
    return o;
}

// 3. Dropping position to 4 bits costs strictly more quality than dropping
// the high-order SH block, on three independent scenes.
Outcome check_sensitivity_ordering() {
    Outcome o;
    double min_margin = 1e9;
    for (uint64_t seed : {11u, 12u, 13u}) {
        SceneSpec spec;
        spec.seed = seed;
        spec.n_gaussians = 4000;
        spec.n_cameras = 6;
        spec.sh_energy = 0.2;
        auto scene = generate_scene(spec);
        const GaussianModel& model = scene.first;
        const std::vector<Camera>& cams = scene.second;
        std::vector<ImageBuffer> refs;
        refs.reserve(cams.size());
        for (const auto& cam : cams) refs.push_back(render(model, cam));

        SensitivityProbe probe =
            probe_subsets(model, cams, refs, semantic_channel_subsets(), 64);
        const double pos_gap = probe.gap_db[std::size_t(ChannelGroup::Position)];
        const double sh_gap = probe.gap_db[std::size_t(ChannelGroup::SHAdv)];
        if (!(pos_gap > sh_gap))
            fail(o, strf("seed %llu: position gap %.4f dB not above sh gap %.4f dB",
                         (unsigned long long)seed, pos_gap, sh_gap));
        min_margin = std::min(min_margin, pos_gap - sh_gap);
    }
    if (o.pass) o.detail = strf("position int4 gap leads by >= %.2f dB on all 3 scenes",
                                min_margin);
    return o;
}

// 4. On each scene, some candidate from the pruning grid beats plain row
// pruning at ratio 0.5: estimated size no larger, PSNR at least 0.1 dB
// higher.
Outcome check_grid_dominance() {
    Outcome o;
    double min_margin = 1e9;
    for (uint64_t seed : {21u, 22u, 23u}) {
        SceneSpec spec;
        spec.seed = seed;
        spec.n_gaussians = 6000;
        spec.n_cameras = 6;
        spec.sh_energy = 0.2;
        spec.low_importance_fraction = 0.3;
        auto scene = generate_scene(spec);
        const GaussianModel& model = scene.first;
        const std::vector<Camera>& cams = scene.second;
        ImportanceScores scores = compute_scores(model, cams);
        std::vector<ImageBuffer> refs;
        refs.reserve(cams.size());
        for (const auto& cam : cams) refs.push_back(render(model, cam));

        QuantizationPlan quant = default_quantization_plan();
        quant.group_count = 64;
        CandidateEvaluation rowp =
            evaluate_candidate(model, scores, {row_prune_plan(0.5), quant}, cams, refs);

        double best = -1e9;
        for (const PruneCandidate& cand : default_candidate_grid()) {
            CandidateEvaluation ev =
                evaluate_candidate(model, scores, {cand.to_plan(), quant}, cams, refs);
            if (ev.bytes <= rowp.bytes) best = std::max(best, ev.psnr_db - rowp.psnr_db);
        }
        if (best < 0.1)
            fail(o, strf("seed %llu: best margin %.4f dB below 0.1",
                         (unsigned long long)seed, best));
        min_margin = std::min(min_margin, best);
    }
    if (o.pass)
        o.detail = strf("grid beats row pruning by >= %.2f dB at equal or smaller size",
                        min_margin);
    return o;
}

// 5. The search lands exactly on the boundary candidate of a monotone
// 33-step path using at most 17 evaluations (every boundary position), and
// the real pipeline under a 1 dB budget writes a container that a
// from-scratch re-evaluation confirms: drop below 1 dB, within 1e-6 dB of
// the report, at compression ratio >= 8.
Outcome check_search() {
    Outcome o;
    const std::size_t count = 33;
    int max_evals = 0;
    for (std::size_t boundary = 0; boundary <= count; ++boundary) {
        std::vector<int> evals(count, 0);
        PathEvaluator eval = [&evals](std::size_t i) -> std::pair<double, uint64_t> {
            ++evals[i];
            return {0.1 * double(i + 1), uint64_t(10000 - 100 * i)};
        };
        // boundary == count plays the all-infeasible case
        const double budget = boundary < count ? 0.1 * double(boundary + 1) + 0.05 : 0.05;
        SearchOutcome res =
            search_path(count, eval, {Constraint::Kind::MaxPsnrDropDb, budget}, 0);
        int total = 0;
        for (int e : evals) {
            total += e;
            if (e > 1) fail(o, strf("boundary %zu: an index was evaluated twice", boundary));
        }
        max_evals = std::max(max_evals, total);
        if (total > 17) fail(o, strf("boundary %zu took %d evaluations", boundary, total));
        if (total != int(res.steps.size()))
            fail(o, strf("boundary %zu: step log disagrees with evaluator calls", boundary));
        if (boundary < count) {
            if (!res.feasible || res.chosen != boundary)
                fail(o, strf("boundary %zu: search chose %zu", boundary, res.chosen));
        } else if (res.feasible) {
            fail(o, "all-infeasible path reported feasible");
        }
    }
    if (!o.pass) return o;

    const SceneSpec spec = default_fixture();
    auto scene = generate_scene(spec);
    const GaussianModel& model = scene.first;
    const std::vector<Camera>& cams = scene.second;
    const fs::path out = test::temp_path("acceptance_search.fgc");
    CompressReport rep =
        compress(model, cams, {Constraint::Kind::MaxPsnrDropDb, 1.0}, {}, out);
    if (!rep.feasible) fail(o, "1 dB budget reported infeasible");
    const double ratio = double(rep.input_bytes) / double(rep.output_bytes);
    if (ratio < 8.0) fail(o, strf("compression ratio %.2f below 8", ratio));

    // From-scratch re-evaluation: rebuild the path anchor and compare the
    // written container against fresh reference renders.
    std::vector<ImageBuffer> refs;
    refs.reserve(cams.size());
    for (const auto& cam : cams) refs.push_back(render(model, cam));
    ImportanceScores scores = compute_scores(model, cams);
    std::vector<PruningPlan> frontier = candidate_frontier(
        default_candidate_grid(), model.rows, scores, default_quantization_plan());
    if (frontier.empty() || rep.path.empty() ||
        frontier.front() != rep.path.front().prune ||
        rep.path.front().quant != default_quantization_plan()) {
        fail(o, "recomputed path anchor differs from the report");
        return o;
    }
    CandidateEvaluation anchor = evaluate_candidate(
        model, scores, {frontier.front(), default_quantization_plan()}, cams, refs);
    GaussianModel recon = dequantize_model(read_fgc(out));
    fs::remove(out);
    const double post_psnr = mean_quality_vs(refs, recon, cams).psnr_db;
    const double post_drop = anchor.psnr_db - post_psnr;
    if (!(post_drop < 1.0)) fail(o, strf("re-evaluated drop %.4f dB not below 1", post_drop));
    if (std::fabs(post_drop - rep.psnr_drop_db) > 1e-6)
        fail(o, strf("re-evaluated drop %.7f dB vs reported %.7f dB", post_drop,
                     rep.psnr_drop_db));
    if (o.pass)
        o.detail = strf("boundary sweep <= %d evals; drop %.3f dB, ratio %.1f, re-eval gap %.1e",
                        max_evals, rep.psnr_drop_db, ratio,
                        std::fabs(post_drop - rep.psnr_drop_db));
    return o;
}

// 6. Serialization is invisible: for 200 random (model, plan) pairs the
// file round trip reconstructs bit for bit and the size formula matches the
// bytes on disk exactly.
Outcome check_round_trip() {
    Outcome o;
    CounterRng rng(601);
    const fs::path path = test::temp_path("acceptance_roundtrip.fgc");
    for (int trial = 0; trial < 200 && o.pass; ++trial) {
        const std::size_t rows = 1 + rng.next_below(400);
        const std::size_t masked = rng.next_below(rows + 1);
        QuantizationPlan plan;
        for (auto& b : plan.bitwidths) b = rng.next_below(2) ? 8 : 4;
        plan.group_count = uint32_t(1 + rng.next_below(64));
        plan.int4_threshold_db = rng.nextf(0.05f, 1.0f);

        GaussianModel m = test::make_random_model(7000 + uint64_t(trial), rows, masked);
        QuantizedModel qm = apply_quantization(m, plan);
        qm.plan.prune = {rng.next(0.5, 1.0), rng.next(0.0, 0.5)};

        const uint64_t estimate =
            estimate_compressed_size(qm.full.rows, qm.sh_pruned.rows, qm.plan);
        const uint64_t written = write_fgc(qm, path);
        if (written != estimate)
            fail(o, strf("trial %d: wrote %llu bytes, estimated %llu", trial,
                         (unsigned long long)written, (unsigned long long)estimate));
        else if (fs::file_size(path) != written)
            fail(o, strf("trial %d: file size differs from write count", trial));

        GaussianModel direct = dequantize_model(qm);
        GaussianModel via_file = dequantize_model(read_fgc(path));
        if (direct.data != via_file.data || direct.sh_mask != via_file.sh_mask)
            fail(o, strf("trial %d: reconstructions differ", trial));
    }
    fs::remove(path);
    if (o.pass) o.detail = "200 pairs bit-exact, size formula exact";
    return o;
}

// Reference renderer that ignores tiles entirely: projects every row with
// the library routine, sorts ALL visible splats once by the canonical
// (depth, mean.x, mean.y, opacity) key, and composites each pixel against
// the full sorted list with the same skip rules as the production path.
ImageBuffer render_reference(const GaussianModel& model, const Camera& cam) {
    struct Ref {
        Eigen::Vector2f mean;
        Eigen::Vector3f conic;
        Eigen::Vector3f color;
        float opacity, depth;
        int x0, x1, y0, y1;
    };
    const Eigen::Vector3f cam_pos = cam.position();
    std::vector<Ref> splats;
    for (std::size_t i = 0; i < model.rows; ++i) {
        ActivatedGaussian g = activate_row(model, i);
        auto proj = project_gaussian(g, cam);
        if (!proj) continue;
        const Eigen::Matrix2f& c2 = proj->cov2d;
        float det = c2(0, 0) * c2(1, 1) - c2(0, 1) * c2(0, 1);
        if (!(det > 0.0f) || !std::isfinite(det)) continue;
        float mid = 0.5f * (c2(0, 0) + c2(1, 1));
        float radius = 3.0f * std::sqrt(mid + std::sqrt(std::max(0.0f, mid * mid - det)));
        Ref s;
        s.x0 = std::max(int(std::ceil(proj->mean2d.x() - radius)), 0);
        s.x1 = std::min(int(std::floor(proj->mean2d.x() + radius)), cam.width - 1);
        s.y0 = std::max(int(std::ceil(proj->mean2d.y() - radius)), 0);
        s.y1 = std::min(int(std::floor(proj->mean2d.y() + radius)), cam.height - 1);
        if (s.x0 > s.x1 || s.y0 > s.y1) continue;
        s.mean = proj->mean2d;
        float inv_det = 1.0f / det;
        s.conic = Eigen::Vector3f(c2(1, 1) * inv_det, -c2(0, 1) * inv_det, c2(0, 0) * inv_det);
        const float* row = model.row(i);
        Eigen::Vector3f dir = (g.position - cam_pos).normalized();
        s.color = evaluate_sh(row + kShBaseBegin,
                              model.masked(i) ? nullptr : row + kShAdvBegin, dir)
                      .cwiseMax(0.0f);
        s.opacity = g.opacity;
        s.depth = proj->depth;
        splats.push_back(s);
    }
    std::stable_sort(splats.begin(), splats.end(), [](const Ref& a, const Ref& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        if (a.mean.x() != b.mean.x()) return a.mean.x() < b.mean.x();
        if (a.mean.y() != b.mean.y()) return a.mean.y() < b.mean.y();
        return a.opacity < b.opacity;
    });

    ImageBuffer img(cam.width, cam.height);
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            float T = 1.0f;
            float acc[3] = {0, 0, 0};
            for (const Ref& s : splats) {
                if (x < s.x0 || x > s.x1 || y < s.y0 || y > s.y1) continue;
                float dx = float(x) - s.mean.x();
                float dy = float(y) - s.mean.y();
                float d2 = s.conic.x() * dx * dx + 2.0f * s.conic.y() * dx * dy +
                           s.conic.z() * dy * dy;
                if (d2 > 9.0f || d2 < 0.0f) continue;
                float alpha = s.opacity * std::exp(-0.5f * d2);
                if (alpha < 1.0f / 255.0f) continue;
                float w = T * alpha;
                acc[0] += w * s.color.x();
                acc[1] += w * s.color.y();
                acc[2] += w * s.color.z();
                T *= 1.0f - alpha;
                if (T < 1e-4f) break;
            }
            float* px = img.pixel(x, y);
            px[0] = std::min(1.0f, acc[0]);
            px[1] = std::min(1.0f, acc[1]);
            px[2] = std::min(1.0f, acc[2]);
        }
    }
    return img;
}

// 7. Renderer oracles: closed-form single splat to 1e-6, row-order
// invariance, masked rows versus zeroed coefficients, and tile invisibility
// against the global-order reference on 10 random scenes. All pixel-exact
// except the closed form.
Outcome check_renderer_oracles() {
    Outcome o;
    {
        Camera cam = test::simple_camera(96, 96, 100.0f);
        GaussianModel m = test::single_gaussian({0, 0, 5}, 0.7, 0.1, 0.8f);
        ImageBuffer img = render(m, cam);
        // alpha-composited over black at the exact center: d^2 = 0, so the
        // pixel is opacity * (0.5 + C0 * f_dc)
        const double expect = 0.7 * (0.5 + kC0 * 0.8);
        const float* px = img.pixel(48, 48);
        for (int c = 0; c < 3; ++c)
            if (std::fabs(double(px[c]) - expect) > 1e-6)
                fail(o, strf("center pixel channel %d: %.8f vs %.8f", c, double(px[c]),
                             expect));
        if (img.pixel(0, 0)[0] != 0.0f) fail(o, "corner pixel not black");
    }
    for (std::size_t n : {std::size_t(299), std::size_t(300)}) {
        auto scene = generate_scene(test::tiny_scene_spec(760 + n, n));
        GaussianModel model = scene.first;
        for (std::size_t r = 0; r < model.rows; r += 4) model.sh_mask[r] = 1;
        GaussianModel shuffled;
        shuffled.resize(model.rows);
        for (std::size_t i = 0; i < model.rows; ++i) {
            const std::size_t j = (i * 7 + 3) % model.rows;  // gcd(7, n) = 1
            std::copy(model.row(j), model.row(j) + kChannelCount, shuffled.row(i));
            shuffled.sh_mask[i] = model.sh_mask[j];
        }
        for (const auto& cam : scene.second)
            if (!test::images_identical(render(model, cam), render(shuffled, cam)))
                fail(o, strf("row permutation changed pixels (n=%zu)", model.rows));
    }
    {
        auto scene = generate_scene(test::tiny_scene_spec(770, 200));
        GaussianModel masked = deep_copy(scene.first);
        GaussianModel zeroed = deep_copy(scene.first);
        for (std::size_t r = 0; r < masked.rows; r += 3) {
            masked.sh_mask[r] = 1;
            for (std::size_t c = kShAdvBegin; c < kShAdvBegin + kShAdvCount; ++c)
                zeroed.at(r, c) = 0.0f;
        }
        for (const auto& cam : scene.second)
            if (!test::images_identical(render(masked, cam), render(zeroed, cam)))
                fail(o, "masked and zeroed rows rendered differently");
    }
    for (uint64_t seed = 0; seed < 10; ++seed) {
        SceneSpec spec = test::tiny_scene_spec(780 + seed, 150);
        spec.image_width = 70;  // partial tiles on both axes
        spec.image_height = 54;
        auto scene = generate_scene(spec);
        GaussianModel model = scene.first;
        for (std::size_t r = 0; r < model.rows; r += 5) model.sh_mask[r] = 1;
        for (const auto& cam : scene.second)
            if (!test::images_identical(render(model, cam), render_reference(model, cam)))
                fail(o, strf("tiled output differs from the reference (seed %llu)",
                             (unsigned long long)(780 + seed)));
    }
    if (o.pass) o.detail = "closed form, permutation, masking, tiling all exact";
    return o;
}

// Naive PSNR reference: plain double loop over every value.
double psnr_reference(const ImageBuffer& a, const ImageBuffer& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.rgb.size(); ++i) {
        const double d = double(a.rgb[i]) - double(b.rgb[i]);
        total += d * d;
    }
    const double m = total / double(a.rgb.size());
    if (m < 1e-10) return 100.0;
    return 10.0 * std::log10(1.0 / m);
}

// Naive SSIM reference: full 2D 11x11 Gaussian window (sigma 1.5) evaluated
// at every position where the window fits, one channel at a time, all in
// double. Deliberately O(pixels * 121) with no separability tricks.
double ssim_reference(const ImageBuffer& a, const ImageBuffer& b) {
    constexpr int kWin = 11;
    constexpr double kSigma = 1.5;
    constexpr double kCc1 = 0.01 * 0.01;
    constexpr double kCc2 = 0.03 * 0.03;
    double w[kWin][kWin];
    double wsum = 0.0;
    for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
            double di = i - 5.0, dj = j - 5.0;
            w[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * kSigma * kSigma));
            wsum += w[i][j];
        }
    for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) w[i][j] /= wsum;

    double total = 0.0;
    std::size_t count = 0;
    for (int ch = 0; ch < 3; ++ch) {
        for (int y = 0; y + kWin <= a.height; ++y) {
            for (int x = 0; x + kWin <= a.width; ++x) {
                double ma = 0, mb = 0, va = 0, vb = 0, cov = 0;
                for (int i = 0; i < kWin; ++i)
                    for (int j = 0; j < kWin; ++j) {
                        double pa = a.pixel(x + j, y + i)[ch];
                        double pb = b.pixel(x + j, y + i)[ch];
                        ma += w[i][j] * pa;
                        mb += w[i][j] * pb;
                        va += w[i][j] * pa * pa;
                        vb += w[i][j] * pb * pb;
                        cov += w[i][j] * pa * pb;
                    }
                va -= ma * ma;
                vb -= mb * mb;
                cov -= ma * mb;
                total += ((2 * ma * mb + kCc1) * (2 * cov + kCc2)) /
                         ((ma * ma + mb * mb + kCc1) * (va + vb + kCc2));
                ++count;
            }
        }
    }
    return total / double(count);
}

// 8. psnr and ssim agree with the naive double-loop references (1e-9 and
// 1e-6) on 50 random pairs, and the 0.25-mse closed form lands on
// 6.0206 dB within 1e-4.
Outcome check_metric_oracles() {
    Outcome o;
    CounterRng rng(801);
    double worst_psnr = 0.0;
    double worst_ssim = 0.0;
    for (int pair = 0; pair < 50; ++pair) {
        const int w = 11 + int(rng.next_below(30));
        const int h = 11 + int(rng.next_below(30));
        ImageBuffer a(w, h);
        ImageBuffer b(w, h);
        for (auto& v : a.rgb) v = rng.nextf(0.0f, 1.0f);
        if (pair % 2) {
            // correlated pair: mild clipped perturbation of a
            b = a;
            for (auto& v : b.rgb) v = std::clamp(v + rng.nextf(-0.08f, 0.08f), 0.0f, 1.0f);
        } else {
            for (auto& v : b.rgb) v = rng.nextf(0.0f, 1.0f);
        }
        worst_psnr = std::max(worst_psnr, std::fabs(psnr(a, b) - psnr_reference(a, b)));
        worst_ssim = std::max(worst_ssim, std::fabs(ssim(a, b) - ssim_reference(a, b)));
    }
    if (worst_psnr > 1e-9) fail(o, strf("psnr deviates from the reference by %.3g", worst_psnr));
    if (worst_ssim > 1e-6) fail(o, strf("ssim deviates from the reference by %.3g", worst_ssim));

    ImageBuffer black(16, 16);
    ImageBuffer gray(16, 16);
    for (auto& v : gray.rgb) v = 0.5f;
    if (mse(black, gray) != 0.25) fail(o, "mse closed form is not exactly 0.25");
    if (std::fabs(psnr(black, gray) - 6.0206) > 1e-4)
        fail(o, strf("closed-form psnr %.6f dB off 6.0206", psnr(black, gray)));
    if (o.pass)
        o.detail = strf("max psnr dev %.2g, max ssim dev %.2g over 50 pairs", worst_psnr,
                        worst_ssim);
    return o;
}

// Orbit views scaled to the model: centered on per-axis medians with the
// radius set by the 90th-percentile distance, so stray far-out rows do not
// blow up the framing.
std::vector<Camera> synthesized_orbit(const GaussianModel& model, int count, int w, int h) {
    if (model.rows == 0) return {test::simple_camera(w, h, float(w))};
    auto axis_median = [&model](std::size_t axis) {
        std::vector<float> v(model.rows);
        for (std::size_t r = 0; r < model.rows; ++r) v[r] = model.at(r, axis);
        std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(v.size() / 2), v.end());
        return v[v.size() / 2];
    };
    const Eigen::Vector3f center(axis_median(0), axis_median(1), axis_median(2));
    std::vector<float> dist(model.rows);
    for (std::size_t r = 0; r < model.rows; ++r)
        dist[r] =
            (Eigen::Vector3f(model.at(r, 0), model.at(r, 1), model.at(r, 2)) - center).norm();
    const auto p90 = std::ptrdiff_t(0.9 * double(dist.size()));
    std::nth_element(dist.begin(), dist.begin() + p90, dist.end());
    const float radius = 2.5f * std::max(dist[std::size_t(p90)], 1e-3f);

    std::vector<Camera> cams;
    cams.reserve(std::size_t(count));
    const double elevation = 0.3;
    for (int k = 0; k < count; ++k) {
        const double angle = 2.0 * std::numbers::pi * double(k) / double(count);
        const Eigen::Vector3f eye =
            center + radius * Eigen::Vector3f(float(std::cos(angle) * std::cos(elevation)),
                                              float(std::sin(elevation)),
                                              float(std::sin(angle) * std::cos(elevation)));
        const Eigen::Vector3f fwd = (center - eye).normalized();
        const Eigen::Vector3f right = Eigen::Vector3f(0, 1, 0).cross(fwd).normalized();
        const Eigen::Vector3f down = fwd.cross(right);
        Camera cam;
        cam.width = w;
        cam.height = h;
        cam.fx = cam.fy = float(w);
        cam.cx = 0.5f * float(w);
        cam.cy = 0.5f * float(h);
        Eigen::Matrix3f rot;
        rot.row(0) = right.transpose();
        rot.row(1) = down.transpose();
        rot.row(2) = fwd.transpose();
        cam.world_to_camera.setIdentity();
        cam.world_to_camera.topLeftCorner<3, 3>() = rot;
        cam.world_to_camera.topRightCorner<3, 1>() = -rot * eye;
        cams.push_back(cam);
    }
    return cams;
}

// 9. Real-asset gate: compress a user-supplied pretrained model under a
// 1 dB budget and demand at least a 90% size reduction with the budget met.
Outcome check_pretrained_asset() {
    Outcome o;
    const char* ply_path = std::getenv("FLEXGS_TRUCK_PLY");
    if (!ply_path) {
        o.skipped = true;
        o.detail = "set FLEXGS_TRUCK_PLY (and optionally FLEXGS_TRUCK_CAMERAS) to run";
        return o;
    }
    GaussianModel model = load_ply(ply_path);
    std::vector<Camera> cams;
    if (const char* cam_path = std::getenv("FLEXGS_TRUCK_CAMERAS"))
        cams = load_cameras(cam_path);
    else
        cams = synthesized_orbit(model, 16, 256, 256);

    const fs::path out = test::temp_path("acceptance_asset.fgc");
    CompressReport rep =
        compress(model, cams, {Constraint::Kind::MaxPsnrDropDb, 1.0}, {}, out);
    fs::remove(out);
    const double reduction = 100.0 * (1.0 - double(rep.output_bytes) / double(rep.input_bytes));
    if (!rep.feasible) fail(o, "1 dB budget reported infeasible");
    if (reduction < 90.0) fail(o, strf("size reduction %.1f%% below 90%%", reduction));
    if (o.pass)
        o.detail = strf("reduction %.1f%%, drop %.3f dB over %zu rows", reduction,
                        rep.psnr_drop_db, model.rows);
    return o;
}

struct Entry {
    int id;
    const char* name;
    double limit_s;  // 0 = unbounded
    Outcome (*fn)();
};

}  // namespace

int main() {
    const Entry entries[] = {
        {1, "quantization error bound", 10.0, check_error_bound},
        {2, "grouped quantization benefit", 30.0, check_grouping_benefit},
        {3, "channel sensitivity ordering", 60.0, check_sensitivity_ordering},
        {4, "pruning grid dominance", 120.0, check_grid_dominance},
        {5, "constraint search boundary", 120.0, check_search},
        {6, "container round trip", 60.0, check_round_trip},
        {7, "renderer oracles", 60.0, check_renderer_oracles},
        {8, "metric oracles", 30.0, check_metric_oracles},
        {9, "pretrained asset target", 0.0, check_pretrained_asset},
    };
    int failures = 0;
    for (const Entry& e : entries) {
        const double t0 = now_seconds();
        Outcome o;
        try {
            o = e.fn();
        } catch (const std::exception& ex) {
            fail(o, strf("exception: %s", ex.what()));
        }
        const double elapsed = now_seconds() - t0;
        if (o.pass && !o.skipped && e.limit_s > 0.0 && elapsed > e.limit_s)
            fail(o, strf("took %.1fs, limit %.0fs", elapsed, e.limit_s));
        const char* tag = o.skipped ? "[SKIP]" : o.pass ? "[PASS]" : "[FAIL]";
        if (e.limit_s > 0.0)
            std::printf("%s %d %s: %s (%.1fs, limit %.0fs)\n", tag, e.id, e.name,
                        o.detail.c_str(), elapsed, e.limit_s);
        else
            std::printf("%s %d %s: %s (%.1fs)\n", tag, e.id, e.name, o.detail.c_str(), elapsed);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    if (failures)
        std::printf("acceptance: %d of 9 checks failed\n", failures);
    else
        std::printf("acceptance: all executed checks passed\n");
    return failures ? 1 : 0;
}
