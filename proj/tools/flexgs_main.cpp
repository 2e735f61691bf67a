// Command-line front end: scene generation, compression, decompression,
// rendering, sensitivity probing, and rate-distortion sweeps.
//
// Exit codes: 0 success, 1 runtime/data-format failure, 2 usage error,
// 3 constraint infeasible (best-effort output still written).

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "flexgs/adp.hpp"
#include "flexgs/fgc.hpp"
#include "flexgs/foa.hpp"
#include "flexgs/image_io.hpp"
#include "flexgs/importance.hpp"
#include "flexgs/metrics.hpp"
#include "flexgs/mpq.hpp"
#include "flexgs/parallel.hpp"
#include "flexgs/ply_io.hpp"
#include "flexgs/renderer.hpp"
#include "flexgs/scenegen.hpp"

namespace {

using namespace flexgs;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<PruneCandidate> grid_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad grid json: ") + e.what());
    }
    std::vector<double> rows, shs;
    if (!j.contains("row_fractions") || !j.contains("sh_fractions"))
        throw FormatError("grid json needs row_fractions and sh_fractions arrays");
    for (const auto& v : j["row_fractions"]) rows.push_back(v.get<double>());
    for (const auto& v : j["sh_fractions"]) shs.push_back(v.get<double>());
    if (rows.empty() || shs.empty()) throw FormatError("grid json arrays must be non-empty");
    std::vector<PruneCandidate> grid;
    for (double r : rows)
        for (double s : shs) {
            if (r < 0.0 || r > 1.0 || s < 0.0 || s > 1.0)
                throw FormatError("grid fractions must lie in [0,1]");
            grid.push_back({r, s});
        }
    return grid;
}

GaussianModel load_model_any(const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".fgc")
        return dequantize_model(read_fgc(path));
    return load_ply(path);
}

int cmd_gen_scene(const std::string& spec_path, const std::string& out_dir) {
    SceneSpec spec;
    if (!spec_path.empty()) spec = scene_spec_from_json(read_text_file(spec_path));
    FixturePaths paths = write_fixture(spec, out_dir);
    nlohmann::json j;
    j["model"] = paths.model_ply.string();
    j["cameras"] = paths.cameras_json.string();
    j["n_gaussians"] = spec.n_gaussians;
    std::cout << j.dump(2) << std::endl;
    return kExitOk;
}

struct CompressArgs {
    std::string model_path, cameras_path, train_cameras_path;
    std::string output = "out.fgc";
    std::string plan_path, grid_path, trace_path;
    double target_drop = -1.0, target_ratio = -1.0;
    int64_t target_bytes = -1;
    bool probe = false, joint = false;
    std::size_t views = 32;
};

int cmd_compress(const CompressArgs& args) {
    int specified = (args.target_drop >= 0.0) + (args.target_bytes >= 0) +
                    (args.target_ratio >= 0.0);
    if (specified != 1) {
        std::cerr << "compress: exactly one of --target-psnr-drop, --target-bytes, "
                     "--target-ratio is required\n";
        return kExitUsage;
    }
    Constraint constraint;
    if (args.target_drop >= 0.0)
        constraint = {Constraint::Kind::MaxPsnrDropDb, args.target_drop};
    else if (args.target_bytes >= 0)
        constraint = {Constraint::Kind::MaxCompressedBytes, double(args.target_bytes)};
    else
        constraint = {Constraint::Kind::MinCompressionRatio, args.target_ratio};

    double t0 = now_seconds();
    GaussianModel model = load_ply(args.model_path);
    std::vector<Camera> cameras = load_cameras(args.cameras_path);
    CompressOptions options;
    if (!args.train_cameras_path.empty())
        options.scoring_cameras = load_cameras(args.train_cameras_path);
    else
        std::cerr << "compress: no --train-cameras given; importance scoring reuses the "
                     "evaluation cameras\n";
    double load_s = now_seconds() - t0;

    if (!args.plan_path.empty())
        options.quant = quantization_plan_from_json(read_text_file(args.plan_path));
    if (!args.grid_path.empty()) options.grid = grid_from_json(read_text_file(args.grid_path));
    options.probe_sensitivity = args.probe;
    options.joint_bitwidths = args.joint;
    options.eval_views = args.views;

    CompressReport report = compress(model, cameras, constraint, options, args.output);
    if (!args.trace_path.empty()) write_trace(report, args.trace_path);

    SizeReport size = compression_ratio(report.input_bytes, report.output_bytes);
    nlohmann::json j;
    j["psnr_drop_db"] = report.psnr_drop_db;
    j["ssim"] = report.ssim;
    j["lpips"] = nullptr;
    j["input_bytes"] = report.input_bytes;
    j["output_bytes"] = report.output_bytes;
    j["ratio"] = size.ratio;
    j["reduction_pct"] = size.reduction_pct;
    j["feasible"] = report.feasible;
    j["output"] = args.output;
    j["chosen"] = {{"alpha", report.chosen_plan.prune.alpha},
                   {"beta", report.chosen_plan.prune.beta},
                   {"bitwidth_profile", bitwidth_profile(report.chosen_plan.quant)}};
    j["time_breakdown"] = {{"load", load_s},
                           {"scoring", report.times.scoring_s},
                           {"adaptation", report.times.adaptation_s},
                           {"storage", report.times.storage_s}};
    std::cout << j.dump(2) << std::endl;
    return report.feasible ? kExitOk : kExitInfeasible;
}

int cmd_decompress(const std::string& input, const std::string& output) {
    GaussianModel model = dequantize_model(read_fgc(input));
    write_ply(model, output);
    nlohmann::json j;
    j["rows"] = model.rows;
    j["output"] = output;
    std::cout << j.dump(2) << std::endl;
    return kExitOk;
}

int cmd_render(const std::string& input, const std::string& cameras_path,
               const std::string& out_dir, const std::string& format) {
    if (format != "png" && format != "pfm") {
        std::cerr << "render: --format must be png or pfm\n";
        return kExitUsage;
    }
    GaussianModel model = load_model_any(input);
    std::vector<Camera> cameras = load_cameras(cameras_path);
    std::filesystem::create_directories(out_dir);
    for (std::size_t i = 0; i < cameras.size(); ++i) {
        ImageBuffer img = render(model, cameras[i]);
        char name[32];
        std::snprintf(name, sizeof name, "view_%03zu.%s", i, format.c_str());
        std::filesystem::path out = std::filesystem::path(out_dir) / name;
        if (format == "png")
            write_png(img, out);
        else
            write_pfm(img, out);
    }
    nlohmann::json j;
    j["views"] = cameras.size();
    j["out_dir"] = out_dir;
    std::cout << j.dump(2) << std::endl;
    return kExitOk;
}

int cmd_sensitivity(const std::string& model_path, const std::string& cameras_path,
                    const std::string& output, bool per_channel, uint32_t group_count,
                    double threshold_db) {
    GaussianModel model = load_ply(model_path);
    std::vector<Camera> cameras = load_cameras(cameras_path);
    std::vector<ImageBuffer> views;
    views.reserve(cameras.size());
    for (const auto& cam : cameras) views.push_back(render(model, cam));

    SensitivityReport report = probe_channel_sensitivity(model, cameras, views, group_count);
    QuantizationPlan plan = assign_bitwidths(report, float(threshold_db), group_count);

    nlohmann::json j;
    j["all_int8_psnr_db"] = report.all_int8_psnr_db;
    nlohmann::json gaps;
    for (std::size_t g = 0; g < kChannelGroupCount; ++g)
        gaps[channel_group_name(ChannelGroup(g))] = report.group_gap_db[g];
    j["gaps_db"] = gaps;
    j["suggested_plan"] = nlohmann::json::parse(quantization_plan_to_json(plan));
    if (per_channel) {
        std::vector<std::vector<std::size_t>> singles;
        for (std::size_t c = 0; c < kChannelCount; ++c) singles.push_back({c});
        SensitivityProbe probe = probe_subsets(model, cameras, views, singles, group_count);
        j["per_channel_gaps_db"] = probe.gap_db;
    }
    std::ofstream out(output, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + output);
    out << j.dump(2) << "\n";
    std::cout << j.dump(2) << std::endl;
    return kExitOk;
}

int cmd_rd_sweep(const std::string& model_path, const std::string& cameras_path,
                 const std::string& output, const std::string& grid_path) {
    GaussianModel model = load_ply(model_path);
    std::vector<Camera> cameras = load_cameras(cameras_path);
    uint64_t input_bytes = model_byte_size(model);

    std::vector<PruneCandidate> grid;
    if (!grid_path.empty()) {
        grid = grid_from_json(read_text_file(grid_path));
    } else {
        for (double r : {0.0, 0.3, 0.6, 0.9})
            for (double s : {0.0, 0.5, 1.0}) grid.push_back({r, s});
    }

    ImportanceScores scores = compute_scores(model, cameras);
    std::vector<ImageBuffer> views;
    views.reserve(cameras.size());
    for (const auto& cam : cameras) views.push_back(render(model, cam));

    std::vector<QuantizationPlan> profiles = {uniform_quantization_plan(8),
                                              default_quantization_plan(),
                                              uniform_quantization_plan(4)};

    struct Row {
        PruneCandidate cand;
        CompressionPlan plan;
        CandidateEvaluation ev;
    };
    std::vector<Row> rows;
    for (const auto& quant : profiles)
        for (const auto& cand : grid) {
            CompressionPlan plan{cand.to_plan(), quant};
            rows.push_back({cand, plan, evaluate_candidate(model, scores, plan, cameras, views)});
        }

    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.ev.bytes > b.ev.bytes; });
    double ref_psnr = rows.front().ev.psnr_db;

    std::ofstream out(output, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + output);
    out << "alpha,beta,sh_fraction,bitwidth_profile,bytes,ratio,psnr_drop_db,ssim\n";
    for (const auto& r : rows) {
        out << r.plan.prune.alpha << "," << r.plan.prune.beta << "," << r.cand.sh_fraction << ","
            << bitwidth_profile(r.plan.quant) << "," << r.ev.bytes << ","
            << double(input_bytes) / double(r.ev.bytes) << "," << (ref_psnr - r.ev.psnr_db) << ","
            << r.ev.ssim << "\n";
    }
    nlohmann::json j;
    j["rows"] = rows.size();
    j["output"] = output;
    std::cout << j.dump(2) << std::endl;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian splat compression toolkit"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: all cores)")
        ->envname("FLEXGS_THREADS");

    auto* gen = app.add_subcommand("gen-scene", "generate a synthetic scene fixture");
    std::string gen_spec, gen_out = "scene";
    gen->add_option("--spec", gen_spec, "scene spec json (defaults used when omitted)");
    gen->add_option("--out", gen_out, "output directory")->required();

    auto* comp = app.add_subcommand("compress", "compress a .ply model to .fgc");
    CompressArgs ca;
    comp->add_option("model", ca.model_path, "input .ply")->required();
    comp->add_option("--cameras", ca.cameras_path, "evaluation cameras json")->required();
    comp->add_option("--train-cameras", ca.train_cameras_path, "cameras for importance scoring");
    comp->add_option("--output", ca.output, "output .fgc path");
    comp->add_option("--target-psnr-drop", ca.target_drop, "max PSNR drop in dB");
    comp->add_option("--target-bytes", ca.target_bytes, "max compressed size in bytes");
    comp->add_option("--target-ratio", ca.target_ratio, "min compression ratio");
    comp->add_option("--plan", ca.plan_path, "quantization plan json");
    comp->add_option("--grid", ca.grid_path, "candidate grid json");
    comp->add_option("--trace", ca.trace_path, "search trace output (json lines)");
    comp->add_option("--views", ca.views, "evaluation view count (default 32)");
    comp->add_flag("--probe-sensitivity", ca.probe, "derive bit-widths from a probe run");
    comp->add_flag("--joint", ca.joint, "extend the path with uniform INT8/INT4 variants");

    auto* dec = app.add_subcommand("decompress", "expand a .fgc container to .ply");
    std::string dec_in, dec_out = "out.ply";
    dec->add_option("input", dec_in, "input .fgc")->required();
    dec->add_option("--output", dec_out, "output .ply path");

    auto* ren = app.add_subcommand("render", "render views of a .ply or .fgc model");
    std::string ren_in, ren_cams, ren_out = "renders", ren_fmt = "png";
    ren->add_option("input", ren_in, "input model (.ply or .fgc)")->required();
    ren->add_option("--cameras", ren_cams, "cameras json")->required();
    ren->add_option("--out", ren_out, "output directory");
    ren->add_option("--format", ren_fmt, "png or pfm");

    auto* sen = app.add_subcommand("sensitivity", "probe per-group quantization sensitivity");
    std::string sen_model, sen_cams, sen_out = "sensitivity.json";
    bool sen_per_channel = false;
    uint32_t sen_groups = 1000;
    double sen_threshold = 0.25;
    sen->add_option("model", sen_model, "input .ply")->required();
    sen->add_option("--cameras", sen_cams, "cameras json")->required();
    sen->add_option("--output", sen_out, "report json path");
    sen->add_option("--group-count", sen_groups, "quantization group count");
    sen->add_option("--threshold-db", sen_threshold, "4-bit eligibility threshold");
    sen->add_flag("--per-channel", sen_per_channel, "probe all 59 channels individually");

    auto* sweep = app.add_subcommand("rd-sweep", "evaluate a grid of size/quality tradeoffs");
    std::string sw_model, sw_cams, sw_out = "sweep.csv", sw_grid;
    sweep->add_option("model", sw_model, "input .ply")->required();
    sweep->add_option("--cameras", sw_cams, "cameras json")->required();
    sweep->add_option("--output", sw_out, "csv output path");
    sweep->add_option("--grid", sw_grid, "candidate grid json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    set_worker_count(threads);

    try {
        if (gen->parsed()) return cmd_gen_scene(gen_spec, gen_out);
        if (comp->parsed()) return cmd_compress(ca);
        if (dec->parsed()) return cmd_decompress(dec_in, dec_out);
        if (ren->parsed()) return cmd_render(ren_in, ren_cams, ren_out, ren_fmt);
        if (sen->parsed())
            return cmd_sensitivity(sen_model, sen_cams, sen_out, sen_per_channel, sen_groups,
                                   sen_threshold);
        if (sweep->parsed()) return cmd_rd_sweep(sw_model, sw_cams, sw_out, sw_grid);
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
