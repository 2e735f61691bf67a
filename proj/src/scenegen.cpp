#include "flexgs/scenegen.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

#include "flexgs/ply_io.hpp"
#include "flexgs/prng.hpp"

namespace flexgs {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr float kSh0 = 0.28209479177387814f;

// Counter layout: 64 draws reserved per row, a separate stream for
// per-cluster factors, one for cameras.
constexpr uint64_t kRowStride = 64;
constexpr uint64_t kClusterStream = uint64_t(1) << 40;
constexpr uint64_t kCameraStream = uint64_t(1) << 41;

double draw(const SceneSpec& spec, uint64_t counter, double lo, double hi) {
    return uniform_range(spec.seed, counter, lo, hi);
}

}  // namespace

std::string scene_spec_to_json(const SceneSpec& spec) {
    nlohmann::json j;
    j["seed"] = spec.seed;
    j["n_gaussians"] = spec.n_gaussians;
    j["extent"] = spec.extent;
    j["opacity_range"] = {spec.opacity_range[0], spec.opacity_range[1]};
    j["scale_range"] = {spec.scale_range[0], spec.scale_range[1]};
    j["sh_energy"] = spec.sh_energy;
    j["low_importance_fraction"] = spec.low_importance_fraction;
    j["n_clusters"] = spec.n_clusters;
    j["n_cameras"] = spec.n_cameras;
    j["orbit_radius"] = spec.orbit_radius;
    j["orbit_elevation"] = spec.orbit_elevation;
    j["image_width"] = spec.image_width;
    j["image_height"] = spec.image_height;
    j["focal"] = spec.focal;
    return j.dump(2);
}

SceneSpec scene_spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad scene spec json: ") + e.what());
    }
    SceneSpec s;
    auto get = [&](const char* key, auto& out) {
        if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
    };
    get("seed", s.seed);
    get("n_gaussians", s.n_gaussians);
    get("extent", s.extent);
    if (j.contains("opacity_range")) {
        s.opacity_range[0] = j["opacity_range"].at(0).get<double>();
        s.opacity_range[1] = j["opacity_range"].at(1).get<double>();
    }
    if (j.contains("scale_range")) {
        s.scale_range[0] = j["scale_range"].at(0).get<double>();
        s.scale_range[1] = j["scale_range"].at(1).get<double>();
    }
    get("sh_energy", s.sh_energy);
    get("low_importance_fraction", s.low_importance_fraction);
    get("n_clusters", s.n_clusters);
    get("n_cameras", s.n_cameras);
    get("orbit_radius", s.orbit_radius);
    get("orbit_elevation", s.orbit_elevation);
    get("image_width", s.image_width);
    get("image_height", s.image_height);
    get("focal", s.focal);
    return s;
}

std::pair<GaussianModel, std::vector<Camera>> generate_scene(const SceneSpec& spec) {
    if (spec.n_clusters == 0) throw std::invalid_argument("scene spec: n_clusters must be >= 1");
    if (spec.n_cameras == 0) throw std::invalid_argument("scene spec: n_cameras must be >= 1");
    if (!(spec.extent > 0.0)) throw std::invalid_argument("scene spec: extent must be positive");
    if (!(spec.opacity_range[0] > 0.0 && spec.opacity_range[1] < 1.0 &&
          spec.opacity_range[0] <= spec.opacity_range[1]))
        throw std::invalid_argument("scene spec: opacity range must lie strictly inside (0,1)");
    if (!(spec.scale_range[0] > 0.0 && spec.scale_range[0] <= spec.scale_range[1]))
        throw std::invalid_argument("scene spec: scale range must be positive");
    if (!(spec.low_importance_fraction >= 0.0 && spec.low_importance_fraction <= 1.0))
        throw std::invalid_argument("scene spec: low_importance_fraction must be in [0,1]");

    const std::size_t n = spec.n_gaussians;
    const std::size_t n_low = std::size_t(std::floor(spec.low_importance_fraction * double(n)));
    const std::size_t n_normal = n - n_low;

    // Per-cluster center, local radius, and magnitude factors.
    struct Cluster {
        double cx, cy, cz;
        double radius;
        double scale_factor;
        double sh_factor;
    };
    std::vector<Cluster> clusters(spec.n_clusters);
    const double half = spec.extent / 2.0;
    for (std::size_t c = 0; c < spec.n_clusters; ++c) {
        uint64_t base = kClusterStream + c * 8;
        Cluster& cl = clusters[c];
        cl.cx = draw(spec, base + 0, -half, half);
        cl.cy = draw(spec, base + 1, -half, half);
        cl.cz = draw(spec, base + 2, -half, half);
        cl.radius = spec.extent / 16.0;
        // Spread magnitudes across clusters so grouped ranges have signal.
        cl.scale_factor = std::exp(draw(spec, base + 3, std::log(0.5), std::log(2.0)));
        cl.sh_factor = std::exp(draw(spec, base + 4, std::log(0.1), std::log(1.0)));
    }

    GaussianModel model;
    model.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        float* row = model.row(i);
        const uint64_t base = i * kRowStride;
        const bool low = i >= n_normal;
        // Contiguous blocks of rows share a cluster.
        const std::size_t band_size = low ? std::max<std::size_t>(n_low, 1)
                                          : std::max<std::size_t>(n_normal, 1);
        const std::size_t band_index = low ? i - n_normal : i;
        const Cluster& cl = clusters[band_index * spec.n_clusters / band_size];

        row[0] = float(cl.cx + draw(spec, base + 0, -cl.radius, cl.radius));
        row[1] = float(cl.cy + draw(spec, base + 1, -cl.radius, cl.radius));
        row[2] = float(cl.cz + draw(spec, base + 2, -cl.radius, cl.radius));

        // Base color: mid-gray +- 0.25 per channel.
        for (int k = 0; k < 3; ++k) {
            double target = draw(spec, base + 3 + uint64_t(k), 0.25, 0.75);
            row[kShBaseBegin + std::size_t(k)] = float((target - 0.5) / kSh0);
        }

        // High-order SH: uniform coefficients damped by degree, scaled by the
        // scene energy and the cluster factor.
        for (int k = 0; k < 15; ++k) {
            int degree = k < 3 ? 1 : (k < 8 ? 2 : 3);
            double damp = degree == 1 ? 1.0 : (degree == 2 ? 0.5 : 0.25);
            for (int ch = 0; ch < 3; ++ch) {
                double u = draw(spec, base + 6 + uint64_t(ch * 15 + k), -1.0, 1.0);
                row[kShAdvBegin + std::size_t(ch * 15 + k)] =
                    float(u * spec.sh_energy * cl.sh_factor * damp);
            }
        }

        double act_opacity, act_scale_lo, act_scale_hi;
        if (low) {
            act_opacity = draw(spec, base + 51, 1e-5, 1e-4);  // below the alpha floor
            act_scale_lo = spec.scale_range[0] * 0.01;
            act_scale_hi = spec.scale_range[0] * 0.02;
        } else {
            act_opacity = draw(spec, base + 51, spec.opacity_range[0], spec.opacity_range[1]);
            act_scale_lo = spec.scale_range[0] * cl.scale_factor;
            act_scale_hi = spec.scale_range[1] * cl.scale_factor;
        }
        row[kOpacityChannel] = float(inverse_opacity(act_opacity));
        for (int k = 0; k < 3; ++k) {
            double s = std::exp(
                draw(spec, base + 52 + uint64_t(k), std::log(act_scale_lo), std::log(act_scale_hi)));
            row[kScaleBegin + std::size_t(k)] = float(inverse_scale(s));
        }

        // Uniform unit quaternion from three uniforms.
        double u1 = uniform01(spec.seed, base + 55);
        double u2 = uniform01(spec.seed, base + 56);
        double u3 = uniform01(spec.seed, base + 57);
        double sq1 = std::sqrt(1.0 - u1), sq2 = std::sqrt(u1);
        row[kRotationBegin + 0] = float(sq2 * std::cos(2.0 * kPi * u3));  // w
        row[kRotationBegin + 1] = float(sq1 * std::sin(2.0 * kPi * u2));
        row[kRotationBegin + 2] = float(sq1 * std::cos(2.0 * kPi * u2));
        row[kRotationBegin + 3] = float(sq2 * std::sin(2.0 * kPi * u3));
    }

    std::vector<Camera> cams;
    cams.reserve(spec.n_cameras);
    for (std::size_t k = 0; k < spec.n_cameras; ++k) {
        double theta = 2.0 * kPi * double(k) / double(std::max<std::size_t>(1, spec.n_cameras));
        double ce = std::cos(spec.orbit_elevation), se = std::sin(spec.orbit_elevation);
        Eigen::Vector3d eye(spec.orbit_radius * ce * std::cos(theta),
                            spec.orbit_radius * se,
                            spec.orbit_radius * ce * std::sin(theta));
        Eigen::Vector3d fwd = (-eye).normalized();
        Eigen::Vector3d up(0.0, 1.0, 0.0);
        Eigen::Vector3d right = up.cross(fwd).normalized();
        Eigen::Vector3d down = fwd.cross(right);

        Camera cam;
        cam.width = spec.image_width;
        cam.height = spec.image_height;
        cam.fx = cam.fy = float(spec.focal);
        cam.cx = float(spec.image_width) / 2.0f;
        cam.cy = float(spec.image_height) / 2.0f;
        Eigen::Matrix3d rot;
        rot.row(0) = right;
        rot.row(1) = down;
        rot.row(2) = fwd;
        cam.world_to_camera.setIdentity();
        cam.world_to_camera.topLeftCorner<3, 3>() = rot.cast<float>();
        cam.world_to_camera.topRightCorner<3, 1>() = (-(rot * eye)).cast<float>();
        validate_camera(cam);
        cams.push_back(cam);
    }
    return {std::move(model), std::move(cams)};
}

FixturePaths write_fixture(const SceneSpec& spec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto [model, cams] = generate_scene(spec);
    FixturePaths paths{dir / "model.ply", dir / "cameras.json"};
    write_ply(model, paths.model_ply);
    save_cameras(cams, paths.cameras_json);
    return paths;
}

}  // namespace flexgs
