#include "flexgs/camera.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "flexgs/ply_io.hpp"

namespace flexgs {

void validate_camera(const Camera& cam) {
    if (cam.width <= 0 || cam.height <= 0)
        throw FormatError("camera: image dimensions must be positive");
    if (!(cam.fx > 0.0f) || !(cam.fy > 0.0f))
        throw FormatError("camera: focal lengths must be positive");
    if (!cam.world_to_camera.allFinite())
        throw FormatError("camera: non-finite world_to_camera");
    Eigen::Matrix3f r = cam.rotation();
    if (((r * r.transpose()) - Eigen::Matrix3f::Identity()).cwiseAbs().maxCoeff() > 1e-4f)
        throw FormatError("camera: rotation block is not orthonormal");
    Eigen::RowVector4f bottom = cam.world_to_camera.bottomRows<1>();
    if ((bottom - Eigen::RowVector4f(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-6f)
        throw FormatError("camera: bottom row of world_to_camera must be [0 0 0 1]");
}

std::vector<Camera> load_cameras(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": bad camera json: " + e.what());
    }
    if (!j.is_array()) throw FormatError(path.string() + ": camera file must be a JSON array");
    std::vector<Camera> cams;
    cams.reserve(j.size());
    for (const auto& e : j) {
        Camera c;
        try {
            c.width = e.at("width").get<int>();
            c.height = e.at("height").get<int>();
            c.fx = e.at("fx").get<float>();
            c.fy = e.at("fy").get<float>();
            c.cx = e.at("cx").get<float>();
            c.cy = e.at("cy").get<float>();
            const auto& m = e.at("world_to_camera");
            if (!m.is_array() || m.size() != 16)
                throw FormatError("world_to_camera must hold 16 floats");
            for (int i = 0; i < 16; ++i)
                c.world_to_camera(i / 4, i % 4) = m[i].get<float>();
        } catch (const nlohmann::json::exception& ex) {
            throw FormatError(path.string() + ": bad camera entry: " + ex.what());
        }
        validate_camera(c);
        cams.push_back(c);
    }
    return cams;
}

void save_cameras(const std::vector<Camera>& cams, const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : cams) {
        nlohmann::json e;
        e["width"] = c.width;
        e["height"] = c.height;
        e["fx"] = c.fx;
        e["fy"] = c.fy;
        e["cx"] = c.cx;
        e["cy"] = c.cy;
        std::vector<float> m(16);
        for (int i = 0; i < 16; ++i) m[i] = c.world_to_camera(i / 4, i % 4);
        e["world_to_camera"] = m;
        j.push_back(e);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace flexgs
