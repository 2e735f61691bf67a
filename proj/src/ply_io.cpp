#include "flexgs/ply_io.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace flexgs {

namespace {

std::vector<std::string> property_names() {
    std::vector<std::string> names = {"x", "y", "z", "nx", "ny", "nz"};
    for (int k = 0; k < 3; ++k) names.push_back("f_dc_" + std::to_string(k));
    for (int k = 0; k < 45; ++k) names.push_back("f_rest_" + std::to_string(k));
    names.push_back("opacity");
    for (int k = 0; k < 3; ++k) names.push_back("scale_" + std::to_string(k));
    for (int k = 0; k < 4; ++k) names.push_back("rot_" + std::to_string(k));
    return names;
}

std::string header_text(std::size_t vertex_count) {
    std::ostringstream os;
    os << "ply\n"
       << "format binary_little_endian 1.0\n"
       << "element vertex " << vertex_count << "\n";
    for (const auto& n : property_names()) os << "property float " << n << "\n";
    os << "end_header\n";
    return os.str();
}

// Column of each model channel within the 62-property vertex record.
constexpr std::size_t file_column(std::size_t channel) {
    return channel < 3 ? channel : channel + 3;  // skip nx, ny, nz
}

}  // namespace

std::size_t ply_header_size(std::size_t vertex_count) {
    return header_text(vertex_count).size();
}

GaussianModel load_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());

    std::string line;
    auto next_line = [&]() {
        if (!std::getline(in, line)) throw FormatError(path.string() + ": truncated header");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };

    if (next_line() != "ply") throw FormatError(path.string() + ": not a ply file");
    if (next_line() != "format binary_little_endian 1.0")
        throw FormatError(path.string() + ": unsupported ply format (need binary_little_endian 1.0)");

    std::size_t vertex_count = 0;
    bool have_vertex = false;
    std::vector<std::string> props;
    while (next_line() != "end_header") {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "comment") continue;
        if (tok == "element") {
            std::string name;
            ls >> name >> vertex_count;
            if (name != "vertex")
                throw FormatError(path.string() + ": unsupported element '" + name + "'");
            have_vertex = true;
        } else if (tok == "property") {
            std::string type, name;
            ls >> type >> name;
            if (type != "float")
                throw FormatError(path.string() + ": property '" + name + "' is not float");
            props.push_back(name);
        } else {
            throw FormatError(path.string() + ": unexpected header line '" + line + "'");
        }
    }
    if (!have_vertex) throw FormatError(path.string() + ": missing vertex element");

    const auto expected = property_names();
    if (props != expected) {
        std::string msg = path.string() + ": property list mismatch (expected " +
                          std::to_string(expected.size()) + " canonical properties, got " +
                          std::to_string(props.size()) + ")";
        for (std::size_t i = 0; i < std::min(props.size(), expected.size()); ++i) {
            if (props[i] != expected[i]) {
                msg += "; first difference at index " + std::to_string(i) + ": '" + props[i] +
                       "' vs '" + expected[i] + "'";
                break;
            }
        }
        throw FormatError(msg);
    }

    GaussianModel model;
    model.resize(vertex_count);
    std::vector<float> record(kPlyPropertyCount);
    for (std::size_t r = 0; r < vertex_count; ++r) {
        in.read(reinterpret_cast<char*>(record.data()),
                static_cast<std::streamsize>(record.size() * sizeof(float)));
        if (!in)
            throw FormatError(path.string() + ": truncated payload at row " + std::to_string(r));
        float* row = model.row(r);
        for (std::size_t c = 0; c < kChannelCount; ++c) {
            float v = record[file_column(c)];
            if (!std::isfinite(v))
                throw FormatError(path.string() + ": non-finite value at row " +
                                  std::to_string(r) + ", property " +
                                  expected[file_column(c)]);
            row[c] = v;
        }
    }
    return model;
}

void write_ply(const GaussianModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    const std::string header = header_text(model.rows);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));

    std::vector<float> record(kPlyPropertyCount, 0.0f);
    for (std::size_t r = 0; r < model.rows; ++r) {
        const float* row = model.row(r);
        std::fill(record.begin(), record.end(), 0.0f);
        for (std::size_t c = 0; c < kChannelCount; ++c) record[file_column(c)] = row[c];
        if (model.masked(r)) {
            for (std::size_t c = kShAdvBegin; c < kShAdvBegin + kShAdvCount; ++c)
                record[file_column(c)] = 0.0f;
        }
        out.write(reinterpret_cast<const char*>(record.data()),
                  static_cast<std::streamsize>(record.size() * sizeof(float)));
    }
    if (!out) throw FormatError("short write to " + path.string());
}

}  // namespace flexgs
