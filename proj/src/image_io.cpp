#include "flexgs/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "flexgs/ply_io.hpp"

namespace flexgs {

void write_png(const ImageBuffer& img, const std::filesystem::path& path) {
    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp) throw FormatError("cannot write " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        std::fclose(fp);
        throw FormatError("png encode failed for " + path.string());
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(std::size_t(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const float* p = img.pixel(x, y);
            for (int c = 0; c < 3; ++c) {
                float v = std::fmin(1.0f, std::fmax(0.0f, p[c]));
                row[std::size_t(x) * 3 + c] = png_byte(std::lround(v * 255.0f));
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

void write_pfm(const ImageBuffer& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out << "PF\n" << img.width << " " << img.height << "\n-1.0\n";
    // PFM stores rows bottom to top.
    for (int y = img.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(img.pixel(0, y)),
                  std::streamsize(img.width) * 3 * sizeof(float));
    if (!out) throw FormatError("short write to " + path.string());
}

ImageBuffer read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::string tag;
    int w = 0, h = 0;
    float scale = 0.0f;
    in >> tag >> w >> h >> scale;
    if (tag != "PF" || w <= 0 || h <= 0 || scale >= 0.0f)
        throw FormatError(path.string() + ": unsupported pfm header");
    in.get();  // single whitespace after the scale line
    ImageBuffer img(w, h);
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(img.pixel(0, y)), std::streamsize(w) * 3 * sizeof(float));
        if (!in) throw FormatError(path.string() + ": truncated pfm payload");
    }
    return img;
}

}  // namespace flexgs
