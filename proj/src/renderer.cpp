#include "flexgs/renderer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "flexgs/parallel.hpp"

namespace flexgs {

namespace {

// Real spherical harmonics basis constants, degrees 0..3.
constexpr float kSh0 = 0.28209479177387814f;
constexpr float kSh1 = 0.4886025119029199f;
constexpr float kSh2[5] = {1.0925484305920792f, -1.0925484305920792f, 0.31539156525252005f,
                           -1.0925484305920792f, 0.5462742152960396f};
constexpr float kSh3[7] = {-0.5900435899266435f, 2.890611442640554f,  -0.4570457994644658f,
                           0.3731763325901154f,  -0.4570457994644658f, 1.445305721320277f,
                           -0.5900435899266435f};

struct Splat {
    Eigen::Vector2f mean;
    Eigen::Vector3f conic;  // inverse covariance (a, b, c) with [[a,b],[b,c]]
    Eigen::Vector3f color;
    float opacity;
    float depth;
    int x0, x1, y0, y1;     // inclusive pixel bounds of the footprint
    uint32_t row;
};

bool splat_order(const Splat& a, const Splat& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    if (a.mean.x() != b.mean.x()) return a.mean.x() < b.mean.x();
    if (a.mean.y() != b.mean.y()) return a.mean.y() < b.mean.y();
    return a.opacity < b.opacity;
}

}  // namespace

ActivatedGaussian activate_row(const GaussianModel& model, std::size_t row) {
    const float* r = model.row(row);
    ActivatedGaussian g;
    g.position = Eigen::Vector3f(r[0], r[1], r[2]);
    g.scale = Eigen::Vector3f(static_cast<float>(activate_scale(r[kScaleBegin])),
                              static_cast<float>(activate_scale(r[kScaleBegin + 1])),
                              static_cast<float>(activate_scale(r[kScaleBegin + 2])));
    Eigen::Quaternionf q(r[kRotationBegin], r[kRotationBegin + 1], r[kRotationBegin + 2],
                         r[kRotationBegin + 3]);
    g.rotation = q.normalized();
    g.opacity = static_cast<float>(activate_opacity(r[kOpacityChannel]));
    return g;
}

std::optional<ProjectedGaussian> project_gaussian(const ActivatedGaussian& g, const Camera& cam) {
    Eigen::Matrix3f w = cam.rotation();
    Eigen::Vector3f t = w * g.position + cam.translation();
    if (!(t.z() >= kNearPlane)) return std::nullopt;

    ProjectedGaussian out;
    out.depth = t.z();
    out.mean2d = Eigen::Vector2f(cam.fx * t.x() / t.z() + cam.cx,
                                 cam.fy * t.y() / t.z() + cam.cy);

    Eigen::Matrix3f m = g.rotation.toRotationMatrix() * g.scale.asDiagonal();
    Eigen::Matrix3f cov3d = m * m.transpose();

    float inv_z = 1.0f / t.z();
    Eigen::Matrix<float, 2, 3> jac;
    jac << cam.fx * inv_z, 0.0f, -cam.fx * t.x() * inv_z * inv_z,
           0.0f, cam.fy * inv_z, -cam.fy * t.y() * inv_z * inv_z;

    out.cov2d = jac * w * cov3d * w.transpose() * jac.transpose();
    out.cov2d(0, 0) += kLowPass;
    out.cov2d(1, 1) += kLowPass;
    return out;
}

Eigen::Vector3f evaluate_sh(const float* sh_base, const float* sh_adv,
                            const Eigen::Vector3f& dir) {
    Eigen::Vector3f rgb(0.5f + kSh0 * sh_base[0], 0.5f + kSh0 * sh_base[1],
                        0.5f + kSh0 * sh_base[2]);
    if (!sh_adv) return rgb;

    const float x = dir.x(), y = dir.y(), z = dir.z();
    const float xx = x * x, yy = y * y, zz = z * z;
    float basis[15];
    basis[0] = -kSh1 * y;
    basis[1] = kSh1 * z;
    basis[2] = -kSh1 * x;
    basis[3] = kSh2[0] * x * y;
    basis[4] = kSh2[1] * y * z;
    basis[5] = kSh2[2] * (2.0f * zz - xx - yy);
    basis[6] = kSh2[3] * x * z;
    basis[7] = kSh2[4] * (xx - yy);
    basis[8] = kSh3[0] * y * (3.0f * xx - yy);
    basis[9] = kSh3[1] * x * y * z;
    basis[10] = kSh3[2] * y * (4.0f * zz - xx - yy);
    basis[11] = kSh3[3] * z * (2.0f * zz - 3.0f * xx - 3.0f * yy);
    basis[12] = kSh3[4] * x * (4.0f * zz - xx - yy);
    basis[13] = kSh3[5] * z * (xx - yy);
    basis[14] = kSh3[6] * x * (xx - 3.0f * yy);

    // 45 coefficients laid out channel-major: 15 for R, then G, then B.
    for (int c = 0; c < 3; ++c) {
        float acc = 0.0f;
        const float* coeff = sh_adv + c * 15;
        for (int k = 0; k < 15; ++k) acc += basis[k] * coeff[k];
        rgb[c] += acc;
    }
    return rgb;
}

ImageBuffer render(const GaussianModel& model, const Camera& cam, RenderStats* stats) {
    validate_camera(cam);
    ImageBuffer img(cam.width, cam.height);
    if (stats) {
        if (stats->hits.size() != model.rows) stats->hits.assign(model.rows, 0);
        stats->views_rendered += 1;
    }
    if (model.rows == 0) return img;

    const Eigen::Vector3f cam_pos = cam.position();
    std::vector<Splat> splats(model.rows);
    std::vector<uint8_t> keep(model.rows, 0);

    parallel_chunks(model.rows, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            ActivatedGaussian g = activate_row(model, i);
            auto proj = project_gaussian(g, cam);
            if (!proj) continue;

            const Eigen::Matrix2f& c2 = proj->cov2d;
            float det = c2(0, 0) * c2(1, 1) - c2(0, 1) * c2(0, 1);
            if (!(det > 0.0f) || !std::isfinite(det)) continue;
            float inv_det = 1.0f / det;

            float mid = 0.5f * (c2(0, 0) + c2(1, 1));
            float lam_max = mid + std::sqrt(std::max(0.0f, mid * mid - det));
            float radius = kFootprintSigma * std::sqrt(lam_max);

            // Pixel sample points sit at integer coordinates.
            int x0 = int(std::ceil(proj->mean2d.x() - radius));
            int x1 = int(std::floor(proj->mean2d.x() + radius));
            int y0 = int(std::ceil(proj->mean2d.y() - radius));
            int y1 = int(std::floor(proj->mean2d.y() + radius));
            x0 = std::max(x0, 0);
            y0 = std::max(y0, 0);
            x1 = std::min(x1, cam.width - 1);
            y1 = std::min(y1, cam.height - 1);
            if (x0 > x1 || y0 > y1) continue;

            Splat s;
            s.mean = proj->mean2d;
            s.conic = Eigen::Vector3f(c2(1, 1) * inv_det, -c2(0, 1) * inv_det,
                                      c2(0, 0) * inv_det);
            const float* row = model.row(i);
            Eigen::Vector3f dir = (g.position - cam_pos).normalized();
            Eigen::Vector3f rgb = evaluate_sh(
                row + kShBaseBegin, model.masked(i) ? nullptr : row + kShAdvBegin, dir);
            s.color = rgb.cwiseMax(0.0f);
            s.opacity = g.opacity;
            s.depth = proj->depth;
            s.x0 = x0;
            s.x1 = x1;
            s.y0 = y0;
            s.y1 = y1;
            s.row = uint32_t(i);
            splats[i] = s;
            keep[i] = 1;
        }
    });

    const int tiles_x = (cam.width + kTileSize - 1) / kTileSize;
    const int tiles_y = (cam.height + kTileSize - 1) / kTileSize;
    const std::size_t tile_count = std::size_t(tiles_x) * tiles_y;

    // Bin sequentially in row order so per-tile lists have a fixed base
    // order; the per-tile stable sort then yields one canonical ordering.
    std::vector<std::vector<uint32_t>> tile_bins(tile_count);
    for (std::size_t i = 0; i < model.rows; ++i) {
        if (!keep[i]) continue;
        const Splat& s = splats[i];
        int tx0 = s.x0 / kTileSize, tx1 = s.x1 / kTileSize;
        int ty0 = s.y0 / kTileSize, ty1 = s.y1 / kTileSize;
        for (int ty = ty0; ty <= ty1; ++ty)
            for (int tx = tx0; tx <= tx1; ++tx)
                tile_bins[std::size_t(ty) * tiles_x + tx].push_back(uint32_t(i));
    }

    const int workers = worker_count();
    std::vector<std::vector<uint64_t>> hit_slabs;
    if (stats) hit_slabs.assign(std::size_t(workers), {});
    std::atomic<int> slab_cursor{0};

    parallel_chunks(tile_count, [&](std::size_t begin, std::size_t end) {
        std::vector<uint64_t>* hits = nullptr;
        if (stats) {
            int slab = slab_cursor.fetch_add(1);
            hit_slabs[std::size_t(slab)].assign(model.rows, 0);
            hits = &hit_slabs[std::size_t(slab)];
        }
        std::vector<uint32_t> order;
        for (std::size_t tile = begin; tile < end; ++tile) {
            const auto& bin = tile_bins[tile];
            if (bin.empty()) continue;
            order.assign(bin.begin(), bin.end());
            std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
                return splat_order(splats[a], splats[b]);
            });

            int px0 = int(tile % std::size_t(tiles_x)) * kTileSize;
            int py0 = int(tile / std::size_t(tiles_x)) * kTileSize;
            int px1 = std::min(px0 + kTileSize, cam.width);
            int py1 = std::min(py0 + kTileSize, cam.height);

            for (int y = py0; y < py1; ++y) {
                for (int x = px0; x < px1; ++x) {
                    float T = 1.0f;
                    float acc[3] = {0.0f, 0.0f, 0.0f};
                    for (uint32_t idx : order) {
                        const Splat& s = splats[idx];
                        if (x < s.x0 || x > s.x1 || y < s.y0 || y > s.y1) continue;
                        float dx = float(x) - s.mean.x();
                        float dy = float(y) - s.mean.y();
                        float d2 = s.conic.x() * dx * dx + 2.0f * s.conic.y() * dx * dy +
                                   s.conic.z() * dy * dy;
                        if (d2 > kFootprintSigma * kFootprintSigma || d2 < 0.0f) continue;
                        float alpha = s.opacity * std::exp(-0.5f * d2);
                        if (alpha < kAlphaFloor) continue;
                        float w = T * alpha;
                        acc[0] += w * s.color.x();
                        acc[1] += w * s.color.y();
                        acc[2] += w * s.color.z();
                        if (hits) (*hits)[s.row] += 1;
                        T *= 1.0f - alpha;
                        if (T < kTransmittanceFloor) break;
                    }
                    float* px = img.pixel(x, y);
                    px[0] = std::min(1.0f, acc[0]);
                    px[1] = std::min(1.0f, acc[1]);
                    px[2] = std::min(1.0f, acc[2]);
                }
            }
        }
    });

    if (stats) {
        for (const auto& slab : hit_slabs) {
            if (slab.empty()) continue;
            for (std::size_t i = 0; i < model.rows; ++i) stats->hits[i] += slab[i];
        }
    }
    return img;
}

}  // namespace flexgs
