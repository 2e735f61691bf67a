#include "flexgs/metrics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "flexgs/renderer.hpp"

namespace flexgs {

namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("image shape mismatch");
}

constexpr int kWin = 11;
constexpr double kWinSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

const std::array<double, kWin>& window_taps() {
    static const std::array<double, kWin> taps = [] {
        std::array<double, kWin> t{};
        double sum = 0.0;
        for (int i = 0; i < kWin; ++i) {
            double d = i - (kWin - 1) / 2.0;
            t[i] = std::exp(-(d * d) / (2.0 * kWinSigma * kWinSigma));
            sum += t[i];
        }
        for (double& v : t) v /= sum;
        return t;
    }();
    return taps;
}

// Separable valid-mode filter of one channel; out has (w-10) x (h-10) taps.
void filter_channel(const ImageBuffer& img, int channel, std::vector<double>& out) {
    const auto& taps = window_taps();
    const int w = img.width, h = img.height;
    const int ow = w - kWin + 1, oh = h - kWin + 1;
    std::vector<double> rows(std::size_t(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWin; ++k) acc += taps[k] * img.pixel(x + k, y)[channel];
            rows[std::size_t(y) * ow + x] = acc;
        }
    }
    out.resize(std::size_t(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWin; ++k) acc += taps[k] * rows[std::size_t(y + k) * ow + x];
            out[std::size_t(y) * ow + x] = acc;
        }
    }
}

void filter_product(const ImageBuffer& a, const ImageBuffer& b, int channel,
                    std::vector<double>& out) {
    const auto& taps = window_taps();
    const int w = a.width, h = a.height;
    const int ow = w - kWin + 1, oh = h - kWin + 1;
    std::vector<double> rows(std::size_t(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWin; ++k)
                acc += taps[k] * double(a.pixel(x + k, y)[channel]) * b.pixel(x + k, y)[channel];
            rows[std::size_t(y) * ow + x] = acc;
        }
    }
    out.resize(std::size_t(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWin; ++k) acc += taps[k] * rows[std::size_t(y + k) * ow + x];
            out[std::size_t(y) * ow + x] = acc;
        }
    }
}

}  // namespace

double mse(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b);
    if (a.rgb.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rgb.size(); ++i) {
        double d = double(a.rgb[i]) - double(b.rgb[i]);
        acc += d * d;
    }
    return acc / double(a.rgb.size());
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    double m = mse(a, b);
    if (m < 1e-10) return kPsnrCapDb;
    return 10.0 * std::log10(1.0 / m);
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b);
    if (a.width < kWin || a.height < kWin)
        throw std::invalid_argument("ssim: image sides must be >= 11");

    double total = 0.0;
    std::vector<double> mu_a, mu_b, aa, bb, ab;
    for (int c = 0; c < 3; ++c) {
        filter_channel(a, c, mu_a);
        filter_channel(b, c, mu_b);
        filter_product(a, a, c, aa);
        filter_product(b, b, c, bb);
        filter_product(a, b, c, ab);
        double acc = 0.0;
        for (std::size_t i = 0; i < mu_a.size(); ++i) {
            double ma = mu_a[i], mb = mu_b[i];
            double va = aa[i] - ma * ma;
            double vb = bb[i] - mb * mb;
            double cov = ab[i] - ma * mb;
            acc += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) /
                   ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
        }
        total += acc / double(mu_a.size());
    }
    return total / 3.0;
}

QualityReport mean_quality(const GaussianModel& reference, const GaussianModel& candidate,
                           const std::vector<Camera>& cameras) {
    std::vector<ImageBuffer> views;
    views.reserve(cameras.size());
    for (const auto& cam : cameras) views.push_back(render(reference, cam));
    return mean_quality_vs(views, candidate, cameras);
}

QualityReport mean_quality_vs(const std::vector<ImageBuffer>& reference_views,
                              const GaussianModel& candidate,
                              const std::vector<Camera>& cameras) {
    if (reference_views.size() != cameras.size())
        throw std::invalid_argument("mean_quality: view/camera count mismatch");
    if (cameras.empty()) throw std::invalid_argument("mean_quality: no cameras");
    double psnr_acc = 0.0, ssim_acc = 0.0;
    for (std::size_t i = 0; i < cameras.size(); ++i) {
        ImageBuffer got = render(candidate, cameras[i]);
        psnr_acc += psnr(reference_views[i], got);
        ssim_acc += ssim(reference_views[i], got);
    }
    QualityReport q;
    q.psnr_db = psnr_acc / double(cameras.size());
    q.ssim = ssim_acc / double(cameras.size());
    q.mse = std::pow(10.0, -q.psnr_db / 10.0);
    return q;
}

SizeReport compression_ratio(uint64_t original_bytes, uint64_t compressed_bytes) {
    if (compressed_bytes == 0 || original_bytes == 0)
        throw std::invalid_argument("compression_ratio: byte counts must be positive");
    SizeReport r;
    r.ratio = double(original_bytes) / double(compressed_bytes);
    r.reduction_pct = 100.0 * (1.0 - double(compressed_bytes) / double(original_bytes));
    return r;
}

}  // namespace flexgs
