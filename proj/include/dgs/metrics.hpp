#pragma once

#include "dgs/core.hpp"

#include <array>
#include <numeric>

namespace dgs {

inline constexpr double kPsnrCap = 99.0;

/// 10 log10(1 / MSE) over every pixel and channel, unit dynamic range; capped at 99 dB.
template <typename T> double psnr(const Image<T>& a, const Image<T>& b) {
    require_same_shape(a, b, "psnr");
    if (a.size() == 0) throw ShapeError("psnr: empty image");
    double se = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        se += d * d;
    }
    const double mse = se / static_cast<double>(a.size());
    if (mse <= 0) return kPsnrCap;
    return std::min(kPsnrCap, -10.0 * std::log10(mse));
}

namespace ssim_detail {

inline constexpr int kWindow = 11;
inline constexpr double kSigma = 1.5;
inline constexpr double kC1 = 0.01 * 0.01;
inline constexpr double kC2 = 0.03 * 0.03;

inline const std::array<double, kWindow>& kernel() {
    static const std::array<double, kWindow> k = [] {
        std::array<double, kWindow> w{};
        double sum = 0;
        for (int i = 0; i < kWindow; ++i) {
            const double x = i - kWindow / 2;
            w[i] = std::exp(-x * x / (2 * kSigma * kSigma));
            sum += w[i];
        }
        for (auto& v : w) v /= sum;
        return w;
    }();
    return k;
}

/// Separable Gaussian filter on one plane with zero padding ("same" output size).
template <typename T> std::vector<T> blur(const std::vector<T>& in, int w, int h) {
    const auto& k = kernel();
    const int r = kWindow / 2;
    std::vector<T> tmp(in.size(), T(0)), out(in.size(), T(0));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            T s = T(0);
            for (int i = -r; i <= r; ++i) {
                const int xx = x + i;
                if (xx >= 0 && xx < w) s += T(k[i + r]) * in[static_cast<std::size_t>(y) * w + xx];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = s;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            T s = T(0);
            for (int i = -r; i <= r; ++i) {
                const int yy = y + i;
                if (yy >= 0 && yy < h) s += T(k[i + r]) * tmp[static_cast<std::size_t>(yy) * w + x];
            }
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    return out;
}

}  // namespace ssim_detail

template <typename T> struct SsimResult {
    double value = 0;
    Image<T> grad;  // d(mean SSIM)/d(first image); empty unless requested
};

/// Mean SSIM (11x11 Gaussian window, sigma 1.5, C1 = 0.01^2, C2 = 0.03^2), per channel then
/// averaged. Optionally returns the gradient with respect to `a`.
template <typename T> SsimResult<T> ssim_with_grad(const Image<T>& a, const Image<T>& b, bool want_grad) {
    using namespace ssim_detail;
    require_same_shape(a, b, "ssim");
    if (a.width < kWindow || a.height < kWindow) throw ShapeError("ssim: image smaller than the 11x11 window");
    const int w = a.width, h = a.height, nc = a.channels;
    const std::size_t np = a.pixel_count();
    SsimResult<T> res;
    if (want_grad) res.grad = Image<T>(w, h, nc);
    const T c1 = T(kC1), c2 = T(kC2);
    const T inv_n = T(1.0 / (static_cast<double>(np) * nc));
    double total = 0;
    std::vector<T> x(np), y(np), xx(np), yy(np), xy(np);
    for (int c = 0; c < nc; ++c) {
        for (std::size_t p = 0; p < np; ++p) {
            x[p] = a.data[p * nc + c];
            y[p] = b.data[p * nc + c];
            xx[p] = x[p] * x[p];
            yy[p] = y[p] * y[p];
            xy[p] = x[p] * y[p];
        }
        const auto mx = blur(x, w, h), my = blur(y, w, h);
        const auto mxx = blur(xx, w, h), myy = blur(yy, w, h), mxy = blur(xy, w, h);
        std::vector<T> g1, g11, g12;
        if (want_grad) g1.resize(np), g11.resize(np), g12.resize(np);
        for (std::size_t p = 0; p < np; ++p) {
            const T sx = mxx[p] - mx[p] * mx[p];
            const T sy = myy[p] - my[p] * my[p];
            const T sxy = mxy[p] - mx[p] * my[p];
            const T a1 = T(2) * mx[p] * my[p] + c1, a2 = T(2) * sxy + c2;
            const T b1 = mx[p] * mx[p] + my[p] * my[p] + c1, b2 = sx + sy + c2;
            const T s = (a1 * a2) / (b1 * b2);
            total += static_cast<double>(s);
            if (!want_grad) continue;
            const T d_sx = -s / b2;
            const T d_sxy = T(2) * s / a2;
            const T d_mx = s * (T(2) * my[p] / a1 - T(2) * mx[p] / b1) + d_sx * (-T(2) * mx[p]) + d_sxy * (-my[p]);
            g1[p] = d_mx * inv_n;
            g11[p] = d_sx * inv_n;
            g12[p] = d_sxy * inv_n;
        }
        if (want_grad) {
            // The window is symmetric, so the adjoint of the blur is the blur itself.
            const auto b1v = blur(g1, w, h), b11 = blur(g11, w, h), b12 = blur(g12, w, h);
            for (std::size_t p = 0; p < np; ++p)
                res.grad.data[p * nc + c] = b1v[p] + T(2) * x[p] * b11[p] + y[p] * b12[p];
        }
    }
    res.value = total / (static_cast<double>(np) * nc);
    return res;
}

template <typename T> double ssim(const Image<T>& a, const Image<T>& b) { return ssim_with_grad(a, b, false).value; }

template <typename T> double dssim(const Image<T>& a, const Image<T>& b) { return (1.0 - ssim(a, b)) / 2.0; }

struct FrameMetrics {
    std::string frame_id;
    double psnr = 0;
    double ssim = 0;
};

struct MetricSummary {
    double mean = 0;
    double std = 0;
};

/// Per-frame PSNR/SSIM plus aggregates. LPIPS is not computed.
struct MetricReport {
    std::vector<FrameMetrics> per_frame;

    MetricSummary summarize(double FrameMetrics::*field) const {
        MetricSummary s;
        if (per_frame.empty()) return s;
        for (const auto& f : per_frame) s.mean += f.*field;
        s.mean /= static_cast<double>(per_frame.size());
        for (const auto& f : per_frame) s.std += (f.*field - s.mean) * (f.*field - s.mean);
        s.std = std::sqrt(s.std / static_cast<double>(per_frame.size()));
        return s;
    }
    MetricSummary psnr() const { return summarize(&FrameMetrics::psnr); }
    MetricSummary ssim() const { return summarize(&FrameMetrics::ssim); }
};

}  // namespace dgs
