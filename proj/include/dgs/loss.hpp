#pragma once

#include "dgs/metrics.hpp"

namespace dgs {

template <typename T> struct LossResult {
    double total = 0;
    double l1 = 0;
    double dssim = 0;
    Image<T> grad;  // dL/d(rendered)
};

inline double combine_loss(double l1, double dssim, double lambda) { return (1.0 - lambda) * l1 + lambda * dssim; }

/// (1 - lambda) * L1 + lambda * (1 - SSIM) / 2, with its analytic gradient.
template <typename T> LossResult<T> photometric_loss(const Image<T>& rendered, const Image<T>& gt, double lambda) {
    require_same_shape(rendered, gt, "loss");
    LossResult<T> r;
    const std::size_t n = rendered.size();
    auto s = ssim_with_grad(rendered, gt, true);
    r.dssim = (1.0 - s.value) / 2.0;
    r.grad = Image<T>(rendered.width, rendered.height, rendered.channels);
    const T w1 = T((1.0 - lambda) / static_cast<double>(n));
    const T ws = T(-lambda / 2.0);
    double l1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const T d = rendered.data[i] - gt.data[i];
        l1 += std::abs(static_cast<double>(d));
        const T sign = d > T(0) ? T(1) : (d < T(0) ? T(-1) : T(0));
        r.grad.data[i] = w1 * sign + ws * s.grad.data[i];
    }
    r.l1 = l1 / static_cast<double>(n);
    r.total = combine_loss(r.l1, r.dssim, lambda);
    return r;
}

}  // namespace dgs
