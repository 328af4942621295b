#pragma once

#include "dgs/scene.hpp"

#include <array>

namespace dgs {

// Real spherical harmonics up to degree 3 (Condon-Shortley phase, m = -l..l ordering).
namespace sh_const {
inline constexpr double c0 = 0.28209479177387814;
inline constexpr double c1 = 0.4886025119029199;
inline constexpr double c2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005, -1.0925484305920792,
                                 0.5462742152960396};
inline constexpr double c3[7] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658, 0.3731763325901154,
                                 -0.4570457994644658, 1.445305721320277, -0.5900435899266435};
}  // namespace sh_const

inline constexpr int sh_count(int degree) { return (degree + 1) * (degree + 1); }

/// Basis values Y_k(dir) and their partial derivatives w.r.t. the (unnormalized) components.
template <typename T> struct ShBasis {
    std::array<T, kShCoeffs> y{};
    std::array<Vec3<T>, kShCoeffs> dy{};
};

template <typename T> ShBasis<T> sh_basis(const Vec3<T>& d, int degree) {
    using namespace sh_const;
    ShBasis<T> b;
    for (auto& g : b.dy) g.setZero();
    const T x = d[0], y = d[1], z = d[2];
    b.y[0] = T(c0);
    if (degree < 1) return b;
    b.y[1] = -T(c1) * y;
    b.y[2] = T(c1) * z;
    b.y[3] = -T(c1) * x;
    b.dy[1] = Vec3<T>(0, -T(c1), 0);
    b.dy[2] = Vec3<T>(0, 0, T(c1));
    b.dy[3] = Vec3<T>(-T(c1), 0, 0);
    if (degree < 2) return b;
    const T xx = x * x, yy = y * y, zz = z * z;
    b.y[4] = T(c2[0]) * x * y;
    b.y[5] = T(c2[1]) * y * z;
    b.y[6] = T(c2[2]) * (T(2) * zz - xx - yy);
    b.y[7] = T(c2[3]) * x * z;
    b.y[8] = T(c2[4]) * (xx - yy);
    b.dy[4] = T(c2[0]) * Vec3<T>(y, x, 0);
    b.dy[5] = T(c2[1]) * Vec3<T>(0, z, y);
    b.dy[6] = T(c2[2]) * Vec3<T>(-T(2) * x, -T(2) * y, T(4) * z);
    b.dy[7] = T(c2[3]) * Vec3<T>(z, 0, x);
    b.dy[8] = T(c2[4]) * Vec3<T>(T(2) * x, -T(2) * y, 0);
    if (degree < 3) return b;
    b.y[9] = T(c3[0]) * y * (T(3) * xx - yy);
    b.y[10] = T(c3[1]) * x * y * z;
    b.y[11] = T(c3[2]) * y * (T(4) * zz - xx - yy);
    b.y[12] = T(c3[3]) * z * (T(2) * zz - T(3) * xx - T(3) * yy);
    b.y[13] = T(c3[4]) * x * (T(4) * zz - xx - yy);
    b.y[14] = T(c3[5]) * z * (xx - yy);
    b.y[15] = T(c3[6]) * x * (xx - T(3) * yy);
    b.dy[9] = T(c3[0]) * Vec3<T>(T(6) * x * y, T(3) * xx - T(3) * yy, 0);
    b.dy[10] = T(c3[1]) * Vec3<T>(y * z, x * z, x * y);
    b.dy[11] = T(c3[2]) * Vec3<T>(-T(2) * x * y, T(4) * zz - xx - T(3) * yy, T(8) * y * z);
    b.dy[12] = T(c3[3]) * Vec3<T>(-T(6) * x * z, -T(6) * y * z, T(6) * zz - T(3) * xx - T(3) * yy);
    b.dy[13] = T(c3[4]) * Vec3<T>(T(4) * zz - T(3) * xx - yy, -T(2) * x * y, T(8) * x * z);
    b.dy[14] = T(c3[5]) * Vec3<T>(T(2) * x * z, -T(2) * y * z, xx - yy);
    b.dy[15] = T(c3[6]) * Vec3<T>(T(3) * xx - T(3) * yy, -T(6) * x * y, 0);
    return b;
}

/// Color before the clamp: sum_k c_k Y_k(dir) + 0.5.
template <typename T> Vec3<T> eval_sh_unclamped(const ShCoeffs<T>& coeffs, const Vec3<T>& dir, int degree) {
    const ShBasis<T> b = sh_basis(dir, degree);
    Vec3<T> rgb = Vec3<T>::Constant(T(0.5));
    for (int k = 0; k < sh_count(degree); ++k) rgb += b.y[k] * coeffs.row(k).transpose();
    return rgb;
}

/// View-dependent color, clamped below at zero only. Coefficients above `degree` are ignored.
template <typename T> Vec3<T> eval_sh(const ShCoeffs<T>& coeffs, const Vec3<T>& dir, int degree) {
    return eval_sh_unclamped(coeffs, dir, std::clamp(degree, 0, kMaxShDegree)).cwiseMax(T(0));
}

template <typename T> struct ShGrad {
    ShCoeffs<T> d_coeffs = ShCoeffs<T>::Zero();
    Vec3<T> d_dir = Vec3<T>::Zero();
};

/// Backward of eval_sh given dL/drgb (post-clamp). `raw` is eval_sh_unclamped's result.
template <typename T>
ShGrad<T> eval_sh_backward(const ShCoeffs<T>& coeffs, const Vec3<T>& dir, int degree, const Vec3<T>& raw,
                           const Vec3<T>& d_rgb) {
    ShGrad<T> g;
    Vec3<T> d = d_rgb;
    for (int c = 0; c < 3; ++c)
        if (raw[c] < T(0)) d[c] = T(0);
    const ShBasis<T> b = sh_basis(dir, degree);
    for (int k = 0; k < sh_count(degree); ++k) {
        g.d_coeffs.row(k) = b.y[k] * d.transpose();
        g.d_dir += b.dy[k] * coeffs.row(k).dot(d.transpose());
    }
    return g;
}

/// DC coefficient that makes a degree-0 evaluation return `rgb`.
template <typename T> Vec3<T> rgb_to_dc(const Vec3<T>& rgb) { return (rgb.array() - T(0.5)) / T(sh_const::c0); }

}  // namespace dgs
