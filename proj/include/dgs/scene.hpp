#pragma once

#include "dgs/core.hpp"

#include <array>
#include <string>
#include <vector>

namespace dgs {

inline constexpr int kMaxShDegree = 3;
inline constexpr int kShCoeffs = 16;

template <typename T> using ShCoeffs = Eigen::Matrix<T, kShCoeffs, 3>;

/// One anisotropic Gaussian in unconstrained parameter space.
///
/// `rot` is a (w, x, y, z) quaternion that is normalized on use, `log_scale` is
/// exponentiated and `opacity_logit` goes through the logistic function, so any
/// finite parameter vector realizes a valid primitive.
template <typename T> struct Gaussian {
    Vec3<T> mu = Vec3<T>::Zero();
    Vec4<T> rot = Vec4<T>(T(1), T(0), T(0), T(0));
    Vec3<T> log_scale = Vec3<T>::Zero();
    T opacity_logit = T(0);
    ShCoeffs<T> sh = ShCoeffs<T>::Zero();

    template <typename U> Gaussian<U> cast() const {
        Gaussian<U> g;
        g.mu = mu.template cast<U>();
        g.rot = rot.template cast<U>();
        g.log_scale = log_scale.template cast<U>();
        g.opacity_logit = static_cast<U>(opacity_logit);
        g.sh = sh.template cast<U>();
        return g;
    }

    bool finite() const {
        return mu.allFinite() && rot.allFinite() && log_scale.allFinite() && std::isfinite(opacity_logit) &&
               sh.allFinite() && rot.norm() > T(0);
    }
};

/// Per-Gaussian attribute increments predicted by the deformation field.
template <typename T> struct GaussianDelta {
    Vec3<T> d_mu = Vec3<T>::Zero();
    Vec4<T> d_rot = Vec4<T>::Zero();
    Vec3<T> d_log_scale = Vec3<T>::Zero();
};

template <typename T> using Deltas = std::vector<GaussianDelta<T>>;

/// Deltas are added before activation; the quaternion is renormalized when realized.
template <typename T> Gaussian<T> apply_delta(const Gaussian<T>& g, const GaussianDelta<T>& d) {
    Gaussian<T> out = g;
    out.mu += d.d_mu;
    out.rot += d.d_rot;
    out.log_scale += d.d_log_scale;
    return out;
}

template <typename T> Mat3<T> rotation_from_unit_quat(const Vec4<T>& q) {
    const T w = q[0], x = q[1], y = q[2], z = q[3];
    Mat3<T> r;
    r << T(1) - T(2) * (y * y + z * z), T(2) * (x * y - w * z), T(2) * (x * z + w * y),
        T(2) * (x * y + w * z), T(1) - T(2) * (x * x + z * z), T(2) * (y * z - w * x),
        T(2) * (x * z - w * y), T(2) * (y * z + w * x), T(1) - T(2) * (x * x + y * y);
    return r;
}

template <typename T> Vec4<T> normalized_quat(const Vec4<T>& q) {
    const T n = q.norm();
    if (!(n > T(0))) return Vec4<T>(T(1), T(0), T(0), T(0));
    return q / n;
}

/// Hamilton product a * b, (w, x, y, z) layout.
template <typename T> Vec4<T> quat_mul(const Vec4<T>& a, const Vec4<T>& b) {
    return Vec4<T>(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
                   a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
                   a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
                   a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]);
}

template <typename T> Vec4<T> quat_from_axis_angle(const Vec3<T>& axis, T angle) {
    const Vec3<T> a = axis.normalized();
    const T s = std::sin(angle / T(2));
    return Vec4<T>(std::cos(angle / T(2)), a[0] * s, a[1] * s, a[2] * s);
}

template <typename T> struct Activated {
    T sigma;
    Vec3<T> scale;
    Mat3<T> rotation;
};

template <typename T> Activated<T> activate(const Gaussian<T>& g) {
    return {sigmoid(g.opacity_logit), g.log_scale.array().exp().matrix(),
            rotation_from_unit_quat(normalized_quat(g.rot))};
}

/// Sigma = R S S^T R^T, symmetrized to kill rounding asymmetry.
template <typename T> Mat3<T> realize_covariance(const Gaussian<T>& g) {
    const Activated<T> a = activate(g);
    const Mat3<T> m = a.rotation * a.scale.asDiagonal();
    const Mat3<T> cov = m * m.transpose();
    return T(0.5) * (cov + cov.transpose());
}

/// Instrument kinematic state: translation, orientation and jaw aperture (radians).
struct KinematicState {
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    Eigen::Vector4d rotation = Eigen::Vector4d(1, 0, 0, 0);
    double jaw_angle = 0.0;
};

struct Intrinsics {
    double fx = 1, fy = 1, cx = 0, cy = 0;
};

/// World-to-camera rigid transform plus pinhole intrinsics. Camera looks down +z.
struct CameraPose {
    Eigen::Matrix4d world_to_camera = Eigen::Matrix4d::Identity();
    Intrinsics intrinsics;
    int width = 0;
    int height = 0;

    Eigen::Matrix3d rotation() const { return world_to_camera.topLeftCorner<3, 3>(); }
    Eigen::Vector3d translation() const { return world_to_camera.topRightCorner<3, 1>(); }
    Eigen::Vector3d center() const { return -rotation().transpose() * translation(); }

    void validate() const {
        const Eigen::Matrix3d r = rotation();
        if (!world_to_camera.allFinite()) throw Error("camera: non-finite world_to_camera");
        if (!(r * r.transpose() - Eigen::Matrix3d::Identity()).isZero(1e-6) || r.determinant() < 0)
            throw Error("camera: rotation block is not orthonormal");
        const auto& k = intrinsics;
        if (!(k.fx > 0 && k.fy > 0)) throw Error("camera: focal lengths must be positive");
        if (width <= 0 || height <= 0) throw Error("camera: image size must be positive");
        if (!(k.cx >= 0 && k.cx < width && k.cy >= 0 && k.cy < height))
            throw Error("camera: principal point outside the image");
    }

    /// Builds a camera at `eye` looking at `target` with image-up roughly along -`up`.
    static CameraPose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target, const Eigen::Vector3d& up,
                              Intrinsics k, int w, int h) {
        const Eigen::Vector3d fwd = (target - eye).normalized();
        const Eigen::Vector3d right = fwd.cross(up).normalized();
        const Eigen::Vector3d down = fwd.cross(right);
        Eigen::Matrix3d r;
        r.row(0) = right.transpose();
        r.row(1) = down.transpose();
        r.row(2) = fwd.transpose();
        CameraPose cam;
        cam.world_to_camera.setIdentity();
        cam.world_to_camera.topLeftCorner<3, 3>() = r;
        cam.world_to_camera.topRightCorner<3, 1>() = -r * eye;
        cam.intrinsics = k;
        cam.width = w;
        cam.height = h;
        return cam;
    }
};

struct FrameRecord {
    ImageF image;
    CameraPose camera;
    KinematicState kinematics;
    std::string frame_id;
};

enum class Phase { PhaseOne, PhaseTwo };

inline const char* phase_name(Phase p) { return p == Phase::PhaseOne ? "PhaseOne" : "PhaseTwo"; }

/// Screen-space positional gradient statistics driving densification.
template <typename T> struct GradAccum {
    T norm_sum = T(0);
    int count = 0;
    Vec3<T> direction_sum = Vec3<T>::Zero();  // world-space position gradient, summed
};

/// Canonical Gaussian population plus densification bookkeeping.
template <typename T> struct Scene {
    std::vector<Gaussian<T>> gaussians;
    std::vector<GradAccum<T>> grad_accum;
    Phase phase = Phase::PhaseOne;

    std::size_t size() const { return gaussians.size(); }
    int active_sh_degree() const { return sh_degree_; }

    /// The active degree only ever grows.
    void raise_sh_degree(int degree) { sh_degree_ = std::clamp(std::max(sh_degree_, degree), 0, kMaxShDegree); }

    void reset_accumulators() { grad_accum.assign(gaussians.size(), GradAccum<T>{}); }

    void add(const Gaussian<T>& g) {
        gaussians.push_back(g);
        grad_accum.emplace_back();
    }

    template <typename U> Scene<U> cast() const {
        Scene<U> s;
        s.gaussians.reserve(size());
        for (const auto& g : gaussians) s.gaussians.push_back(g.template cast<U>());
        s.reset_accumulators();
        s.phase = phase;
        s.raise_sh_degree(sh_degree_);
        return s;
    }

private:
    int sh_degree_ = 0;
};

}  // namespace dgs
