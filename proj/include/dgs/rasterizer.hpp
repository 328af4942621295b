#pragma once

#include "dgs/scene.hpp"
#include "dgs/sh.hpp"

#include <numeric>
#include <optional>

namespace dgs {

namespace raster {
inline constexpr double kNearPlane = 0.01;
inline constexpr double kLowPass = 0.3;  // added to the 2D covariance diagonal
inline constexpr double kAlphaMax = 0.99;
inline constexpr double kAlphaMin = 1.0 / 255.0;
inline constexpr double kTransmittanceMin = 1e-4;
inline constexpr double kGuardSigmas = 3.0;
inline constexpr int kTile = 16;
}  // namespace raster

/// A Gaussian projected to the image plane. Pixel centers sit at integer coordinates.
template <typename T> struct Splat2D {
    Vec2<T> uv = Vec2<T>::Zero();
    Mat2<T> cov2d = Mat2<T>::Identity();  // includes the low-pass term
    Mat2<T> conic = Mat2<T>::Identity();  // inverse of cov2d
    T depth = T(0);
    Vec3<T> rgb = Vec3<T>::Zero();
    T alpha_base = T(0);
    T radius = T(0);  // pixel radius beyond which alpha < 1/255
    int index = -1;   // source Gaussian

    static Splat2D from_cov(const Vec2<T>& uv, const Mat2<T>& cov, T depth, const Vec3<T>& rgb, T alpha) {
        Splat2D s;
        s.uv = uv;
        s.cov2d = cov;
        s.conic = cov.inverse();
        s.depth = depth;
        s.rgb = rgb;
        s.alpha_base = alpha;
        return s;
    }
};

/// Camera quantities converted once per render.
template <typename T> struct CameraView {
    Mat3<T> rot;
    Vec3<T> trans;
    Vec3<T> center;
    T fx, fy, cx, cy;
    int width, height;

    explicit CameraView(const CameraPose& cam)
        : rot(cam.rotation().cast<T>()),
          trans(cam.translation().cast<T>()),
          center(cam.center().cast<T>()),
          fx(T(cam.intrinsics.fx)),
          fy(T(cam.intrinsics.fy)),
          cx(T(cam.intrinsics.cx)),
          cy(T(cam.intrinsics.cy)),
          width(cam.width),
          height(cam.height) {}
};

/// Everything the backward pass needs about one projected Gaussian.
template <typename T> struct ProjectionDetail {
    bool visible = false;
    Splat2D<T> splat;
    Vec3<T> t_cam;
    Eigen::Matrix<T, 2, 3> jw;  // J * W_rot
    Mat3<T> cov3d;
    Activated<T> act;
    Vec4<T> quat_unit;
    T quat_norm;
    Vec3<T> view_vec;  // mu - camera center
    Vec3<T> raw_rgb;   // SH color before clamping
};

template <typename T> std::pair<T, T> eigenvalues_2x2(const Mat2<T>& m) {
    const T mid = T(0.5) * (m(0, 0) + m(1, 1));
    const T det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const T disc = std::sqrt(std::max(T(0), mid * mid - det));
    return {mid + disc, mid - disc};
}

template <typename T>
ProjectionDetail<T> project_detail(const Gaussian<T>& g, const CameraView<T>& view, int sh_degree) {
    ProjectionDetail<T> pd;
    pd.t_cam = view.rot * g.mu + view.trans;
    const T x = pd.t_cam[0], y = pd.t_cam[1], z = pd.t_cam[2];
    if (!(z > T(raster::kNearPlane))) return pd;

    pd.quat_norm = g.rot.norm();
    pd.quat_unit = normalized_quat(g.rot);
    pd.act.sigma = sigmoid(g.opacity_logit);
    pd.act.scale = g.log_scale.array().exp().matrix();
    pd.act.rotation = rotation_from_unit_quat(pd.quat_unit);
    const Mat3<T> m = pd.act.rotation * pd.act.scale.asDiagonal();
    pd.cov3d = m * m.transpose();

    Eigen::Matrix<T, 2, 3> j;
    j << view.fx / z, T(0), -view.fx * x / (z * z), T(0), view.fy / z, -view.fy * y / (z * z);
    pd.jw = j * view.rot;
    Mat2<T> cov2d = pd.jw * pd.cov3d * pd.jw.transpose();
    cov2d = T(0.5) * (cov2d + cov2d.transpose());
    cov2d(0, 0) += T(raster::kLowPass);
    cov2d(1, 1) += T(raster::kLowPass);

    const Vec2<T> uv(view.fx * x / z + view.cx, view.fy * y / z + view.cy);
    const T lambda_max = eigenvalues_2x2(cov2d).first;
    const T guard = T(raster::kGuardSigmas) * std::sqrt(lambda_max);
    if (uv[0] + guard < T(-0.5) || uv[0] - guard > T(view.width) - T(0.5) || uv[1] + guard < T(-0.5) ||
        uv[1] - guard > T(view.height) - T(0.5))
        return pd;
    if (!(pd.act.sigma * T(255) > T(1))) return pd;  // can never reach the 1/255 contribution floor

    pd.view_vec = g.mu - view.center;
    const T vn = pd.view_vec.norm();
    const Vec3<T> dir = vn > T(0) ? Vec3<T>(pd.view_vec / vn) : Vec3<T>(T(0), T(0), T(1));
    pd.raw_rgb = eval_sh_unclamped(g.sh, dir, sh_degree);

    pd.splat = Splat2D<T>::from_cov(uv, cov2d, z, pd.raw_rgb.cwiseMax(T(0)), pd.act.sigma);
    pd.splat.radius = std::sqrt(T(2) * std::log(T(255) * pd.act.sigma) * lambda_max) + T(1);
    pd.visible = true;
    return pd;
}

/// Projects one (already deformed) Gaussian; nullopt when culled.
template <typename T>
std::optional<Splat2D<T>> project(const Gaussian<T>& g, const CameraPose& cam, int sh_degree = 0) {
    auto pd = project_detail(g, CameraView<T>(cam), sh_degree);
    if (!pd.visible) return std::nullopt;
    return pd.splat;
}

/// sigma * exp(-0.5 d^T cov2d^-1 d), clamped to 0.99; contributions under 1/255 read as 0.
template <typename T> T alpha_at(const Splat2D<T>& s, const Vec2<T>& pixel) {
    const T dx = pixel[0] - s.uv[0];
    const T dy = pixel[1] - s.uv[1];
    const T power = T(-0.5) * (s.conic(0, 0) * dx * dx + s.conic(1, 1) * dy * dy) - s.conic(0, 1) * dx * dy;
    if (power > T(0)) return T(0);
    const T a = std::min(T(raster::kAlphaMax), s.alpha_base * std::exp(power));
    return a < T(raster::kAlphaMin) ? T(0) : a;
}

template <typename T> struct BlendResult {
    Vec3<T> rgb = Vec3<T>::Zero();
    T alpha_total = T(0);
    std::vector<T> transmittances;  // transmittance in front of each contributing splat
};

/// Front-to-back compositing of depth-sorted splats at one pixel. Stops once transmittance < 1e-4.
template <typename T> BlendResult<T> blend_pixel(const std::vector<Splat2D<T>>& sorted, const Vec2<T>& pixel) {
    BlendResult<T> r;
    T trans = T(1);
    for (const auto& s : sorted) {
        const T a = alpha_at(s, pixel);
        if (a == T(0)) continue;
        r.transmittances.push_back(trans);
        r.rgb += a * trans * s.rgb;
        trans *= T(1) - a;
        if (trans < T(raster::kTransmittanceMin)) break;
    }
    r.alpha_total = T(1) - trans;
    return r;
}

template <typename T> struct RenderOutput {
    Image<T> image;      // unclamped above; clamp01() before export
    Image<T> alpha_map;  // single channel, accumulated opacity
    std::vector<T> per_gaussian_max_alpha;
};

struct RenderOptions {
    int threads = 1;
};

/// Forward pass plus the intermediate state required by render_backward.
template <typename T> struct ForwardPass {
    RenderOutput<T> output;
    std::vector<Gaussian<T>> effective;  // canonical + deltas
    std::vector<ProjectionDetail<T>> detail;
    std::vector<int> sorted;  // visible Gaussian indices, front to back
    std::vector<std::vector<int>> tiles;
    int tiles_x = 0, tiles_y = 0;
    std::vector<T> final_trans;
    std::vector<int> n_contrib;  // per pixel: tile-list position after the last contributor
    int sh_degree = 0;
    int width = 0, height = 0;
};

namespace detail {

template <typename T> void check_deltas(std::size_t n, const Deltas<T>* deltas) {
    if (deltas && deltas->size() != n)
        throw ShapeError("render: deltas has " + std::to_string(deltas->size()) + " entries for " +
                         std::to_string(n) + " Gaussians");
}

}  // namespace detail

template <typename T>
ForwardPass<T> render_forward(const Scene<T>& scene, const CameraPose& cam, const Deltas<T>* deltas = nullptr,
                              const RenderOptions& opts = {}) {
    const std::size_t n = scene.size();
    detail::check_deltas(n, deltas);
    const CameraView<T> view(cam);
    ForwardPass<T> fp;
    fp.width = cam.width;
    fp.height = cam.height;
    fp.sh_degree = scene.active_sh_degree();
    fp.effective.resize(n);
    fp.detail.resize(n);
    parallel_for(n, opts.threads, [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            fp.effective[i] = deltas ? apply_delta(scene.gaussians[i], (*deltas)[i]) : scene.gaussians[i];
            fp.detail[i] = project_detail(fp.effective[i], view, fp.sh_degree);
            fp.detail[i].splat.index = static_cast<int>(i);
        }
    });
    for (std::size_t i = 0; i < n; ++i)
        if (fp.detail[i].visible) fp.sorted.push_back(static_cast<int>(i));
    std::stable_sort(fp.sorted.begin(), fp.sorted.end(),
                     [&](int a, int b) { return fp.detail[a].splat.depth < fp.detail[b].splat.depth; });

    const int w = cam.width, h = cam.height, ts = raster::kTile;
    fp.tiles_x = (w + ts - 1) / ts;
    fp.tiles_y = (h + ts - 1) / ts;
    fp.tiles.assign(static_cast<std::size_t>(fp.tiles_x) * fp.tiles_y, {});
    for (int idx : fp.sorted) {
        const Splat2D<T>& s = fp.detail[idx].splat;
        const int x0 = std::max(0, static_cast<int>(std::floor((s.uv[0] - s.radius) / ts)));
        const int x1 = std::min(fp.tiles_x - 1, static_cast<int>(std::floor((s.uv[0] + s.radius) / ts)));
        const int y0 = std::max(0, static_cast<int>(std::floor((s.uv[1] - s.radius) / ts)));
        const int y1 = std::min(fp.tiles_y - 1, static_cast<int>(std::floor((s.uv[1] + s.radius) / ts)));
        for (int ty = y0; ty <= y1; ++ty)
            for (int tx = x0; tx <= x1; ++tx) fp.tiles[static_cast<std::size_t>(ty) * fp.tiles_x + tx].push_back(idx);
    }

    auto& out = fp.output;
    out.image = Image<T>(w, h, 3);
    out.alpha_map = Image<T>(w, h, 1);
    out.per_gaussian_max_alpha.assign(n, T(0));
    fp.final_trans.assign(static_cast<std::size_t>(w) * h, T(1));
    fp.n_contrib.assign(static_cast<std::size_t>(w) * h, 0);

    const std::size_t n_tiles = fp.tiles.size();
    std::vector<std::vector<T>> tile_max(n_tiles);
    parallel_for(n_tiles, opts.threads, [&](int, std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) {
            const auto& list = fp.tiles[t];
            auto& tmax = tile_max[t];
            tmax.assign(list.size(), T(0));
            const int tx = static_cast<int>(t % fp.tiles_x), ty = static_cast<int>(t / fp.tiles_x);
            for (int py = ty * ts; py < std::min(h, (ty + 1) * ts); ++py) {
                for (int px = tx * ts; px < std::min(w, (tx + 1) * ts); ++px) {
                    const Vec2<T> pix{T(px), T(py)};
                    T trans = T(1);
                    Vec3<T> c = Vec3<T>::Zero();
                    int last = 0;
                    for (std::size_t k = 0; k < list.size(); ++k) {
                        const Splat2D<T>& s = fp.detail[list[k]].splat;
                        const T a = alpha_at(s, pix);
                        if (a == T(0)) continue;
                        tmax[k] = std::max(tmax[k], a);
                        c += a * trans * s.rgb;
                        trans *= T(1) - a;
                        last = static_cast<int>(k) + 1;
                        if (trans < T(raster::kTransmittanceMin)) break;
                    }
                    const std::size_t p = static_cast<std::size_t>(py) * w + px;
                    fp.final_trans[p] = trans;
                    fp.n_contrib[p] = last;
                    for (int ch = 0; ch < 3; ++ch) out.image.at(py, px, ch) = c[ch];
                    out.alpha_map.at(py, px) = T(1) - trans;
                }
            }
        }
    });
    for (std::size_t t = 0; t < n_tiles; ++t)
        for (std::size_t k = 0; k < fp.tiles[t].size(); ++k) {
            T& m = out.per_gaussian_max_alpha[fp.tiles[t][k]];
            m = std::max(m, tile_max[t][k]);
        }
    return fp;
}

/// Renders G'(mu + d_mu, r + d_r, s + d_s, sigma) on a black background.
template <typename T>
RenderOutput<T> render(const Scene<T>& scene, const CameraPose& cam, const Deltas<T>* deltas = nullptr,
                       const RenderOptions& opts = {}) {
    return render_forward(scene, cam, deltas, opts).output;
}

template <typename T> struct GaussianGrad {
    Vec3<T> d_mu = Vec3<T>::Zero();
    Vec4<T> d_rot = Vec4<T>::Zero();
    Vec3<T> d_log_scale = Vec3<T>::Zero();
    T d_opacity_logit = T(0);
    ShCoeffs<T> d_sh = ShCoeffs<T>::Zero();
};

/// Gradients w.r.t. the effective (deformed) attributes. Because deltas enter additively,
/// dL/d(delta) equals the matching effective-attribute gradient.
template <typename T> struct RenderGradients {
    std::vector<GaussianGrad<T>> params;
    std::vector<Vec2<T>> screen_grad;  // dL/d(uv) rescaled to normalized device coordinates
    std::vector<bool> visible;

    GaussianDelta<T> delta_grad(std::size_t i) const {
        return {params[i].d_mu, params[i].d_rot, params[i].d_log_scale};
    }
};

template <typename T> struct SplatGrad {
    Vec2<T> d_uv = Vec2<T>::Zero();
    Mat2<T> d_conic = Mat2<T>::Zero();
    Vec3<T> d_rgb = Vec3<T>::Zero();
    T d_alpha_base = T(0);

    SplatGrad& operator+=(const SplatGrad& o) {
        d_uv += o.d_uv;
        d_conic += o.d_conic;
        d_rgb += o.d_rgb;
        d_alpha_base += o.d_alpha_base;
        return *this;
    }
};

/// Chain rule from splat-level gradients back to the Gaussian's attributes.
template <typename T>
GaussianGrad<T> project_backward(const Gaussian<T>& g, const ProjectionDetail<T>& pd, const CameraView<T>& view,
                                 int sh_degree, const SplatGrad<T>& sg) {
    GaussianGrad<T> out;
    const T x = pd.t_cam[0], y = pd.t_cam[1], z = pd.t_cam[2];
    const Mat2<T>& q = pd.splat.conic;
    const Mat2<T> d_cov2d = -q * sg.d_conic * q;

    const Mat3<T> d_cov3d = pd.jw.transpose() * d_cov2d * pd.jw;
    const Eigen::Matrix<T, 2, 3> d_jw = T(2) * d_cov2d * pd.jw * pd.cov3d;
    const Eigen::Matrix<T, 2, 3> d_j = d_jw * view.rot.transpose();

    Vec3<T> d_t;
    const T z2 = z * z, z3 = z2 * z;
    d_t[0] = sg.d_uv[0] * view.fx / z + d_j(0, 2) * (-view.fx / z2);
    d_t[1] = sg.d_uv[1] * view.fy / z + d_j(1, 2) * (-view.fy / z2);
    d_t[2] = sg.d_uv[0] * (-view.fx * x / z2) + sg.d_uv[1] * (-view.fy * y / z2) + d_j(0, 0) * (-view.fx / z2) +
             d_j(0, 2) * (T(2) * view.fx * x / z3) + d_j(1, 1) * (-view.fy / z2) +
             d_j(1, 2) * (T(2) * view.fy * y / z3);
    out.d_mu = view.rot.transpose() * d_t;

    const T vn = pd.view_vec.norm();
    if (vn > T(0)) {
        const Vec3<T> dir = pd.view_vec / vn;
        Vec3<T> d_rgb = sg.d_rgb;
        const ShGrad<T> shg = eval_sh_backward(g.sh, dir, sh_degree, pd.raw_rgb, d_rgb);
        out.d_sh = shg.d_coeffs;
        out.d_mu += (shg.d_dir - dir * dir.dot(shg.d_dir)) / vn;
    }

    const Mat3<T>& r = pd.act.rotation;
    const Vec3<T>& s = pd.act.scale;
    const Mat3<T> sym = T(0.5) * (d_cov3d + d_cov3d.transpose());
    const Mat3<T> d_m = T(2) * sym * (r * s.asDiagonal());
    const Mat3<T> d_r = d_m * s.asDiagonal();
    for (int jx = 0; jx < 3; ++jx) out.d_log_scale[jx] = s[jx] * d_m.col(jx).dot(r.col(jx));

    const T w = pd.quat_unit[0], qx = pd.quat_unit[1], qy = pd.quat_unit[2], qz = pd.quat_unit[3];
    Vec4<T> d_qu;
    d_qu[0] = T(2) * (qz * (d_r(1, 0) - d_r(0, 1)) + qy * (d_r(0, 2) - d_r(2, 0)) + qx * (d_r(2, 1) - d_r(1, 2)));
    d_qu[1] = T(2) * (qy * (d_r(1, 0) + d_r(0, 1)) + qz * (d_r(2, 0) + d_r(0, 2)) + w * (d_r(2, 1) - d_r(1, 2)) -
                      T(2) * qx * (d_r(1, 1) + d_r(2, 2)));
    d_qu[2] = T(2) * (qx * (d_r(1, 0) + d_r(0, 1)) + w * (d_r(0, 2) - d_r(2, 0)) + qz * (d_r(2, 1) + d_r(1, 2)) -
                      T(2) * qy * (d_r(0, 0) + d_r(2, 2)));
    d_qu[3] = T(2) * (w * (d_r(1, 0) - d_r(0, 1)) + qx * (d_r(2, 0) + d_r(0, 2)) + qy * (d_r(2, 1) + d_r(1, 2)) -
                      T(2) * qz * (d_r(0, 0) + d_r(1, 1)));
    out.d_rot = (d_qu - pd.quat_unit * pd.quat_unit.dot(d_qu)) / pd.quat_norm;

    const T sig = pd.act.sigma;
    out.d_opacity_logit = sg.d_alpha_base * sig * (T(1) - sig);
    return out;
}

/// Backward through blending, projection, SH and activations. When `accum` is non-null the
/// screen-space positional gradient norms of visible Gaussians are added to its accumulators.
template <typename T>
RenderGradients<T> render_backward(const ForwardPass<T>& fp, const CameraPose& cam, const Image<T>& d_image,
                                   Scene<T>* accum = nullptr, const RenderOptions& opts = {}) {
    if (d_image.width != fp.width || d_image.height != fp.height || d_image.channels != 3)
        throw ShapeError("render_backward: upstream gradient does not match the rendered image");
    const std::size_t n = fp.effective.size();
    if (accum && accum->size() != n) throw ShapeError("render_backward: accumulator scene size mismatch");
    const CameraView<T> view(cam);
    const int w = fp.width, h = fp.height, ts = raster::kTile;

    const std::size_t n_tiles = fp.tiles.size();
    std::vector<std::vector<SplatGrad<T>>> tile_grads(n_tiles);
    parallel_for(n_tiles, opts.threads, [&](int, std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) {
            const auto& list = fp.tiles[t];
            auto& grads = tile_grads[t];
            grads.assign(list.size(), SplatGrad<T>{});
            const int tx = static_cast<int>(t % fp.tiles_x), ty = static_cast<int>(t / fp.tiles_x);
            for (int py = ty * ts; py < std::min(h, (ty + 1) * ts); ++py) {
                for (int px = tx * ts; px < std::min(w, (tx + 1) * ts); ++px) {
                    const std::size_t p = static_cast<std::size_t>(py) * w + px;
                    const Vec3<T> d_pix(d_image.at(py, px, 0), d_image.at(py, px, 1), d_image.at(py, px, 2));
                    if (d_pix.isZero()) continue;
                    const Vec2<T> pix{T(px), T(py)};
                    T trans = fp.final_trans[p];
                    Vec3<T> accum_rec = Vec3<T>::Zero();
                    Vec3<T> last_color = Vec3<T>::Zero();
                    T last_alpha = T(0);
                    for (int k = fp.n_contrib[p] - 1; k >= 0; --k) {
                        const Splat2D<T>& s = fp.detail[list[k]].splat;
                        const T dx = pix[0] - s.uv[0];
                        const T dy = pix[1] - s.uv[1];
                        const T power =
                            T(-0.5) * (s.conic(0, 0) * dx * dx + s.conic(1, 1) * dy * dy) - s.conic(0, 1) * dx * dy;
                        if (power > T(0)) continue;
                        const T raw = s.alpha_base * std::exp(power);
                        const T a = std::min(T(raster::kAlphaMax), raw);
                        if (a < T(raster::kAlphaMin)) continue;
                        trans /= (T(1) - a);
                        SplatGrad<T>& g = grads[k];
                        g.d_rgb += (a * trans) * d_pix;
                        accum_rec = last_alpha * last_color + (T(1) - last_alpha) * accum_rec;
                        last_color = s.rgb;
                        last_alpha = a;
                        const T d_alpha = trans * (s.rgb - accum_rec).dot(d_pix);
                        if (raw > T(raster::kAlphaMax)) continue;
                        g.d_alpha_base += d_alpha * (raw / s.alpha_base);
                        const T g_power = d_alpha * raw;
                        g.d_uv[0] += g_power * (s.conic(0, 0) * dx + s.conic(0, 1) * dy);
                        g.d_uv[1] += g_power * (s.conic(0, 1) * dx + s.conic(1, 1) * dy);
                        g.d_conic(0, 0) += T(-0.5) * g_power * dx * dx;
                        g.d_conic(0, 1) += T(-0.5) * g_power * dx * dy;
                        g.d_conic(1, 0) += T(-0.5) * g_power * dx * dy;
                        g.d_conic(1, 1) += T(-0.5) * g_power * dy * dy;
                    }
                }
            }
        }
    });

    std::vector<SplatGrad<T>> splat_grads(n);
    for (std::size_t t = 0; t < n_tiles; ++t)
        for (std::size_t k = 0; k < fp.tiles[t].size(); ++k) splat_grads[fp.tiles[t][k]] += tile_grads[t][k];

    RenderGradients<T> rg;
    rg.params.assign(n, GaussianGrad<T>{});
    rg.screen_grad.assign(n, Vec2<T>::Zero());
    rg.visible.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) rg.visible[i] = fp.detail[i].visible;
    parallel_for(n, opts.threads, [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            if (!fp.detail[i].visible) continue;
            rg.params[i] = project_backward(fp.effective[i], fp.detail[i], view, fp.sh_degree, splat_grads[i]);
            rg.screen_grad[i] = Vec2<T>(splat_grads[i].d_uv[0] * T(0.5) * T(w), splat_grads[i].d_uv[1] * T(0.5) * T(h));
        }
    });

    if (accum) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!rg.visible[i]) continue;
            auto& acc = accum->grad_accum[i];
            acc.norm_sum += rg.screen_grad[i].norm();
            acc.count += 1;
            acc.direction_sum += rg.params[i].d_mu;
        }
    }
    return rg;
}

/// Convenience overload that reruns the forward pass.
template <typename T>
RenderGradients<T> render_backward(const Scene<T>& scene, const CameraPose& cam, const Deltas<T>* deltas,
                                   const Image<T>& d_image, Scene<T>* accum = nullptr,
                                   const RenderOptions& opts = {}) {
    const ForwardPass<T> fp = render_forward(scene, cam, deltas, opts);
    return render_backward(fp, cam, d_image, accum, opts);
}

}  // namespace dgs
