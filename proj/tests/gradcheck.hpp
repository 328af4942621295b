#pragma once

// Central-difference checks of the analytic gradients. The finite differences always run in
// double precision; the analytic side runs in whatever precision the caller picks.

#include "dgs/dgs.hpp"

#include <cstdio>
#include <functional>
#include <string>

namespace gradcheck {

using namespace dgs;

struct Numeric {
    double value;   // central difference at h
    double coarse;  // central difference at 4h
};

struct Result {
    double max_rel = 0;
    int checked = 0;
    int skipped = 0;  // the two step sizes disagree: a visibility or threshold jump lies within 4h
    std::string worst;

    void add(double analytic, Numeric numeric, double floor, const std::string& name) {
        const double n = numeric.value;
        const double mag = std::max(std::abs(analytic), std::abs(n));
        if (!(mag > floor)) return;
        if (!(std::abs(n - numeric.coarse) <= 1e-3 * std::max(std::abs(n), std::abs(numeric.coarse)))) {
            ++skipped;
            return;
        }
        ++checked;
        const double rel = std::abs(analytic - n) / mag;
        if (!(rel <= max_rel)) {
            max_rel = rel;
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s analytic %.6g numeric %.6g", name.c_str(), analytic, n);
            worst = buf;
        }
    }
    void merge(const Result& o) {
        checked += o.checked;
        skipped += o.skipped;
        if (o.max_rel > max_rel) max_rel = o.max_rel, worst = o.worst;
    }
};

inline double difference(const std::function<double()>& f, double& param, double h) {
    const double keep = param;
    param = keep + h;
    const double up = f();
    param = keep - h;
    const double down = f();
    param = keep;
    return (up - down) / (2 * h);
}

inline Numeric central(const std::function<double()>& f, double& param, double h) {
    return {difference(f, param, h), difference(f, param, 4 * h)};
}

/// Visits every scalar parameter of a Gaussian together with its analytic gradient.
template <typename T>
void for_each_param(Gaussian<double>& g, const GaussianGrad<T>& a, int sh_coeffs,
                    const std::function<void(double&, double, const std::string&)>& fn) {
    for (int k = 0; k < 3; ++k) fn(g.mu[k], a.d_mu[k], "mu" + std::to_string(k));
    for (int k = 0; k < 4; ++k) fn(g.rot[k], a.d_rot[k], "rot" + std::to_string(k));
    for (int k = 0; k < 3; ++k) fn(g.log_scale[k], a.d_log_scale[k], "log_scale" + std::to_string(k));
    fn(g.opacity_logit, a.d_opacity_logit, "opacity");
    for (int k = 0; k < sh_coeffs; ++k)
        for (int c = 0; c < 3; ++c) fn(g.sh(k, c), a.d_sh(k, c), "sh" + std::to_string(k) + "." + std::to_string(c));
}

/// Rounds the double copies to values representable in T, so both sides differentiate at the same point.
template <typename T> void snap(Scene<double>& scene, DeformationField<double>& field) {
    scene = scene.template cast<T>().template cast<double>();
    field = field.template cast<T>().template cast<double>();
}

/// Rasterizer only: L = sum(w * image), analytic in T, numeric in double.
template <typename T>
Result check_render(Scene<double> scene, const CameraPose& cam, const Image<double>& w, double h = 1e-6,
                    double floor = 1e-4) {
    const Scene<T> st = scene.template cast<T>();
    scene = st.template cast<double>();
    const ForwardPass<T> fp = render_forward(st, cam);
    const RenderGradients<T> rg = render_backward(fp, cam, w.template cast<T>());
    auto loss = [&] {
        const auto img = render(scene, cam).image;
        double s = 0;
        for (std::size_t i = 0; i < img.size(); ++i) s += w.data[i] * img.data[i];
        return s;
    };
    Result r;
    const int nsh = sh_count(scene.active_sh_degree());
    for (std::size_t i = 0; i < scene.size(); ++i)
        for_each_param(scene.gaussians[i], rg.params[i], nsh, [&](double& p, double a, const std::string& name) {
            r.add(a, central(loss, p, h), floor, "g" + std::to_string(i) + "." + name);
        });
    return r;
}

/// Full training loss through the deformation field. Checks every Gaussian parameter (unless
/// `gaussians` is false) and, for the field, every weight when `weight_stride` is 1 or an evenly
/// strided subset otherwise.
template <typename T>
Result check_full_loss(Scene<double> scene, DeformationField<double> field, const FrameRecord& frame,
                       const NormalizationRanges& ranges, double lambda, int weight_stride = 1, bool gaussians = true,
                       double h = 1e-6, double floor = 1e-6) {
    const VecX<T> p_t = encode_kinematics<T>(frame.kinematics, ranges, field.config.p_encoding);
    const StepGradients<T> sg = evaluate_frame(scene.template cast<T>(), field.template cast<T>(), frame, p_t, ranges,
                                               lambda, true);
    snap<T>(scene, field);
    const VecX<double> p_d = encode_kinematics<double>(frame.kinematics, ranges, field.config.p_encoding);
    const Image<double> gt = frame.image.template cast<double>();
    auto loss = [&] {
        const MatX<double> mu_in = encode_positions(scene.gaussians, ranges, field.config.mu_encoding);
        const Deltas<double> d = deltas_from_output<double>(field.forward(mu_in, p_d));
        return photometric_loss(render(scene, frame.camera, &d).image, gt, lambda).total;
    };
    Result r;
    const int nsh = sh_count(scene.active_sh_degree());
    for (std::size_t i = 0; gaussians && i < scene.size(); ++i)
        for_each_param(scene.gaussians[i], sg.gaussians[i], nsh, [&](double& p, double a, const std::string& name) {
            r.add(a, central(loss, p, h), floor, "g" + std::to_string(i) + "." + name);
        });
    long counter = 0;
    for (std::size_t l = 0; l < field.weights.size(); ++l) {
        auto& wl = field.weights[l];
        for (Eigen::Index k = 0; k < wl.size(); ++k, ++counter) {
            if (counter % weight_stride) continue;
            r.add(sg.field.d_weights[l].data()[k], central(loss, wl.data()[k], h), floor,
                  "W" + std::to_string(l) + "[" + std::to_string(k) + "]");
        }
        auto& bl = field.biases[l];
        for (Eigen::Index k = 0; k < bl.size(); ++k, ++counter) {
            if (counter % weight_stride) continue;
            r.add(sg.field.d_biases[l][k], central(loss, bl[k], h), floor,
                  "b" + std::to_string(l) + "[" + std::to_string(k) + "]");
        }
    }
    return r;
}

/// MLP alone in double: L = sum(U * F(x)) for a fixed random U; every `stride`-th weight.
inline Result check_field(DeformationField<double> field, const MatX<double>& mu_in, const VecX<double>& p_in,
                          const MatX<double>& upstream, double h = 1e-6, double floor = 1e-9, int stride = 1) {
    typename DeformationField<double>::Cache cache;
    field.forward(mu_in, p_in, &cache);
    const FieldGradients<double> g = field.backward(cache, upstream);
    auto loss = [&] { return (field.forward(mu_in, p_in).array() * upstream.array()).sum(); };
    Result r;
    long counter = 0;
    for (std::size_t l = 0; l < field.weights.size(); ++l) {
        for (Eigen::Index k = 0; k < field.weights[l].size(); ++k, ++counter)
            if (counter % stride == 0)
                r.add(g.d_weights[l].data()[k], central(loss, field.weights[l].data()[k], h), floor,
                      "W" + std::to_string(l) + "[" + std::to_string(k) + "]");
        for (Eigen::Index k = 0; k < field.biases[l].size(); ++k, ++counter)
            if (counter % stride == 0)
                r.add(g.d_biases[l][k], central(loss, field.biases[l][k], h), floor,
                      "b" + std::to_string(l) + "[" + std::to_string(k) + "]");
    }
    return r;
}

/// A field whose output layer is random, so every weight receives gradient.
inline DeformationField<double> live_field(const FieldConfig& cfg, std::uint64_t seed, double head_scale) {
    auto f = DeformationField<double>::create(cfg, seed);
    std::mt19937_64 rng(seed + 1);
    std::normal_distribution<double> nd(0.0, head_scale);
    for (Eigen::Index k = 0; k < f.weights.back().size(); ++k) f.weights.back().data()[k] = nd(rng);
    for (Eigen::Index k = 0; k < f.biases.back().size(); ++k) f.biases.back()[k] = nd(rng);
    for (auto& b : f.biases) {
        if (&b == &f.biases.back()) continue;
        for (Eigen::Index k = 0; k < b.size(); ++k) b[k] = 0.1 * nd(rng) / head_scale;
    }
    return f;
}

}  // namespace gradcheck
