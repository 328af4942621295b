#pragma once

#include "dgs/density.hpp"
#include "dgs/field.hpp"
#include "dgs/rasterizer.hpp"

namespace dgs {

struct OptimizerConfig {
    double position_lr_init = 1.6e-4;  // scaled by the scene extent
    double position_lr_final = 1.6e-6;
    double rotation_lr = 1e-3;
    double scale_lr = 5e-3;
    double opacity_lr = 5e-2;
    double sh_lr = 2.5e-3;
    double sh_rest_factor = 1.0 / 20.0;  // higher-order SH bands train slower
    double field_lr = 1e-3;
    double field_lr_phase2_factor = 0.5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-15;
    double field_eps = 1e-8;
};

namespace adam_detail {

template <typename M> void update(M& param, M& m, M& v, const M& g, double lr, double b1, double b2, double eps,
                                  double bias1, double bias2) {
    using S = typename M::Scalar;
    m = S(b1) * m + S(1 - b1) * g;
    v = S(b2) * v + S(1 - b2) * g.cwiseProduct(g);
    const S step = S(lr / bias1);
    param.array() -= step * m.array() / ((v.array() / S(bias2)).sqrt() + S(eps));
}

}  // namespace adam_detail

/// Adam moments for the canonical Gaussians, kept index-aligned with the scene.
template <typename T> class GaussianAdam {
public:
    explicit GaussianAdam(std::size_t n = 0) : m_(n), v_(n) {}

    std::size_t size() const { return m_.size(); }

    /// Learning rate of the position group at `iteration` (log-linear decay over `max_iters`).
    static double position_lr(const OptimizerConfig& c, double extent, int iteration, int max_iters) {
        const double t = max_iters > 0 ? std::clamp(static_cast<double>(iteration) / max_iters, 0.0, 1.0) : 0.0;
        return extent * std::exp(std::log(c.position_lr_init) * (1 - t) + std::log(c.position_lr_final) * t);
    }

    void step(Scene<T>& scene, const std::vector<GaussianGrad<T>>& grads, const OptimizerConfig& c, double pos_lr,
              double lr_scale = 1.0) {
        if (grads.size() != scene.size() || m_.size() != scene.size())
            throw ShapeError("adam: gradient count differs from Gaussian count");
        ++t_;
        const double b1 = 1 - std::pow(c.beta1, t_), b2 = 1 - std::pow(c.beta2, t_);
        for (std::size_t i = 0; i < scene.size(); ++i) {
            auto& g = scene.gaussians[i];
            const auto& d = grads[i];
            auto& m = m_[i];
            auto& v = v_[i];
            adam_detail::update(g.mu, m.d_mu, v.d_mu, d.d_mu, pos_lr * lr_scale, c.beta1, c.beta2, c.eps, b1, b2);
            adam_detail::update(g.rot, m.d_rot, v.d_rot, d.d_rot, c.rotation_lr * lr_scale, c.beta1, c.beta2, c.eps, b1, b2);
            adam_detail::update(g.log_scale, m.d_log_scale, v.d_log_scale, d.d_log_scale, c.scale_lr * lr_scale, c.beta1,
                                c.beta2, c.eps, b1, b2);
            Eigen::Matrix<T, 1, 1> op(g.opacity_logit), mo(m.d_opacity_logit), vo(v.d_opacity_logit),
                go(d.d_opacity_logit);
            adam_detail::update(op, mo, vo, go, c.opacity_lr * lr_scale, c.beta1, c.beta2, c.eps, b1, b2);
            g.opacity_logit = op[0];
            m.d_opacity_logit = mo[0];
            v.d_opacity_logit = vo[0];
            Eigen::Matrix<T, 1, 3> dc = g.sh.row(0), mdc = m.d_sh.row(0), vdc = v.d_sh.row(0);
            const Eigen::Matrix<T, 1, 3> gdc = d.d_sh.row(0);
            adam_detail::update(dc, mdc, vdc, gdc, c.sh_lr * lr_scale, c.beta1, c.beta2, c.eps, b1, b2);
            g.sh.row(0) = dc;
            m.d_sh.row(0) = mdc;
            v.d_sh.row(0) = vdc;
            Eigen::Matrix<T, kShCoeffs - 1, 3> rest = g.sh.bottomRows(kShCoeffs - 1),
                                               mr = m.d_sh.bottomRows(kShCoeffs - 1),
                                               vr = v.d_sh.bottomRows(kShCoeffs - 1);
            const Eigen::Matrix<T, kShCoeffs - 1, 3> gr = d.d_sh.bottomRows(kShCoeffs - 1);
            adam_detail::update(rest, mr, vr, gr, c.sh_lr * c.sh_rest_factor * lr_scale, c.beta1, c.beta2, c.eps, b1, b2);
            g.sh.bottomRows(kShCoeffs - 1) = rest;
            m.d_sh.bottomRows(kShCoeffs - 1) = mr;
            v.d_sh.bottomRows(kShCoeffs - 1) = vr;
        }
    }

    /// Re-indexes moments after densification; fresh Gaussians start from zero moments.
    void remap(const TopologyChange& tc) {
        std::vector<GaussianGrad<T>> m(tc.source.size()), v(tc.source.size());
        for (std::size_t i = 0; i < tc.source.size(); ++i) {
            if (tc.fresh[i]) continue;
            m[i] = m_[tc.source[i]];
            v[i] = v_[tc.source[i]];
        }
        m_ = std::move(m);
        v_ = std::move(v);
    }

    void reset_opacity_moments() {
        for (auto& m : m_) m.d_opacity_logit = T(0);
        for (auto& v : v_) v.d_opacity_logit = T(0);
    }

    long step_count() const { return t_; }

private:
    std::vector<GaussianGrad<T>> m_, v_;
    long t_ = 0;
};

template <typename T> class FieldAdam {
public:
    FieldAdam() = default;
    explicit FieldAdam(const DeformationField<T>& f) {
        m_.set_zero_like(f.weights, f.biases);
        v_.set_zero_like(f.weights, f.biases);
    }

    void step(DeformationField<T>& f, const FieldGradients<T>& g, double lr, const OptimizerConfig& c) {
        ++t_;
        const double b1 = 1 - std::pow(c.beta1, t_), b2 = 1 - std::pow(c.beta2, t_);
        for (std::size_t l = 0; l < f.weights.size(); ++l) {
            adam_detail::update(f.weights[l], m_.d_weights[l], v_.d_weights[l], g.d_weights[l], lr, c.beta1, c.beta2,
                                c.field_eps, b1, b2);
            adam_detail::update(f.biases[l], m_.d_biases[l], v_.d_biases[l], g.d_biases[l], lr, c.beta1, c.beta2,
                                c.field_eps, b1, b2);
        }
    }

private:
    FieldGradients<T> m_, v_;
    long t_ = 0;
};

}  // namespace dgs
