#pragma once

#include "dgs/schedule.hpp"

#include <random>

namespace dgs {

struct DensifyOptions {
    double scene_extent = 1.0;
    double clone_extent_fraction = 0.01;
    double split_factor = 1.6;
    double prune_opacity = 0.005;

    static DensifyOptions from(const ScheduleConfig& c, double extent) {
        return {extent, c.clone_extent_fraction, c.split_factor, c.prune_opacity};
    }
};

/// Result of a topology change. source[i] is the pre-change index the new Gaussian i came from;
/// fresh[i] marks Gaussians created by cloning or splitting.
struct TopologyChange {
    std::vector<int> source;
    std::vector<bool> fresh;
    int cloned = 0;
    int split = 0;
    int pruned = 0;
};

/// Clones small and splits large Gaussians whose mean screen-space gradient exceeds `threshold`,
/// prunes Gaussians with realized opacity below the floor and resets the accumulators.
template <typename T>
TopologyChange densify_and_prune(Scene<T>& scene, double threshold, const DensifyOptions& opt, std::mt19937_64& rng) {
    const std::size_t n = scene.size();
    if (scene.grad_accum.size() != n) throw ShapeError("densify: accumulator count differs from Gaussian count");
    const T size_limit = T(opt.clone_extent_fraction * opt.scene_extent);
    const T log_split = T(std::log(opt.split_factor));

    std::vector<Gaussian<T>> kept, added;
    std::vector<int> kept_src, added_src;
    TopologyChange tc;
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = scene.gaussians[i];
        const auto& acc = scene.grad_accum[i];
        const double mean_grad = acc.count > 0 ? static_cast<double>(acc.norm_sum) / acc.count : 0.0;
        if (!(mean_grad > threshold)) {
            kept.push_back(g);
            kept_src.push_back(static_cast<int>(i));
            continue;
        }
        const Activated<T> a = activate(g);
        const T max_scale = a.scale.maxCoeff();
        if (max_scale <= size_limit) {
            Gaussian<T> c = g;
            const T dn = acc.direction_sum.norm();
            if (dn > T(0) && std::isfinite(dn)) c.mu -= (acc.direction_sum / dn) * (T(0.5) * max_scale);
            kept.push_back(g);
            kept_src.push_back(static_cast<int>(i));
            added.push_back(c);
            added_src.push_back(static_cast<int>(i));
            ++tc.cloned;
        } else {
            for (int k = 0; k < 2; ++k) {
                Gaussian<T> c = g;
                const Vec3<T> z(T(nd(rng)), T(nd(rng)), T(nd(rng)));
                c.mu = g.mu + a.rotation * (a.scale.cwiseProduct(z));
                c.log_scale = g.log_scale.array() - log_split;
                added.push_back(c);
                added_src.push_back(static_cast<int>(i));
            }
            ++tc.split;
        }
    }

    std::vector<Gaussian<T>> out;
    out.reserve(kept.size() + added.size());
    const T prune_logit = logit(T(opt.prune_opacity));
    auto emit = [&](const Gaussian<T>& g, int src, bool fresh) {
        if (g.opacity_logit < prune_logit || !g.finite()) {
            ++tc.pruned;
            return;
        }
        out.push_back(g);
        tc.source.push_back(src);
        tc.fresh.push_back(fresh);
    };
    for (std::size_t i = 0; i < kept.size(); ++i) emit(kept[i], kept_src[i], false);
    for (std::size_t i = 0; i < added.size(); ++i) emit(added[i], added_src[i], true);
    scene.gaussians = std::move(out);
    scene.reset_accumulators();
    return tc;
}

/// Caps every realized opacity at `ceiling`.
template <typename T> void reset_opacity(Scene<T>& scene, double ceiling = 0.01) {
    const T cap = logit(T(ceiling));
    for (auto& g : scene.gaussians) g.opacity_logit = std::min(g.opacity_logit, cap);
}

}  // namespace dgs
