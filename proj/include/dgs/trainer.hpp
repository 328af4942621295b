#pragma once

#include "dgs/io/checkpoint.hpp"
#include "dgs/io/dataset.hpp"
#include "dgs/loss.hpp"

#include <cstdio>
#include <functional>

namespace dgs {

struct TrainConfig {
    ScheduleConfig schedule;
    OptimizerConfig optimizer;
    FieldConfig field;
    std::uint64_t seed = 0;
    int threads = 1;
    int checkpoint_every = 0;  // 0 disables intermediate checkpoints
    int max_gaussians = 0;     // densification stops adding once reached; 0 = unbounded
    // Backpropagate through the field's dependence on the canonical centers. Off by default:
    // the high-frequency position encoding makes that path noisy for the canonical means.
    bool field_position_gradient = false;
};

inline json to_json(const TrainConfig& c) {
    return {{"schedule", to_json(c.schedule)},     {"optimizer", to_json(c.optimizer)},
            {"field", to_json(c.field)},           {"seed", c.seed},
            {"threads", c.threads},                {"checkpoint_every", c.checkpoint_every},
            {"max_gaussians", c.max_gaussians},    {"field_position_gradient", c.field_position_gradient}};
}

/// Accepts either a nested {"schedule": ...} document or a flat schedule document.
inline TrainConfig train_config_from_json(const json& j, TrainConfig c = {}) {
    c.schedule = schedule_from_json(j.contains("schedule") ? j.at("schedule") : j, c.schedule);
    if (j.contains("optimizer")) c.optimizer = optimizer_from_json(j.at("optimizer"), c.optimizer);
    if (j.contains("field")) c.field = field_config_from_json(j.at("field"), c.field);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.max_gaussians = j.value("max_gaussians", c.max_gaussians);
    c.field_position_gradient = j.value("field_position_gradient", c.field_position_gradient);
    return c;
}

template <typename T> struct StepGradients {
    LossResult<T> loss;
    RenderOutput<T> render;
    std::vector<GaussianGrad<T>> gaussians;  // canonical parameters, deltas folded in
    FieldGradients<T> field;
};

/// Loss of one frame and its gradients w.r.t. every canonical Gaussian parameter and every
/// field weight. `p_input` is the (possibly perturbed) encoded kinematics. When `accum` is
/// given, screen-space gradients are accumulated for densification.
template <typename T>
StepGradients<T> evaluate_frame(const Scene<T>& scene, const DeformationField<T>& field, const FrameRecord& frame,
                                const VecX<T>& p_input, const NormalizationRanges& ranges, double lambda,
                                bool position_gradient, Scene<T>* accum = nullptr, const RenderOptions& opts = {}) {
    StepGradients<T> out;
    typename DeformationField<T>::Cache cache;
    const MatX<T> mu_input = encode_positions(scene.gaussians, ranges, field.config.mu_encoding);
    const Deltas<T> deltas = deltas_from_output<T>(field.forward(mu_input, p_input, &cache));
    const ForwardPass<T> fp = render_forward(scene, frame.camera, &deltas, opts);
    const Image<T> gt = frame.image.template cast<T>();
    out.loss = photometric_loss(fp.output.image, gt, lambda);
    RenderGradients<T> rg = render_backward(fp, frame.camera, out.loss.grad, accum, opts);

    std::vector<GaussianDelta<T>> dd(scene.size());
    for (std::size_t i = 0; i < scene.size(); ++i) dd[i] = rg.delta_grad(i);
    out.field = field.backward(cache, output_from_delta_grads(dd), position_gradient);
    if (position_gradient) {
        const auto& enc = field.config.mu_encoding;
        const Vec3<T> c = ranges.scene_center.cast<T>();
        const T inv = T(1.0 / ranges.scene_extent);
        for (std::size_t i = 0; i < scene.size(); ++i) {
            const VecX<T> x = (scene.gaussians[i].mu - c) * inv;
            const VecX<T> d_enc = out.field.d_mu_input.col(static_cast<Eigen::Index>(i));
            const VecX<T> dx = enc.backward(x, d_enc);
            rg.params[i].d_mu += dx * inv;
        }
    }
    out.gaussians = std::move(rg.params);
    out.render = std::move(fp.output);
    return out;
}

struct LogRow {
    int iter = 0;
    Phase phase = Phase::PhaseOne;
    double loss = 0, l1 = 0, dssim = 0, psnr = 0;
    std::size_t gaussian_count = 0;
    int active_sh_degree = 0;
};

inline const char* kLogHeader = "iter,phase,loss,L1,D-SSIM,PSNR,gaussian_count,active_sh_degree";

inline std::string format_log_row(const LogRow& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%s,%.9g,%.9g,%.9g,%.9g,%zu,%d", r.iter, phase_name(r.phase), r.loss, r.l1,
                  r.dssim, r.psnr, r.gaussian_count, r.active_sh_degree);
    return buf;
}

/// Events of one step, exposed for scripted runs and tests.
struct StepEvents {
    int frame = -1;
    bool transitioned = false;
    bool densified = false;
    bool opacity_reset = false;
    DensityParams density;  // parameters in effect for this step
    TopologyChange topology;
    VecX<double> compensation;  // perturbation added to the encoded kinematics
};

/// Single-threaded training driver. All randomness flows from one seeded generator.
template <typename T = float> class Trainer {
public:
    Trainer(Scene<T> scene, std::vector<FrameRecord> frames, NormalizationRanges ranges, CurriculumWeights weights,
            TrainConfig cfg)
        : scene_(std::move(scene)),
          frames_(std::move(frames)),
          ranges_(ranges),
          weights_(weights),
          cfg_(std::move(cfg)),
          state_(static_cast<std::size_t>(cfg_.schedule.loss_decline_window), cfg_.seed),
          rng_(cfg_.seed) {
        cfg_.schedule.validate();
        if (frames_.empty()) throw Error("trainer: no frames");
        field_ = DeformationField<T>::create(cfg_.field, cfg_.seed ^ 0x9e3779b97f4a7c15ull);
        gadam_ = GaussianAdam<T>(scene_.size());
        fadam_ = FieldAdam<T>(field_);
        scene_.reset_accumulators();
        scene_.phase = state_.phase;
        for (const auto& f : frames_) states_.push_back(f.kinematics);
    }

    const Scene<T>& scene() const { return scene_; }
    Scene<T>& scene() { return scene_; }
    const DeformationField<T>& field() const { return field_; }
    DeformationField<T>& field() { return field_; }
    const TrainState& state() const { return state_; }
    const TrainConfig& config() const { return cfg_; }
    TrainConfig& config() { return cfg_; }
    const NormalizationRanges& ranges() const { return ranges_; }
    const std::vector<LogRow>& log() const { return log_; }

    /// Next frame index following the curriculum: the kinematic tour traversed back and forth in
    /// PhaseOne, a fresh random permutation per epoch in PhaseTwo.
    int next_frame() {
        if (pos_ >= order_.size()) {
            if (state_.phase == Phase::PhaseOne && cfg_.schedule.curriculum) {
                if (order_phase_ != Phase::PhaseOne || order_.empty()) {
                    order_ = kinematic_tour(states_, weights_);
                } else {
                    std::reverse(order_.begin(), order_.end());
                }
            } else {
                order_ = curriculum_order(states_, Phase::PhaseTwo, weights_, rng_);
            }
            order_phase_ = state_.phase;
            pos_ = 0;
        }
        return order_[pos_++];
    }

    StepEvents step() {
        StepEvents ev;
        const Phase phase = state_.phase;
        const int it = state_.iteration + 1;
        ev.density = cfg_.schedule.density(phase);
        scene_.raise_sh_degree(sh_degree_schedule(state_, cfg_.schedule));

        ev.frame = next_frame();
        const FrameRecord& frame = frames_[static_cast<std::size_t>(ev.frame)];
        const VecX<T> p_clean = encode_kinematics<T>(frame.kinematics, ranges_, field_.config.p_encoding);
        const VecX<T> p_input = apply_compensation(p_clean, phase, cfg_.schedule.compensation, rng_);
        ev.compensation = (p_input - p_clean).template cast<double>();

        RenderOptions ro{cfg_.threads};
        StepGradients<T> sg = evaluate_frame(scene_, field_, frame, p_input, ranges_, cfg_.schedule.lambda_dssim,
                                             cfg_.field_position_gradient, &scene_, ro);

        const auto& oc = cfg_.optimizer;
        const double pos_lr = GaussianAdam<T>::position_lr(oc, ranges_.scene_extent, state_.iteration,
                                                           std::max(1, cfg_.schedule.max_iters));
        gadam_.step(scene_, sg.gaussians, oc, pos_lr, lr_scale_);
        const double field_lr = oc.field_lr * (phase == Phase::PhaseTwo ? oc.field_lr_phase2_factor : 1.0) * lr_scale_;
        fadam_.step(field_, sg.field, field_lr, oc);

        const double frame_psnr = psnr(clamp01(sg.render.image), frame.image.template cast<T>());
        state_.iteration = it;
        state_.loss_history.push(sg.loss.total);
        state_.psnr_history.push(frame_psnr);

        const auto& sc = cfg_.schedule;
        if (it >= sc.densify_from && it <= sc.densify_until && it % ev.density.densify_interval == 0) {
            const bool full = cfg_.max_gaussians > 0 && static_cast<int>(scene_.size()) >= cfg_.max_gaussians;
            const double threshold = full ? std::numeric_limits<double>::infinity() : ev.density.grad_threshold;
            ev.topology = densify_and_prune(scene_, threshold, DensifyOptions::from(sc, ranges_.scene_extent), rng_);
            gadam_.remap(ev.topology);
            ev.densified = true;
        }
        if (it <= sc.densify_until && it % ev.density.opacity_reset_interval == 0) {
            reset_opacity(scene_, sc.opacity_reset_value);
            gadam_.reset_opacity_moments();
            ev.opacity_reset = true;
        }

        log_.push_back({it, phase, sg.loss.total, sg.loss.l1, sg.loss.dssim, frame_psnr, scene_.size(),
                        scene_.active_sh_degree()});

        if (check_phase_transition(state_, sc) != phase) {
            ev.transitioned = true;
            scene_.phase = state_.phase;
            pos_ = order_.size();
        }
        return ev;
    }

    /// Scales every learning rate; 0 freezes all parameters.
    void set_lr_scale(double s) { lr_scale_ = s; }

    /// Runs until max_iters, writing the CSV log and checkpoints under `out` when non-empty.
    void run(const io::fs::path& out = {}, const std::function<void(const StepEvents&)>& hook = {}) {
        while (state_.iteration < cfg_.schedule.max_iters) {
            const StepEvents ev = step();
            if (hook) hook(ev);
            if (!out.empty() && cfg_.checkpoint_every > 0 && state_.iteration % cfg_.checkpoint_every == 0)
                save(out / ("checkpoint_" + std::to_string(state_.iteration)));
        }
        if (!out.empty()) {
            write_log(out / "train_log.csv");
            save(out / "checkpoint");
        }
    }

    void write_log(const io::fs::path& path) const {
        std::string text = std::string(kLogHeader) + "\n";
        for (const auto& r : log_) text += format_log_row(r) + "\n";
        io::write_text(path, text);
    }

    void save(const io::fs::path& dir) const { io::save_checkpoint(dir, scene_, field_, ranges_, state_); }

private:
    Scene<T> scene_;
    DeformationField<T> field_;
    std::vector<FrameRecord> frames_;
    std::vector<KinematicState> states_;
    NormalizationRanges ranges_;
    CurriculumWeights weights_;
    TrainConfig cfg_;
    TrainState state_;
    std::mt19937_64 rng_;
    GaussianAdam<T> gadam_;
    FieldAdam<T> fadam_;
    std::vector<int> order_;
    std::size_t pos_ = 0;
    Phase order_phase_ = Phase::PhaseOne;
    std::vector<LogRow> log_;
    double lr_scale_ = 1.0;
};

/// Renders every frame at its recorded kinematics and scores the 8-bit image, the same one
/// `render` writes to disk.
template <typename T>
MetricReport evaluate_frames(const Scene<T>& scene, const DeformationField<T>& field, const NormalizationRanges& ranges,
                             const std::vector<FrameRecord>& frames, int threads = 1) {
    MetricReport rep;
    for (const auto& f : frames) {
        const Deltas<T> d = predict_scene_deltas(field, scene, f.kinematics, ranges);
        const Image<T> img = from_u8<T>(to_u8(render(scene, f.camera, &d, RenderOptions{threads}).image));
        const Image<T> gt = f.image.template cast<T>();
        rep.per_frame.push_back({f.frame_id, psnr(img, gt), ssim(img, gt)});
    }
    return rep;
}

}  // namespace dgs
