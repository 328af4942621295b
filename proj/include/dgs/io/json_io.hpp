#pragma once

// JSON mappings for the configuration and dataset types.

#include "dgs/field.hpp"
#include "dgs/optimizer.hpp"
#include "dgs/schedule.hpp"

#include <json.hpp>

namespace dgs {

using json = nlohmann::ordered_json;

inline json to_json(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }
inline json to_json(const Eigen::Vector4d& v) { return json::array({v[0], v[1], v[2], v[3]}); }

template <int N> Eigen::Matrix<double, N, 1> vec_from_json(const json& j, const char* what) {
    if (!j.is_array() || static_cast<int>(j.size()) != N)
        throw Error(std::string(what) + ": expected an array of " + std::to_string(N) + " numbers");
    Eigen::Matrix<double, N, 1> v;
    for (int i = 0; i < N; ++i) {
        if (!j[i].is_number()) throw Error(std::string(what) + ": non-numeric entry");
        v[i] = j[i].get<double>();
    }
    return v;
}

inline json to_json(const CameraPose& c) {
    json m = json::array();
    for (int r = 0; r < 4; ++r)
        for (int k = 0; k < 4; ++k) m.push_back(c.world_to_camera(r, k));
    return {{"world_to_camera", m},
            {"fx", c.intrinsics.fx},
            {"fy", c.intrinsics.fy},
            {"cx", c.intrinsics.cx},
            {"cy", c.intrinsics.cy},
            {"width", c.width},
            {"height", c.height}};
}

inline CameraPose camera_from_json(const json& j) {
    CameraPose c;
    const auto& m = j.at("world_to_camera");
    if (!m.is_array() || m.size() != 16) throw Error("camera: world_to_camera must hold 16 numbers");
    for (int r = 0; r < 4; ++r)
        for (int k = 0; k < 4; ++k) c.world_to_camera(r, k) = m[r * 4 + k].get<double>();
    c.intrinsics = {j.at("fx").get<double>(), j.at("fy").get<double>(), j.at("cx").get<double>(),
                    j.at("cy").get<double>()};
    c.width = j.at("width").get<int>();
    c.height = j.at("height").get<int>();
    return c;
}

inline json to_json(const KinematicState& p) {
    return {{"translation", to_json(p.translation)}, {"rotation", to_json(p.rotation)}, {"jaw_angle", p.jaw_angle}};
}

inline KinematicState kinematics_from_json(const json& j) {
    KinematicState p;
    p.translation = vec_from_json<3>(j.at("translation"), "kinematics.translation");
    p.rotation = vec_from_json<4>(j.at("rotation"), "kinematics.rotation");
    p.jaw_angle = j.at("jaw_angle").get<double>();
    return p;
}

inline json to_json(const NormalizationRanges& r) {
    return {{"kinematics_min", r.kin_min},
            {"kinematics_max", r.kin_max},
            {"scene_center", to_json(r.scene_center)},
            {"scene_extent", r.scene_extent}};
}

inline NormalizationRanges ranges_from_json(const json& j) {
    NormalizationRanges r;
    r.kin_min = j.at("kinematics_min").get<std::array<double, kKinematicsDim>>();
    r.kin_max = j.at("kinematics_max").get<std::array<double, kKinematicsDim>>();
    r.scene_center = vec_from_json<3>(j.at("scene_center"), "scene_center");
    r.scene_extent = j.at("scene_extent").get<double>();
    if (!(r.scene_extent > 0)) throw Error("normalization: scene_extent must be positive");
    return r;
}

inline json to_json(const FieldConfig& f) {
    return {{"depth", f.depth},
            {"width", f.width},
            {"mu_freqs", f.mu_encoding.num_freqs},
            {"mu_include_input", f.mu_encoding.include_input},
            {"p_freqs", f.p_encoding.num_freqs},
            {"p_include_input", f.p_encoding.include_input}};
}

inline FieldConfig field_config_from_json(const json& j, FieldConfig f = {}) {
    f.depth = j.value("depth", f.depth);
    f.width = j.value("width", f.width);
    f.mu_encoding.num_freqs = j.value("mu_freqs", f.mu_encoding.num_freqs);
    f.mu_encoding.include_input = j.value("mu_include_input", f.mu_encoding.include_input);
    f.p_encoding.num_freqs = j.value("p_freqs", f.p_encoding.num_freqs);
    f.p_encoding.include_input = j.value("p_include_input", f.p_encoding.include_input);
    return f;
}

inline json to_json(const DensityParams& d) {
    return {{"P_di", d.densify_interval}, {"P_oi", d.opacity_reset_interval}, {"tau_pos", d.grad_threshold}};
}

inline DensityParams density_from_json(const json& j, DensityParams d) {
    d.densify_interval = j.value("P_di", d.densify_interval);
    d.opacity_reset_interval = j.value("P_oi", d.opacity_reset_interval);
    d.grad_threshold = j.value("tau_pos", d.grad_threshold);
    return d;
}

inline json to_json(const ScheduleConfig& c) {
    return {{"phase1", to_json(c.phase1)},
            {"phase2", to_json(c.phase2)},
            {"psnr_trigger", c.psnr_trigger},
            {"loss_decline_window", c.loss_decline_window},
            {"sh_phase1_max_degree", c.sh_phase1_max_degree},
            {"sh_growth_interval", c.sh_growth_interval},
            {"compensation", {{"sigma", c.compensation.sigma}, {"beta", c.compensation.beta}}},
            {"lambda_dssim", c.lambda_dssim},
            {"max_iters", c.max_iters},
            {"densify_from", c.densify_from},
            {"densify_until", c.densify_until},
            {"clone_extent_fraction", c.clone_extent_fraction},
            {"split_factor", c.split_factor},
            {"prune_opacity", c.prune_opacity},
            {"opacity_reset_value", c.opacity_reset_value},
            {"curriculum", c.curriculum},
            {"allow_non_tightening", c.allow_non_tightening}};
}

/// Missing keys keep the values of `c`; a "preset" key selects the starting point.
inline ScheduleConfig schedule_from_json(const json& j, ScheduleConfig c = {}) {
    if (j.contains("preset")) c = ScheduleConfig::preset(j.at("preset").get<std::string>());
    if (j.contains("phase1")) c.phase1 = density_from_json(j.at("phase1"), c.phase1);
    if (j.contains("phase2")) c.phase2 = density_from_json(j.at("phase2"), c.phase2);
    c.psnr_trigger = j.value("psnr_trigger", c.psnr_trigger);
    c.loss_decline_window = j.value("loss_decline_window", c.loss_decline_window);
    c.sh_phase1_max_degree = j.value("sh_phase1_max_degree", c.sh_phase1_max_degree);
    c.sh_growth_interval = j.value("sh_growth_interval", c.sh_growth_interval);
    if (j.contains("compensation")) {
        c.compensation.sigma = j.at("compensation").value("sigma", c.compensation.sigma);
        c.compensation.beta = j.at("compensation").value("beta", c.compensation.beta);
    }
    c.lambda_dssim = j.value("lambda_dssim", c.lambda_dssim);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.densify_from = j.value("densify_from", c.densify_from);
    c.densify_until = j.value("densify_until", c.densify_until);
    c.clone_extent_fraction = j.value("clone_extent_fraction", c.clone_extent_fraction);
    c.split_factor = j.value("split_factor", c.split_factor);
    c.prune_opacity = j.value("prune_opacity", c.prune_opacity);
    c.opacity_reset_value = j.value("opacity_reset_value", c.opacity_reset_value);
    c.curriculum = j.value("curriculum", c.curriculum);
    c.allow_non_tightening = j.value("allow_non_tightening", c.allow_non_tightening);
    return c;
}

inline json to_json(const OptimizerConfig& o) {
    return {{"position_lr_init", o.position_lr_init}, {"position_lr_final", o.position_lr_final},
            {"rotation_lr", o.rotation_lr},           {"scale_lr", o.scale_lr},
            {"opacity_lr", o.opacity_lr},             {"sh_lr", o.sh_lr},
            {"sh_rest_factor", o.sh_rest_factor},     {"field_lr", o.field_lr},
            {"field_lr_phase2_factor", o.field_lr_phase2_factor}};
}

inline OptimizerConfig optimizer_from_json(const json& j, OptimizerConfig o = {}) {
    o.position_lr_init = j.value("position_lr_init", o.position_lr_init);
    o.position_lr_final = j.value("position_lr_final", o.position_lr_final);
    o.rotation_lr = j.value("rotation_lr", o.rotation_lr);
    o.scale_lr = j.value("scale_lr", o.scale_lr);
    o.opacity_lr = j.value("opacity_lr", o.opacity_lr);
    o.sh_lr = j.value("sh_lr", o.sh_lr);
    o.sh_rest_factor = j.value("sh_rest_factor", o.sh_rest_factor);
    o.field_lr = j.value("field_lr", o.field_lr);
    o.field_lr_phase2_factor = j.value("field_lr_phase2_factor", o.field_lr_phase2_factor);
    return o;
}

}  // namespace dgs
