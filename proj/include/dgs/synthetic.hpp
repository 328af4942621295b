#pragma once

#include "dgs/annotation.hpp"
#include "dgs/io/dataset.hpp"

namespace dgs {

/// Description of a generated scene: a bumpy tissue sheet under an articulated instrument
/// (a shaft plus two jaws hinged at a pivot), observed from an orbit of cameras.
struct SyntheticSpec {
    std::uint64_t seed = 7;
    int width = 96, height = 96;
    double focal = 100.0;

    int background_count = 800;
    int instrument_count = 200;
    double tissue_half_size = 1.0;
    double tissue_bump = 0.06;
    double tissue_scale = 0.085;  // background Gaussian radius

    Eigen::Vector3d pivot = {-0.45, 0.0, 0.3};  // canonical jaw hinge in world space
    double shaft_length = 0.9;
    double shaft_radius = 0.035;
    double jaw_length = 0.25;
    double jaw_width = 0.03;
    double shaft_fraction = 0.6;  // rest split evenly between the two jaws

    // Training kinematics are drawn uniformly from these ranges.
    Eigen::Vector3d translation_min = {0.3, -0.06, 0.0};
    Eigen::Vector3d translation_max = {0.42, 0.06, 0.04};
    Eigen::Vector3d euler_max = {0.3, 0.04, 0.06};  // roll (shaft axis), pitch, yaw half-ranges, radians
    double jaw_min = 0.0;
    double jaw_max_sampled = 0.6;
    double jaw_max = 0.7;

    Eigen::Vector3d orbit_target = {0.0, 0.0, 0.1};
    double orbit_radius = 2.6;
    double elevation_min = 0.95;  // radians above the tissue plane
    double elevation_max = 1.45;

    int train_frames = 60;
    int seen_frames = 10;
    int unseen_frames = 10;
    double extrapolation = 0.10;  // fraction of each range that unseen states may exceed

    double point_noise = 0.01;
    double outlier_fraction = 0.03;
    double color_noise = 0.03;
    double camera_noise = 0.0;  // rotation noise (radians) applied to recorded training poses

    double scene_extent = 1.5;
};

inline json to_json(const SyntheticSpec& s) {
    return {{"seed", s.seed},
            {"width", s.width},
            {"height", s.height},
            {"focal", s.focal},
            {"background_count", s.background_count},
            {"instrument_count", s.instrument_count},
            {"tissue_half_size", s.tissue_half_size},
            {"tissue_bump", s.tissue_bump},
            {"tissue_scale", s.tissue_scale},
            {"pivot", to_json(s.pivot)},
            {"shaft_length", s.shaft_length},
            {"shaft_radius", s.shaft_radius},
            {"jaw_length", s.jaw_length},
            {"jaw_width", s.jaw_width},
            {"shaft_fraction", s.shaft_fraction},
            {"translation_min", to_json(s.translation_min)},
            {"translation_max", to_json(s.translation_max)},
            {"euler_max", to_json(s.euler_max)},
            {"jaw_min", s.jaw_min},
            {"jaw_max_sampled", s.jaw_max_sampled},
            {"jaw_max", s.jaw_max},
            {"orbit_target", to_json(s.orbit_target)},
            {"orbit_radius", s.orbit_radius},
            {"elevation_min", s.elevation_min},
            {"elevation_max", s.elevation_max},
            {"train_frames", s.train_frames},
            {"seen_frames", s.seen_frames},
            {"unseen_frames", s.unseen_frames},
            {"extrapolation", s.extrapolation},
            {"point_noise", s.point_noise},
            {"outlier_fraction", s.outlier_fraction},
            {"color_noise", s.color_noise},
            {"camera_noise", s.camera_noise},
            {"scene_extent", s.scene_extent}};
}

inline SyntheticSpec synthetic_spec_from_json(const json& j, SyntheticSpec s = {}) {
    auto num = [&](const char* k, auto& v) {
        if (j.contains(k)) v = j.at(k).get<std::decay_t<decltype(v)>>();
    };
    auto vec = [&](const char* k, Eigen::Vector3d& v) {
        if (j.contains(k)) v = vec_from_json<3>(j.at(k), k);
    };
    num("seed", s.seed), num("width", s.width), num("height", s.height), num("focal", s.focal);
    num("background_count", s.background_count), num("instrument_count", s.instrument_count);
    num("tissue_half_size", s.tissue_half_size), num("tissue_bump", s.tissue_bump), num("tissue_scale", s.tissue_scale);
    vec("pivot", s.pivot);
    num("shaft_length", s.shaft_length), num("shaft_radius", s.shaft_radius);
    num("jaw_length", s.jaw_length), num("jaw_width", s.jaw_width), num("shaft_fraction", s.shaft_fraction);
    vec("translation_min", s.translation_min), vec("translation_max", s.translation_max), vec("euler_max", s.euler_max);
    num("jaw_min", s.jaw_min), num("jaw_max_sampled", s.jaw_max_sampled), num("jaw_max", s.jaw_max);
    vec("orbit_target", s.orbit_target);
    num("orbit_radius", s.orbit_radius), num("elevation_min", s.elevation_min), num("elevation_max", s.elevation_max);
    num("train_frames", s.train_frames), num("seen_frames", s.seen_frames), num("unseen_frames", s.unseen_frames);
    num("extrapolation", s.extrapolation);
    num("point_noise", s.point_noise), num("outlier_fraction", s.outlier_fraction), num("color_noise", s.color_noise);
    num("camera_noise", s.camera_noise), num("scene_extent", s.scene_extent);
    if (s.width <= 0 || s.height <= 0 || !(s.focal > 0)) throw Error("synthetic spec: invalid image geometry");
    if (s.background_count < 0 || s.instrument_count < 0) throw Error("synthetic spec: negative Gaussian count");
    if (s.train_frames < 0 || s.seen_frames < 0 || s.unseen_frames < 0) throw Error("synthetic spec: negative frame count");
    if (s.jaw_max_sampled > s.jaw_max || s.jaw_min < 0) throw Error("synthetic spec: jaw range exceeds [0, jaw_max]");
    return s;
}

/// Quaternion from roll (x), pitch (y), yaw (z), applied in that order.
inline Eigen::Vector4d quat_from_euler(const Eigen::Vector3d& e) {
    const Eigen::Vector4d qx = quat_from_axis_angle<double>(Eigen::Vector3d::UnitX(), e.x());
    const Eigen::Vector4d qy = quat_from_axis_angle<double>(Eigen::Vector3d::UnitY(), e.y());
    const Eigen::Vector4d qz = quat_from_axis_angle<double>(Eigen::Vector3d::UnitZ(), e.z());
    return quat_mul(qz, quat_mul(qy, qx));
}

/// Rigid instrument: Gaussians stored in the pivot frame. part 0 = shaft, 1 = upper jaw, 2 = lower jaw.
struct InstrumentRig {
    Eigen::Vector3d pivot = Eigen::Vector3d::Zero();
    std::vector<int> ids;    // scene indices of the instrument Gaussians
    std::vector<int> parts;  // per instrument Gaussian
    std::vector<Gaussian<double>> local;

    /// Jaw hinge rotation about the local z axis: +jaw/2 for the upper, -jaw/2 for the lower jaw.
    static Eigen::Vector4d hinge(int part, double jaw) {
        if (part == 0) return {1, 0, 0, 0};
        const double a = part == 1 ? 0.5 * jaw : -0.5 * jaw;
        return quat_from_axis_angle<double>(Eigen::Vector3d::UnitZ(), a);
    }

    Gaussian<double> posed(std::size_t k, const KinematicState& p) const {
        const Eigen::Vector4d q = quat_mul(normalized_quat<double>(p.rotation), hinge(parts[k], p.jaw_angle));
        Gaussian<double> g = local[k];
        g.mu = pivot + p.translation + rotation_from_unit_quat<double>(q) * local[k].mu;
        g.rot = quat_mul(q, normalized_quat<double>(local[k].rot));
        return g;
    }

    /// Exact per-Gaussian deltas taking the canonical scene to state p; background deltas are zero.
    template <typename T> Deltas<T> deltas(const Scene<T>& canonical, const KinematicState& p) const {
        Deltas<T> d(canonical.size());
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const Gaussian<double> g = posed(k, p);
            const Gaussian<double> c = canonical.gaussians[ids[k]].template cast<double>();
            Eigen::Vector4d r = g.rot;
            if (r.dot(c.rot) < 0) r = -r;
            auto& dk = d[ids[k]];
            dk.d_mu = (g.mu - c.mu).cast<T>();
            dk.d_rot = (r * c.rot.norm() - c.rot).cast<T>();
        }
        return d;
    }

    std::vector<bool> flags(std::size_t n) const {
        std::vector<bool> f(n, false);
        for (int i : ids) f[i] = true;
        return f;
    }
};

inline double tissue_height(const SyntheticSpec& s, double x, double y) {
    return s.tissue_bump * (std::sin(2.1 * x + 0.3) * std::cos(1.7 * y) + 0.5 * std::sin(3.3 * y - 1.1 * x));
}

inline Eigen::Vector3d tissue_color(double x, double y) {
    const double v = 0.5 + 0.25 * std::sin(2.3 * x + 1.0) * std::cos(2.9 * y) + 0.15 * std::sin(4.1 * x - 3.7 * y);
    const double vessel = std::exp(-std::pow((y - 0.35 * std::sin(2.0 * x)) / 0.06, 2));
    Eigen::Vector3d c(0.78 + 0.15 * v, 0.38 + 0.2 * v, 0.36 + 0.12 * v);
    c = (1 - 0.5 * vessel) * c + 0.5 * vessel * Eigen::Vector3d(0.55, 0.12, 0.15);
    return c.cwiseMax(0.0).cwiseMin(1.0);
}

struct SyntheticSplit {
    std::string name;
    io::DatasetManifest manifest;
    std::vector<FrameRecord> frames;  // images in memory, already 8-bit quantized
    std::vector<Mask> masks;
};

struct SyntheticDataset {
    SyntheticSpec spec;
    Scene<float> gt_scene;  // canonical: translation 0, identity rotation, closed jaws
    InstrumentRig rig;
    io::PointCloud points;
    NormalizationRanges ranges;
    std::vector<SyntheticSplit> splits;  // train, test_seen, test_unseen

    const SyntheticSplit& split(const std::string& name) const {
        for (const auto& s : splits)
            if (s.name == name) return s;
        throw Error("no split named " + name);
    }
};

namespace synth_detail {

inline double uniform(std::mt19937_64& rng, double a, double b) {
    return a + (b - a) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline Gaussian<double> make_gaussian(const Eigen::Vector3d& mu, const Eigen::Vector4d& rot, const Eigen::Vector3d& scale,
                                      double opacity, const Eigen::Vector3d& rgb) {
    Gaussian<double> g;
    g.mu = mu;
    g.rot = rot;
    g.log_scale = scale.array().log();
    g.opacity_logit = logit(opacity);
    g.sh.row(0) = rgb_to_dc<double>(rgb).transpose();
    return g;
}

/// Rotation taking +z onto the unit vector n.
inline Eigen::Vector4d align_z(const Eigen::Vector3d& n) {
    const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
    const Eigen::Vector3d axis = z.cross(n);
    const double s = axis.norm();
    if (s < 1e-12) return {1, 0, 0, 0};
    return quat_from_axis_angle<double>(axis / s, std::atan2(s, z.dot(n)));
}

inline KinematicState spec_midpoint(const SyntheticSpec& s) {
    KinematicState p;
    p.translation = 0.5 * (s.translation_min + s.translation_max);
    p.jaw_angle = 0.5 * (s.jaw_min + s.jaw_max_sampled);
    return p;
}

inline KinematicState sample_state(const SyntheticSpec& s, std::mt19937_64& rng) {
    KinematicState p;
    for (int i = 0; i < 3; ++i) p.translation[i] = uniform(rng, s.translation_min[i], s.translation_max[i]);
    Eigen::Vector3d e;
    for (int i = 0; i < 3; ++i) e[i] = uniform(rng, -s.euler_max[i], s.euler_max[i]);
    p.rotation = quat_from_euler(e);
    p.jaw_angle = uniform(rng, s.jaw_min, s.jaw_max_sampled);
    return p;
}

inline Eigen::Vector4d slerp(Eigen::Vector4d a, Eigen::Vector4d b, double t) {
    if (a.dot(b) < 0) b = -b;
    const double d = std::min(1.0, a.dot(b));
    const double th = std::acos(d);
    if (th < 1e-9) return a;
    return ((std::sin((1 - t) * th) * a + std::sin(t * th) * b) / std::sin(th)).normalized();
}

inline CameraPose orbit_camera(const SyntheticSpec& s, double azimuth, double elevation) {
    const Eigen::Vector3d eye =
        s.orbit_target + s.orbit_radius * Eigen::Vector3d(std::cos(elevation) * std::cos(azimuth),
                                                          std::cos(elevation) * std::sin(azimuth), std::sin(elevation));
    const Intrinsics k{s.focal, s.focal, 0.5 * (s.width - 1), 0.5 * (s.height - 1)};
    return CameraPose::look_at(eye, s.orbit_target, Eigen::Vector3d::UnitZ(), k, s.width, s.height);
}

inline CameraPose random_camera(const SyntheticSpec& s, std::mt19937_64& rng) {
    const double az = uniform(rng, 0.0, 2 * M_PI);
    const double el = uniform(rng, s.elevation_min, s.elevation_max);
    return orbit_camera(s, az, el);
}

/// Applies a small rotation about the camera center to a recorded pose.
inline CameraPose perturb_camera(const CameraPose& c, double sigma, std::mt19937_64& rng) {
    if (sigma <= 0) return c;
    std::normal_distribution<double> nd(0.0, sigma);
    const Eigen::Vector3d w(nd(rng), nd(rng), nd(rng));
    const double a = w.norm();
    const Eigen::Matrix3d d =
        a > 0 ? rotation_from_unit_quat<double>(quat_from_axis_angle<double>(w / a, a)) : Eigen::Matrix3d::Identity();
    CameraPose out = c;
    const Eigen::Vector3d center = c.center();
    const Eigen::Matrix3d r = d * c.rotation();
    out.world_to_camera.topLeftCorner<3, 3>() = r;
    out.world_to_camera.topRightCorner<3, 1>() = -r * center;
    return out;
}

}  // namespace synth_detail

/// Ground-truth canonical scene and instrument rig for a spec.
inline std::pair<Scene<float>, InstrumentRig> build_gt_scene(const SyntheticSpec& s, std::mt19937_64& rng) {
    using namespace synth_detail;
    Scene<double> scene;
    for (int i = 0; i < s.background_count; ++i) {
        const double x = uniform(rng, -s.tissue_half_size, s.tissue_half_size);
        const double y = uniform(rng, -s.tissue_half_size, s.tissue_half_size);
        const double h = 1e-4;
        const Eigen::Vector3d n =
            Eigen::Vector3d(-(tissue_height(s, x + h, y) - tissue_height(s, x - h, y)) / (2 * h),
                            -(tissue_height(s, x, y + h) - tissue_height(s, x, y - h)) / (2 * h), 1.0)
                .normalized();
        const double r = s.tissue_scale * uniform(rng, 0.8, 1.2);
        const Eigen::Vector4d spin = quat_from_axis_angle<double>(Eigen::Vector3d::UnitZ(), uniform(rng, 0, M_PI));
        scene.add(make_gaussian({x, y, tissue_height(s, x, y)}, quat_mul(align_z(n), spin), {r, r * 0.9, r * 0.25},
                                uniform(rng, 0.85, 0.97), tissue_color(x, y)));
    }

    InstrumentRig rig;
    rig.pivot = s.pivot;
    const int n_shaft = static_cast<int>(std::lround(s.instrument_count * s.shaft_fraction));
    const int n_jaw = s.instrument_count - n_shaft;
    for (int i = 0; i < s.instrument_count; ++i) {
        const int part = i < n_shaft ? 0 : (i - n_shaft < n_jaw / 2 ? 1 : 2);
        Gaussian<double> g;
        if (part == 0) {
            const double a = uniform(rng, 0, 2 * M_PI);
            const Eigen::Vector3d mu(-uniform(rng, 0.02, s.shaft_length), s.shaft_radius * std::cos(a),
                                     s.shaft_radius * std::sin(a));
            const double shade = 0.68 + 0.12 * std::cos(a - 0.6);
            g = make_gaussian(mu, quat_from_axis_angle<double>(Eigen::Vector3d::UnitX(), a),
                              {0.05, 0.022, 0.012}, 0.95, {shade, shade, shade + 0.04});
        } else {
            const double side = part == 1 ? 1.0 : -1.0;
            const Eigen::Vector3d mu(uniform(rng, 0.01, s.jaw_length), side * uniform(rng, 0.2, 1.0) * s.jaw_width,
                                     uniform(rng, -0.5, 0.5) * s.jaw_width);
            const Eigen::Vector3d rgb = part == 1 ? Eigen::Vector3d(0.32, 0.34, 0.42) : Eigen::Vector3d(0.28, 0.3, 0.36);
            g = make_gaussian(mu, {1, 0, 0, 0}, {0.035, 0.014, 0.012}, 0.95, rgb);
        }
        rig.ids.push_back(static_cast<int>(scene.size()));
        rig.parts.push_back(part);
        rig.local.push_back(g);
        const KinematicState canonical;
        scene.add(rig.posed(rig.local.size() - 1, canonical));
    }
    return {scene.cast<float>(), rig};
}

namespace synth_detail {

inline SyntheticSplit render_split(const std::string& name, const SyntheticDataset& ds,
                                   const std::vector<KinematicState>& states, const std::vector<CameraPose>& cams,
                                   const std::vector<CameraPose>& recorded, int threads) {
    SyntheticSplit sp;
    sp.name = name;
    const std::size_t n = states.size();
    sp.frames.resize(n);
    sp.masks.resize(n);
    const auto flags = ds.rig.flags(ds.gt_scene.size());
    parallel_for(n, threads, [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Deltas<float> d = ds.rig.deltas(ds.gt_scene, states[i]);
            FrameRecord& f = sp.frames[i];
            f.image = from_u8<float>(to_u8(render(ds.gt_scene, cams[i], &d).image));
            f.camera = recorded[i];
            f.kinematics = states[i];
            char id[64];
            std::snprintf(id, sizeof id, "%s_%04zu", name.c_str(), i);
            f.frame_id = id;
            sp.masks[i] = instrument_mask(ds.gt_scene, &d, flags, cams[i], kDefaultRgbThreshold);
        }
    });
    sp.manifest.ranges = ds.ranges;
    sp.manifest.jaw_max = ds.spec.jaw_max;
    sp.manifest.points_path = "points.ply";
    for (const auto& f : sp.frames)
        sp.manifest.frames.push_back({f.frame_id, "images/" + f.frame_id + ".png", "masks/" + f.frame_id + ".png",
                                      f.camera, f.kinematics});
    return sp;
}

}  // namespace synth_detail

/// Builds the whole dataset in memory. Every random draw happens up front in a fixed order, so
/// the result depends only on the spec.
inline SyntheticDataset generate_synthetic(const SyntheticSpec& spec, int threads = 1) {
    using namespace synth_detail;
    SyntheticDataset ds;
    ds.spec = spec;
    std::mt19937_64 rng(spec.seed);
    std::tie(ds.gt_scene, ds.rig) = build_gt_scene(spec, rng);

    std::vector<KinematicState> train_states;
    std::vector<CameraPose> train_cams, train_recorded;
    for (int i = 0; i < spec.train_frames; ++i) {
        train_states.push_back(sample_state(spec, rng));
        train_cams.push_back(random_camera(spec, rng));
        train_recorded.push_back(perturb_camera(train_cams.back(), spec.camera_noise, rng));
    }

    // Seen: a training kinematic state re-observed from a different training camera.
    std::vector<KinematicState> seen_states;
    std::vector<CameraPose> seen_cams;
    for (int i = 0; i < spec.seen_frames && spec.train_frames > 0; ++i) {
        std::uniform_int_distribution<int> pick(0, spec.train_frames - 1);
        const int a = pick(rng);
        int c = pick(rng);
        if (spec.train_frames > 1 && c == a) c = (a + 1) % spec.train_frames;
        seen_states.push_back(train_states[a]);
        seen_cams.push_back(train_cams[c]);
    }

    // Unseen: alternately an interpolation between two training states and a state pushed past
    // the sampled ranges, each from a fresh camera.
    std::vector<KinematicState> unseen_states;
    std::vector<CameraPose> unseen_cams;
    for (int i = 0; i < spec.unseen_frames && spec.train_frames > 0; ++i) {
        KinematicState p;
        if (i % 2 == 0) {
            std::uniform_int_distribution<int> pick(0, spec.train_frames - 1);
            const auto& a = train_states[pick(rng)];
            const auto& b = train_states[pick(rng)];
            const double t = uniform(rng, 0.25, 0.75);
            p.translation = (1 - t) * a.translation + t * b.translation;
            p.rotation = slerp(a.rotation, b.rotation, t);
            p.jaw_angle = (1 - t) * a.jaw_angle + t * b.jaw_angle;
        } else {
            p = sample_state(spec, rng);
            const double x = spec.extrapolation;
            const Eigen::Vector3d span = spec.translation_max - spec.translation_min;
            const int axis = (i / 2) % 3;
            p.translation[axis] = (i / 2) % 2 == 0 ? spec.translation_max[axis] + x * span[axis]
                                                   : spec.translation_min[axis] - x * span[axis];
            p.jaw_angle = std::min(spec.jaw_max, spec.jaw_max_sampled + x * (spec.jaw_max_sampled - spec.jaw_min));
        }
        unseen_states.push_back(p);
        unseen_cams.push_back(random_camera(spec, rng));
    }

    // Ranges come from the recorded training states only.
    auto& r = ds.ranges;
    r.scene_center = spec.orbit_target;
    r.scene_extent = spec.scene_extent;
    if (!train_states.empty()) {
        r.kin_min.fill(std::numeric_limits<double>::infinity());
        r.kin_max.fill(-std::numeric_limits<double>::infinity());
        for (const auto& p : train_states) {
            const KinematicsVector v = kinematics_raw(p);
            for (int i = 0; i < kKinematicsDim; ++i) {
                r.kin_min[i] = std::min(r.kin_min[i], v[i]);
                r.kin_max[i] = std::max(r.kin_max[i], v[i]);
            }
        }
    }

    // Initial point cloud: noisy samples of the scene plus uniform outliers. A structure-from-motion
    // reconstruction sees the instrument where it was filmed, so its points come from the instrument
    // posed at the middle of the sampled ranges rather than from the canonical reference.
    std::normal_distribution<double> nd(0.0, 1.0);
    const KinematicState mid = spec_midpoint(spec);
    std::vector<Eigen::Vector3d> centers;
    for (const auto& g : ds.gt_scene.gaussians) centers.push_back(g.mu.cast<double>());
    for (std::size_t k = 0; k < ds.rig.ids.size(); ++k) centers[ds.rig.ids[k]] = ds.rig.posed(k, mid).mu;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const auto& g = ds.gt_scene.gaussians[i];
        const Eigen::Vector3d mu = centers[i];
        ds.points.positions.push_back(mu + spec.point_noise * Eigen::Vector3d(nd(rng), nd(rng), nd(rng)));
        const Eigen::Vector3d rgb = eval_sh<double>(g.sh.cast<double>(), Eigen::Vector3d::UnitZ(), 0);
        ds.points.colors.push_back(
            (rgb + spec.color_noise * Eigen::Vector3d(nd(rng), nd(rng), nd(rng))).cwiseMax(0.0).cwiseMin(1.0));
    }
    const int outliers = static_cast<int>(std::lround(spec.outlier_fraction * ds.gt_scene.size()));
    for (int i = 0; i < outliers; ++i) {
        const double h = spec.tissue_half_size;
        ds.points.positions.push_back({uniform(rng, -h, h), uniform(rng, -h, h), uniform(rng, -0.1, 0.5)});
        ds.points.colors.push_back({uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1)});
    }
    // The point cloud file stores 8-bit colors; keep the in-memory copy identical to what is read back.
    for (auto& c : ds.points.colors) c = (c * 255.0).array().round() / 255.0;
    for (auto& p : ds.points.positions) p = p.cast<float>().cast<double>();

    ds.splits.push_back(render_split("train", ds, train_states, train_cams, train_recorded, threads));
    ds.splits.push_back(render_split("test_seen", ds, seen_states, seen_cams, seen_cams, threads));
    ds.splits.push_back(render_split("test_unseen", ds, unseen_states, unseen_cams, unseen_cams, threads));
    return ds;
}

/// Writes images, masks, one manifest per split, the point cloud and the ground truth.
inline void write_synthetic(const SyntheticDataset& ds, const io::fs::path& out) {
    for (const auto& sp : ds.splits) {
        for (std::size_t i = 0; i < sp.frames.size(); ++i) {
            io::write_png(out / sp.manifest.frames[i].image_path, sp.frames[i].image);
            io::write_png(out / sp.manifest.frames[i].mask_path, sp.masks[i]);
        }
        io::write_manifest(out / ("manifest_" + sp.name + ".json"), sp.manifest);
    }
    io::write_point_cloud(out / "points.ply", ds.points);
    io::write_gaussians(out / "gt" / "scene.ply", ds.gt_scene);
    json ids = {{"instrument_ids", ds.rig.ids}, {"parts", ds.rig.parts}};
    io::write_text(out / "gt" / "instrument_ids.json", ids.dump() + "\n");
    io::write_text(out / "gt" / "spec.json", to_json(ds.spec).dump(2) + "\n");
}

}  // namespace dgs
