#pragma once

#include "dgs/io/json_io.hpp"
#include "dgs/io/ply.hpp"
#include "dgs/io/png.hpp"
#include "dgs/sh.hpp"

namespace dgs::io {

struct FrameEntry {
    std::string frame_id;
    std::string image_path;  // relative to the manifest directory
    std::string mask_path;   // optional ground-truth mask
    CameraPose camera;
    KinematicState kinematics;
};

/// Dataset description: frames are unordered; paths are relative to the manifest file.
struct DatasetManifest {
    int version = 1;
    std::vector<FrameEntry> frames;
    std::string points_path;
    NormalizationRanges ranges;
    double jaw_max = 1.0;
    CurriculumWeights curriculum;

    double scene_extent() const { return ranges.scene_extent; }
};

inline json to_json(const DatasetManifest& m) {
    json frames = json::array();
    for (const auto& f : m.frames) {
        json e = {{"frame_id", f.frame_id}, {"image_path", f.image_path}};
        if (!f.mask_path.empty()) e["mask_path"] = f.mask_path;
        e["camera"] = dgs::to_json(f.camera);
        e["kinematics"] = dgs::to_json(f.kinematics);
        frames.push_back(std::move(e));
    }
    return {{"version", m.version},
            {"points_path", m.points_path},
            {"jaw_max", m.jaw_max},
            {"normalization", dgs::to_json(m.ranges)},
            {"curriculum_weights",
             {{"translation", m.curriculum.translation}, {"rotation", m.curriculum.rotation}, {"jaw", m.curriculum.jaw}}},
            {"frames", frames}};
}

inline DatasetManifest manifest_from_json(const json& j) {
    DatasetManifest m;
    m.version = j.value("version", 1);
    m.points_path = j.value("points_path", std::string{});
    m.jaw_max = j.at("jaw_max").get<double>();
    m.ranges = ranges_from_json(j.at("normalization"));
    if (j.contains("curriculum_weights")) {
        const auto& w = j.at("curriculum_weights");
        m.curriculum = {w.value("translation", 1.0), w.value("rotation", 1.0), w.value("jaw", 1.0)};
    }
    for (const auto& e : j.at("frames")) {
        FrameEntry f;
        f.frame_id = e.at("frame_id").get<std::string>();
        try {
            f.image_path = e.at("image_path").get<std::string>();
            f.mask_path = e.value("mask_path", std::string{});
            f.camera = camera_from_json(e.at("camera"));
            f.kinematics = kinematics_from_json(e.at("kinematics"));
        } catch (const std::exception& ex) {
            throw Error("frame '" + f.frame_id + "': " + ex.what());
        }
        m.frames.push_back(std::move(f));
    }
    return m;
}

inline std::string dump_manifest(const DatasetManifest& m) { return to_json(m).dump(2) + "\n"; }

inline void write_manifest(const fs::path& path, const DatasetManifest& m) { write_text(path, dump_manifest(m)); }

inline DatasetManifest read_manifest(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw Error("manifest " + path.string() + ": " + e.what());
    }
    try {
        return manifest_from_json(j);
    } catch (const json::exception& e) {
        throw Error("manifest " + path.string() + ": " + e.what());
    }
}

struct LoadedDataset {
    DatasetManifest manifest;
    std::vector<FrameRecord> frames;
    PointCloud points;
    std::vector<std::string> warnings;
};

/// Validates one manifest frame; renormalizes near-unit quaternions and reports a warning.
inline void validate_frame(FrameEntry& f, double jaw_max, std::vector<std::string>& warnings) {
    const std::string who = "frame '" + f.frame_id + "': ";
    try {
        f.camera.validate();
    } catch (const Error& e) {
        throw Error(who + "malformed pose: " + e.what());
    }
    auto& k = f.kinematics;
    if (!k.translation.allFinite() || !k.rotation.allFinite() || !std::isfinite(k.jaw_angle))
        throw Error(who + "non-finite kinematic values");
    const double qn = k.rotation.norm();
    if (!(qn > 0.5)) throw Error(who + "malformed pose: rotation quaternion is degenerate");
    if (std::abs(qn - 1.0) > 1e-6) {
        warnings.push_back(who + "rotation quaternion norm " + std::to_string(qn) + " renormalized");
        k.rotation /= qn;
    }
    if (k.jaw_angle < 0 || k.jaw_angle > jaw_max) throw Error(who + "jaw_angle outside [0, jaw_max]");
}

inline LoadedDataset load_dataset(const fs::path& manifest_path, bool load_points = true) {
    LoadedDataset ds;
    ds.manifest = read_manifest(manifest_path);
    if (ds.manifest.frames.empty()) throw Error("no frames in " + manifest_path.string());
    const fs::path root = manifest_path.parent_path();
    for (auto& f : ds.manifest.frames) {
        validate_frame(f, ds.manifest.jaw_max, ds.warnings);
        const fs::path img = root / f.image_path;
        if (!fs::exists(img)) throw Error("frame '" + f.frame_id + "': missing image file " + img.string());
        FrameRecord rec;
        try {
            rec.image = from_u8<float>(read_png(img, 3));
        } catch (const Error& e) {
            throw Error("frame '" + f.frame_id + "': " + e.what());
        }
        if (rec.image.width != f.camera.width || rec.image.height != f.camera.height)
            throw Error("frame '" + f.frame_id + "': image size does not match the camera");
        rec.camera = f.camera;
        rec.kinematics = f.kinematics;
        rec.frame_id = f.frame_id;
        ds.frames.push_back(std::move(rec));
    }
    if (load_points) {
        if (ds.manifest.points_path.empty()) throw Error("manifest lists no points_path");
        const fs::path pts = root / ds.manifest.points_path;
        if (!fs::exists(pts)) throw Error("missing point cloud " + pts.string());
        ds.points = read_point_cloud(pts);
        for (const auto& p : ds.points.positions)
            if (!p.allFinite()) throw Error("point cloud " + pts.string() + " has non-finite positions");
    }
    return ds;
}

/// Mean distance to the k nearest neighbours of every point (sweep over x-sorted order).
inline std::vector<double> mean_knn_distance(const std::vector<Eigen::Vector3d>& pts, int k = 3) {
    const std::size_t n = pts.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    const std::size_t kk = std::min<std::size_t>(k, n - 1);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a].x() < pts[b].x(); });
    std::vector<double> best;
    for (std::size_t r = 0; r < n; ++r) {
        const Eigen::Vector3d& p = pts[order[r]];
        best.clear();
        auto offer = [&](std::size_t idx) {
            const double d = (pts[idx] - p).norm();
            if (best.size() < kk) {
                best.insert(std::upper_bound(best.begin(), best.end(), d), d);
            } else if (d < best.back()) {
                best.pop_back();
                best.insert(std::upper_bound(best.begin(), best.end(), d), d);
            }
        };
        auto bound = [&]() { return best.size() < kk ? std::numeric_limits<double>::infinity() : best.back(); };
        for (std::size_t s = r + 1; s < n && pts[order[s]].x() - p.x() <= bound(); ++s) offer(order[s]);
        for (std::size_t s = r; s-- > 0 && p.x() - pts[order[s]].x() <= bound();) offer(order[s]);
        double sum = 0;
        for (double d : best) sum += d;
        out[order[r]] = sum / static_cast<double>(best.size());
    }
    return out;
}

/// One isotropic Gaussian per point: DC color from the point color, scale from the mean
/// 3-NN distance, identity rotation, opacity 0.1.
template <typename T> Scene<T> init_scene(const PointCloud& pc, double initial_opacity = 0.1) {
    if (pc.positions.empty()) throw Error("init_scene: empty point cloud");
    const auto dist = mean_knn_distance(pc.positions, 3);
    Scene<T> s;
    for (std::size_t i = 0; i < pc.positions.size(); ++i) {
        Gaussian<T> g;
        g.mu = pc.positions[i].cast<T>();
        const Eigen::Vector3d rgb = i < pc.colors.size() ? pc.colors[i] : Eigen::Vector3d::Constant(0.5);
        g.sh.row(0) = rgb_to_dc<double>(rgb).cast<T>().transpose();
        const double d = std::max(dist[i], 1e-7);
        g.log_scale = Vec3<T>::Constant(static_cast<T>(std::log(d)));
        g.opacity_logit = logit(static_cast<T>(initial_opacity));
        s.add(g);
    }
    return s;
}

}  // namespace dgs::io
