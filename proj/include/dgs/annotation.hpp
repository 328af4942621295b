#pragma once

#include "dgs/field.hpp"
#include "dgs/io/json_io.hpp"
#include "dgs/io/png.hpp"
#include "dgs/rasterizer.hpp"

#include <optional>

namespace dgs {

struct DeltaThresholds {
    double h_mu = 0.05;
    double h_r = 0.05;
    double h_s = 0.05;

    static DeltaThresholds defaults(double scene_extent) { return {0.05 * scene_extent, 0.05, 0.05}; }

    void validate() const {
        if (!(h_mu >= 0 && h_r >= 0 && h_s >= 0)) throw Error("delta thresholds must be non-negative");
    }
};

inline constexpr double kDefaultRgbThreshold = 10.0 / 255.0;

/// A Gaussian belongs to the instrument when any of its three deltas exceeds its threshold.
template <typename T> std::vector<bool> classify_instrument(const Deltas<T>& deltas, const DeltaThresholds& th) {
    th.validate();
    std::vector<bool> out(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const auto& d = deltas[i];
        out[i] = static_cast<double>(d.d_mu.norm()) > th.h_mu || static_cast<double>(d.d_rot.norm()) > th.h_r ||
                 static_cast<double>(d.d_log_scale.norm()) > th.h_s;
    }
    return out;
}

struct Aabb {
    int x_min = 0, y_min = 0, x_max = 0, y_max = 0;

    double area() const { return static_cast<double>(x_max - x_min) * (y_max - y_min); }
    bool operator==(const Aabb&) const = default;
};

/// Rotated rectangle, corners in order around the boundary. Coordinates are pixel centers.
struct RotatedBox {
    std::array<Eigen::Vector2d, 4> corners;

    double area() const {
        return (corners[1] - corners[0]).norm() * (corners[2] - corners[1]).norm();
    }
    bool operator==(const RotatedBox& o) const {
        for (int i = 0; i < 4; ++i)
            if (corners[i] != o.corners[i]) return false;
        return true;
    }
};

struct Boxes {
    std::optional<Aabb> aabb;
    std::optional<RotatedBox> contour_box;
};

struct AnnotationOutput {
    Mask mask;
    std::optional<Aabb> aabb;
    std::optional<RotatedBox> contour_box;

    bool detected() const { return aabb.has_value(); }
};

namespace geom {

using P = Eigen::Vector2d;

inline double cross(const P& o, const P& a, const P& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

/// Monotone-chain convex hull, counter-clockwise, collinear points dropped.
inline std::vector<P> convex_hull(std::vector<P> pts) {
    std::sort(pts.begin(), pts.end(), [](const P& a, const P& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<P> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

/// Minimum-area enclosing rectangle: one side of the optimum is collinear with a hull edge.
inline RotatedBox min_area_rect(const std::vector<P>& hull) {
    RotatedBox best;
    if (hull.empty()) return best;
    if (hull.size() == 1) {
        best.corners.fill(hull[0]);
        return best;
    }
    double best_area = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const P e = hull[(i + 1) % hull.size()] - hull[i];
        if (e.norm() == 0) continue;
        const P u = e.normalized();
        const P v(-u.y(), u.x());
        double a0 = std::numeric_limits<double>::infinity(), a1 = -a0, b0 = a0, b1 = -a0;
        for (const P& q : hull) {
            const double a = q.dot(u), b = q.dot(v);
            a0 = std::min(a0, a), a1 = std::max(a1, a);
            b0 = std::min(b0, b), b1 = std::max(b1, b);
        }
        const double area = (a1 - a0) * (b1 - b0);
        if (area < best_area - 1e-9) {
            best_area = area;
            best.corners = {u * a0 + v * b0, u * a1 + v * b0, u * a1 + v * b1, u * a0 + v * b1};
        }
    }
    return best;
}

}  // namespace geom

/// Pixels of the largest 8-connected component (ties keep the first in raster order).
inline std::vector<Eigen::Vector2i> largest_component(const Mask& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<Eigen::Vector2i> best, cur, stack;
    int next = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!mask.at(y, x) || label[idx] >= 0) continue;
            cur.clear();
            stack.assign(1, {x, y});
            label[idx] = next;
            while (!stack.empty()) {
                const Eigen::Vector2i p = stack.back();
                stack.pop_back();
                cur.push_back(p);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = p.x() + dx, ny = p.y() + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
                        if (!mask.at(ny, nx) || label[n] >= 0) continue;
                        label[n] = next;
                        stack.push_back({nx, ny});
                    }
            }
            ++next;
            if (cur.size() > best.size()) best = cur;
        }
    return best;
}

/// aabb over every on-pixel; contour box over the largest component. Empty mask yields neither.
inline Boxes extract_boxes(const Mask& mask) {
    Boxes b;
    Aabb a{mask.width, mask.height, -1, -1};
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(y, x)) {
                a.x_min = std::min(a.x_min, x), a.x_max = std::max(a.x_max, x);
                a.y_min = std::min(a.y_min, y), a.y_max = std::max(a.y_max, y);
            }
    if (a.x_max < 0) return b;
    b.aabb = a;
    std::vector<geom::P> pts;
    for (const auto& p : largest_component(mask)) pts.emplace_back(p.x(), p.y());
    b.contour_box = geom::min_area_rect(geom::convex_hull(std::move(pts)));
    return b;
}

/// Renders only the flagged Gaussians (deformed by `deltas` when given) on black and thresholds
/// the per-pixel maximum channel.
template <typename T>
Mask instrument_mask(const Scene<T>& scene, const Deltas<T>* deltas, const std::vector<bool>& flags,
                     const CameraPose& cam, double rgb_threshold, const RenderOptions& opts = {}) {
    if (flags.size() != scene.size()) throw ShapeError("instrument_mask: flag count differs from Gaussian count");
    detail::check_deltas(scene.size(), deltas);
    Scene<T> sub;
    Deltas<T> sub_d;
    for (std::size_t i = 0; i < scene.size(); ++i) {
        if (!flags[i]) continue;
        sub.add(scene.gaussians[i]);
        if (deltas) sub_d.push_back((*deltas)[i]);
    }
    sub.raise_sh_degree(scene.active_sh_degree());
    const ImageF img = clamp01(render(sub, cam, deltas ? &sub_d : nullptr, opts).image.template cast<float>());
    Mask m(cam.width, cam.height, 1);
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) {
            const float mx = std::max({img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2)});
            m.at(y, x) = mx > static_cast<float>(rgb_threshold) ? 255 : 0;
        }
    return m;
}

/// Classification, instrument-only render and box extraction for one pose.
template <typename T>
AnnotationOutput annotate_with_deltas(const Scene<T>& scene, const Deltas<T>& deltas, const CameraPose& cam,
                                      const DeltaThresholds& th, double rgb_threshold = kDefaultRgbThreshold,
                                      const RenderOptions& opts = {}) {
    AnnotationOutput out;
    out.mask = instrument_mask(scene, &deltas, classify_instrument(deltas, th), cam, rgb_threshold, opts);
    Boxes b = extract_boxes(out.mask);
    out.aabb = b.aabb;
    out.contour_box = b.contour_box;
    return out;
}

/// Deltas come from the trained field, measured against the canonical scene.
template <typename T>
AnnotationOutput render_mask(const Scene<T>& scene, const DeformationField<T>& field, const KinematicState& p,
                             const NormalizationRanges& ranges, const CameraPose& cam, const DeltaThresholds& th,
                             double rgb_threshold = kDefaultRgbThreshold, const RenderOptions& opts = {}) {
    const Deltas<T> d = predict_scene_deltas(field, scene, p, ranges);
    return annotate_with_deltas(scene, d, cam, th, rgb_threshold, opts);
}

inline double mask_iou(const Mask& a, const Mask& b) {
    require_same_shape(a, b, "mask_iou");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool x = a.data[i] != 0, y = b.data[i] != 0;
        inter += x && y;
        uni += x || y;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace io {

inline json annotation_json(const std::string& frame_id, const AnnotationOutput& a) {
    json j = {{"frame_id", frame_id}};
    if (a.aabb) {
        const Aabb& b = *a.aabb;
        j["aabb"] = {b.x_min, b.y_min, b.x_max - b.x_min + 1, b.y_max - b.y_min + 1};
    } else {
        j["aabb"] = nullptr;
    }
    if (a.contour_box) {
        json c = json::array();
        for (const auto& p : a.contour_box->corners) c.push_back({p.x(), p.y()});
        j["contour_box"] = c;
    } else {
        j["contour_box"] = nullptr;
    }
    return j;
}

/// YOLO line: class 0, normalized center and size of the pixel-extent box. Empty when nothing is detected.
inline std::string yolo_line(const AnnotationOutput& a, int width, int height) {
    if (!a.aabb) return "";
    const Aabb& b = *a.aabb;
    const double w = b.x_max - b.x_min + 1, h = b.y_max - b.y_min + 1;
    char buf[160];
    std::snprintf(buf, sizeof buf, "0 %.6f %.6f %.6f %.6f\n", (b.x_min + w / 2) / width, (b.y_min + h / 2) / height,
                  w / width, h / height);
    return buf;
}

struct AnnotationFiles {
    fs::path mask, boxes, yolo;
};

inline AnnotationFiles annotation_paths(const fs::path& dir, const std::string& frame_id) {
    return {dir / (frame_id + "_mask.png"), dir / (frame_id + ".json"), dir / (frame_id + ".txt")};
}

inline AnnotationFiles write_annotation(const fs::path& dir, const std::string& frame_id, const AnnotationOutput& a) {
    const AnnotationFiles f = annotation_paths(dir, frame_id);
    write_png(f.mask, a.mask);
    write_text(f.boxes, annotation_json(frame_id, a).dump(2) + "\n");
    write_text(f.yolo, yolo_line(a, a.mask.width, a.mask.height));
    return f;
}

inline AnnotationOutput read_annotation(const fs::path& dir, const std::string& frame_id) {
    const AnnotationFiles f = annotation_paths(dir, frame_id);
    AnnotationOutput a;
    a.mask = read_png(f.mask, 1);
    const json j = json::parse(read_text(f.boxes));
    if (!j.at("aabb").is_null()) {
        const auto& b = j.at("aabb");
        const int x = b[0], y = b[1], w = b[2], h = b[3];
        a.aabb = Aabb{x, y, x + w - 1, y + h - 1};
    }
    if (!j.at("contour_box").is_null()) {
        RotatedBox r;
        for (int i = 0; i < 4; ++i) r.corners[i] = {j["contour_box"][i][0].get<double>(), j["contour_box"][i][1].get<double>()};
        a.contour_box = r;
    }
    return a;
}

}  // namespace io

}  // namespace dgs
