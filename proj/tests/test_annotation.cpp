#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace dgs;
using testutil::axis_camera;

namespace {

Gaussian<float> blob(float x, float y, float z, float scale, Vec3<float> rgb, float opacity = 0.95f) {
    Gaussian<float> g;
    g.mu = {x, y, z};
    g.log_scale = Vec3<float>::Constant(std::log(scale));
    g.opacity_logit = logit(opacity);
    g.sh.row(0) = rgb_to_dc(rgb);
    return g;
}

Mask empty_mask(int w, int h) { return Mask(w, h, 1); }

bool inside(const RotatedBox& b, const Eigen::Vector2d& p, double tol = 1e-6) {
    // Convex polygon containment; corners are ordered around the boundary.
    double sign = 0;
    for (int i = 0; i < 4; ++i) {
        const Eigen::Vector2d e = b.corners[(i + 1) % 4] - b.corners[i], d = p - b.corners[i];
        const double c = e.x() * d.y() - e.y() * d.x();
        if (std::abs(c) <= tol * e.norm()) continue;
        if (sign == 0) sign = c;
        if (c * sign < 0) return false;
    }
    return true;
}

}  // namespace

TEST(Classify, ZeroDeltasAreBackground) {
    const Deltas<float> d(10);
    for (bool f : classify_instrument(d, DeltaThresholds{})) EXPECT_FALSE(f);
}

TEST(Classify, SingleExceedance) {
    const DeltaThresholds th{0.1, 0.05, 0.05};
    Deltas<double> d(6);
    d[3].d_mu = {0.2, 0, 0};
    const auto f = classify_instrument(d, th);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(f[i], i == 3);
}

TEST(Classify, EachTestAloneSuffices) {
    const DeltaThresholds th{0.1, 0.05, 0.05};
    Deltas<double> d(3);
    d[0].d_mu = {0.0, 0.11, 0};
    d[1].d_rot = {0, 0, 0.06, 0};
    d[2].d_log_scale = {0, 0, -0.06};
    for (bool f : classify_instrument(d, th)) EXPECT_TRUE(f);
    EXPECT_THROW(classify_instrument(d, DeltaThresholds{-1, 0, 0}), Error);
}

TEST(Classify, RigidMotionRecoversSubset) {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-1, 1);
    Scene<double> s;
    std::vector<bool> truth;
    for (int i = 0; i < 120; ++i) {
        Gaussian<double> g;
        g.mu = {u(rng), u(rng), u(rng)};
        s.add(g);
        truth.push_back(i % 4 == 1);
    }
    const double extent = 2.0;
    const auto th = DeltaThresholds::defaults(extent);
    const Eigen::Matrix3d r = Eigen::AngleAxisd(0.4, Eigen::Vector3d(1, 2, 0.5).normalized()).toRotationMatrix();
    const Eigen::Vector3d t(0.3, -0.1, 0.2);
    const Eigen::Vector3d pivot(5, 0, 0);  // far pivot: every moved point travels well past h_mu
    Deltas<double> d(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!truth[i]) continue;
        const Eigen::Vector3d moved = pivot + r * (s.gaussians[i].mu - pivot) + t;
        d[i].d_mu = moved - s.gaussians[i].mu;
        ASSERT_GT(d[i].d_mu.norm(), th.h_mu);
    }
    EXPECT_EQ(classify_instrument(d, th), truth);
}

TEST(Classify, MonotoneInThresholds) {
    std::mt19937_64 rng(62);
    std::normal_distribution<double> nd(0, 0.05);
    Deltas<double> d(300);
    for (auto& x : d) {
        x.d_mu = {nd(rng), nd(rng), nd(rng)};
        x.d_rot = {nd(rng), nd(rng), nd(rng), nd(rng)};
        x.d_log_scale = {nd(rng), nd(rng), nd(rng)};
    }
    DeltaThresholds th{0.02, 0.02, 0.02};
    auto prev = classify_instrument(d, th);
    for (int step = 0; step < 30; ++step) {
        (step % 3 == 0 ? th.h_mu : step % 3 == 1 ? th.h_r : th.h_s) += 0.01;
        const auto cur = classify_instrument(d, th);
        for (std::size_t i = 0; i < d.size(); ++i)
            EXPECT_TRUE(!cur[i] || prev[i]);
        prev = cur;
    }
}

TEST(RenderMask, NoInstrumentGivesNoDetection) {
    Scene<float> s;
    s.add(blob(0, 0, 2, 0.1f, {1, 1, 1}));
    const Deltas<float> d(1);
    const auto a = annotate_with_deltas(s, d, axis_camera(32, 32, 40), DeltaThresholds{});
    EXPECT_FALSE(a.detected());
    EXPECT_FALSE(a.contour_box.has_value());
    for (auto v : a.mask.data) EXPECT_EQ(v, 0);
}

TEST(RenderMask, SingleGaussianBlob) {
    Scene<float> s;
    s.add(blob(0.1f, -0.05f, 2, 0.06f, {0.8f, 0.8f, 0.8f}));
    s.add(blob(-0.3f, 0.3f, 2.5f, 0.06f, {0.8f, 0.2f, 0.2f}));
    Deltas<float> d(2);
    d[0].d_mu = {0.0f, 0.0f, 0.5f};
    const auto cam = axis_camera(48, 48, 60);
    const auto a = annotate_with_deltas(s, d, cam, DeltaThresholds{});
    ASSERT_TRUE(a.detected());
    const auto sp = project(apply_delta(s.gaussians[0], d[0]), cam);
    const int cx = static_cast<int>(std::lround(sp->uv.x())), cy = static_cast<int>(std::lround(sp->uv.y()));
    EXPECT_EQ(a.mask.at(cy, cx), 255);
    EXPECT_LE(a.aabb->x_min, cx);
    EXPECT_GE(a.aabb->x_max, cx);
    EXPECT_LE(a.aabb->y_min, cy);
    EXPECT_GE(a.aabb->y_max, cy);
    // One connected blob: the largest component holds every on-pixel.
    std::size_t on = 0;
    for (auto v : a.mask.data) on += v != 0;
    EXPECT_EQ(largest_component(a.mask).size(), on);
}

TEST(RenderMask, TwoGaussianAabbMatchesPerPixelOracle) {
    Scene<float> s;
    s.add(blob(-0.2f, -0.1f, 2.0f, 0.05f, {0.9f, 0.5f, 0.3f}));
    s.add(blob(0.25f, 0.15f, 2.2f, 0.08f, {0.2f, 0.3f, 0.9f}, 0.6f));
    s.add(blob(0.0f, 0.0f, 3.0f, 0.3f, {0.5f, 0.5f, 0.5f}));
    Deltas<float> d(3);
    d[0].d_mu = {0.0f, 0.1f, 0.0f};
    d[1].d_mu = {-0.1f, 0.0f, 0.0f};
    const auto cam = axis_camera(64, 64, 80);
    const auto a = annotate_with_deltas(s, d, cam, DeltaThresholds{});
    ASSERT_TRUE(a.detected());
    std::vector<Splat2D<double>> sp;
    for (int i = 0; i < 2; ++i)
        sp.push_back(*project(apply_delta(s.gaussians[i], d[i]).cast<double>(), cam));
    std::sort(sp.begin(), sp.end(), [](auto& x, auto& y) { return x.depth < y.depth; });
    Aabb want{64, 64, -1, -1};
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            const auto r = blend_pixel(sp, Eigen::Vector2d(x, y));
            if (r.rgb.cwiseMin(1.0).maxCoeff() > kDefaultRgbThreshold) {
                want.x_min = std::min(want.x_min, x), want.x_max = std::max(want.x_max, x);
                want.y_min = std::min(want.y_min, y), want.y_max = std::max(want.y_max, y);
            }
        }
    EXPECT_EQ(*a.aabb, want);
}

TEST(RenderMask, FieldPathMatchesDeltaPath) {
    FieldConfig cfg;
    cfg.depth = 2;
    cfg.width = 8;
    cfg.mu_encoding = {2, true};
    cfg.p_encoding = {2, true};
    auto f = DeformationField<float>::create(cfg, 3);
    f.biases.back()[1] = 0.2f;  // every Gaussian shifts by 0.2 in y
    Scene<float> s;
    s.add(blob(0, 0, 2, 0.05f, {1, 1, 1}));
    s.add(blob(0.1f, 0.1f, 2, 0.05f, {1, 1, 1}));
    const auto cam = axis_camera(48, 48, 60);
    const KinematicState p;
    const auto a = render_mask(s, f, p, NormalizationRanges{}, cam, DeltaThresholds{});
    const auto b = annotate_with_deltas(s, predict_scene_deltas(f, s, p, NormalizationRanges{}), cam, DeltaThresholds{});
    EXPECT_EQ(a.mask.data, b.mask.data);
    EXPECT_TRUE(a.detected());
}

TEST(RenderMask, SubsetOfInstrumentContribution) {
    std::mt19937_64 rng(63);
    std::uniform_real_distribution<float> u(-1, 1);
    Scene<float> s;
    for (int i = 0; i < 40; ++i) s.add(blob(0.6f * u(rng), 0.6f * u(rng), 3.0f, 0.08f, {0.8f, 0.4f, 0.4f}));
    for (int i = 0; i < 8; ++i) s.add(blob(0.3f * u(rng), 0.3f * u(rng), 2.0f, 0.04f, {0.7f, 0.7f, 0.8f}));
    Deltas<float> d(s.size());
    for (std::size_t i = 40; i < s.size(); ++i) d[i].d_mu = {0.1f, 0.0f, 0.0f};
    const auto cam = axis_camera(48, 48, 60);
    const auto a = annotate_with_deltas(s, d, cam, DeltaThresholds{});
    // Instrument contribution in the full render: change the instrument colors and diff.
    Scene<float> recolored = s;
    for (std::size_t i = 40; i < s.size(); ++i) recolored.gaussians[i].sh.row(0) = rgb_to_dc(Vec3<float>(0, 1, 0));
    const auto full = render(s, cam, &d).image, alt = render(recolored, cam, &d).image;
    int on = 0;
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 48; ++x) {
            if (!a.mask.at(y, x)) continue;
            ++on;
            bool differs = false;
            for (int c = 0; c < 3; ++c) differs |= full.at(y, x, c) != alt.at(y, x, c);
            EXPECT_TRUE(differs) << x << "," << y;
        }
    EXPECT_GT(on, 0);
}

TEST(ExtractBoxes, FilledRectangle) {
    Mask m = empty_mask(40, 30);
    for (int y = 5; y <= 14; ++y)
        for (int x = 8; x <= 27; ++x) m.at(y, x) = 255;
    const auto b = extract_boxes(m);
    ASSERT_TRUE(b.aabb && b.contour_box);
    EXPECT_EQ(*b.aabb, (Aabb{8, 5, 27, 14}));
    EXPECT_NEAR(b.contour_box->area(), b.aabb->area(), 1e-9);
    for (const auto& c : b.contour_box->corners) {
        EXPECT_TRUE(std::abs(c.x() - 8) < 1e-9 || std::abs(c.x() - 27) < 1e-9);
        EXPECT_TRUE(std::abs(c.y() - 5) < 1e-9 || std::abs(c.y() - 14) < 1e-9);
    }
}

TEST(ExtractBoxes, SinglePixel) {
    Mask m = empty_mask(20, 20);
    m.at(9, 7) = 255;
    const auto b = extract_boxes(m);
    ASSERT_TRUE(b.aabb);
    EXPECT_EQ(*b.aabb, (Aabb{7, 9, 7, 9}));
    EXPECT_EQ(b.contour_box->area(), 0.0);
}

TEST(ExtractBoxes, EmptyMask) {
    const auto b = extract_boxes(empty_mask(10, 10));
    EXPECT_FALSE(b.aabb.has_value());
    EXPECT_FALSE(b.contour_box.has_value());
}

TEST(ExtractBoxes, RotatedSquare) {
    const double side = 40, half = side / std::sqrt(2.0);
    Mask m = empty_mask(100, 100);
    for (int y = 0; y < 100; ++y)
        for (int x = 0; x < 100; ++x)
            if (std::abs(x - 50.0) + std::abs(y - 50.0) <= half) m.at(y, x) = 255;
    const auto b = extract_boxes(m);
    ASSERT_TRUE(b.aabb && b.contour_box);
    EXPECT_NEAR(b.contour_box->area() / (side * side), 1.0, 0.05);
    EXPECT_NEAR(b.aabb->area() / (2 * side * side), 1.0, 0.05);
}

TEST(ExtractBoxes, LargestComponentOnly) {
    Mask m = empty_mask(60, 40);
    for (int y = 2; y <= 4; ++y)
        for (int x = 2; x <= 4; ++x) m.at(y, x) = 255;
    for (int y = 10; y <= 30; ++y)
        for (int x = 20; x <= 50; ++x) m.at(y, x) = 255;
    m.at(31, 51) = 255;  // diagonal neighbour joins under 8-connectivity
    const auto b = extract_boxes(m);
    EXPECT_EQ(*b.aabb, (Aabb{2, 2, 51, 31}));
    EXPECT_EQ(largest_component(m).size(), 21u * 31u + 1u);
    for (const auto& c : b.contour_box->corners) EXPECT_GE(c.x(), 19.99);
}

TEST(ExtractBoxes, BoxesContainComponent) {
    std::mt19937_64 rng(64);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 30; ++t) {
        Mask m = empty_mask(64, 64);
        const double cx = 20 + 24 * u(rng), cy = 20 + 24 * u(rng), a = 3 + 15 * u(rng), bb = 2 + 8 * u(rng);
        const double th = 3.14159 * u(rng);
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) {
                const double dx = x - cx, dy = y - cy;
                const double p = (dx * std::cos(th) + dy * std::sin(th)) / a, q = (-dx * std::sin(th) + dy * std::cos(th)) / bb;
                if (p * p + q * q <= 1) m.at(y, x) = 255;
            }
        const auto b = extract_boxes(m);
        ASSERT_TRUE(b.aabb);
        EXPECT_LE(b.contour_box->area(), b.aabb->area() + 1e-9);
        for (const auto& px : largest_component(m)) {
            const Eigen::Vector2d p(px.x(), px.y());
            EXPECT_TRUE(inside(*b.contour_box, p, 1e-6)) << t;
            EXPECT_TRUE(px.x() >= b.aabb->x_min && px.x() <= b.aabb->x_max);
            EXPECT_TRUE(px.y() >= b.aabb->y_min && px.y() <= b.aabb->y_max);
        }
    }
}

TEST(AnnotationExport, RoundTrip) {
    Scene<float> s;
    s.add(blob(0.05f, 0.02f, 2, 0.07f, {0.9f, 0.9f, 0.9f}));
    s.add(blob(-0.1f, 0.06f, 2.1f, 0.05f, {0.9f, 0.9f, 0.9f}));
    Deltas<float> d(2);
    d[0].d_mu = {0.1f, 0.0f, 0.0f};
    d[1].d_rot = {0.0f, 0.0f, 0.3f, 0.0f};
    const auto a = annotate_with_deltas(s, d, axis_camera(48, 40, 50), DeltaThresholds{});
    ASSERT_TRUE(a.detected());
    const auto dir = testutil::temp_dir("annotation_rt");
    const auto files = io::write_annotation(dir, "frame_007", a);
    const auto back = io::read_annotation(dir, "frame_007");
    EXPECT_EQ(back.mask.data, a.mask.data);
    EXPECT_EQ(back.mask.channels, 1);
    EXPECT_EQ(*back.aabb, *a.aabb);
    EXPECT_EQ(*back.contour_box, *a.contour_box);
    const json j = json::parse(io::read_text(files.boxes));
    EXPECT_EQ(j["frame_id"], "frame_007");
    EXPECT_EQ(j["aabb"][2].get<int>(), a.aabb->x_max - a.aabb->x_min + 1);
    EXPECT_EQ(j["contour_box"].size(), 4u);
    const std::string yolo = io::read_text(files.yolo);
    EXPECT_EQ(yolo.substr(0, 2), "0 ");
    double cx, cy, w, h;
    ASSERT_EQ(std::sscanf(yolo.c_str() + 2, "%lf %lf %lf %lf", &cx, &cy, &w, &h), 4);
    EXPECT_NEAR(w, (a.aabb->x_max - a.aabb->x_min + 1) / 48.0, 1e-6);
    EXPECT_NEAR(cy, (a.aabb->y_min + a.aabb->y_max + 1) / 2.0 / 40.0, 1e-6);
    std::filesystem::remove_all(dir);
}

TEST(AnnotationExport, NoDetectionWritesNulls) {
    AnnotationOutput a;
    a.mask = empty_mask(16, 16);
    const auto dir = testutil::temp_dir("annotation_empty");
    const auto files = io::write_annotation(dir, "f", a);
    const json j = json::parse(io::read_text(files.boxes));
    EXPECT_TRUE(j["aabb"].is_null());
    EXPECT_TRUE(j["contour_box"].is_null());
    EXPECT_EQ(io::read_text(files.yolo), "");
    EXPECT_FALSE(io::read_annotation(dir, "f").detected());
    std::filesystem::remove_all(dir);
}

TEST(MaskIou, Basics) {
    Mask a = empty_mask(4, 4), b = empty_mask(4, 4);
    EXPECT_EQ(mask_iou(a, b), 1.0);
    a.data[0] = a.data[1] = 255;
    b.data[1] = b.data[2] = 255;
    EXPECT_NEAR(mask_iou(a, b), 1.0 / 3.0, 1e-15);
}
