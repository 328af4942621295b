#include "gradcheck.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace dgs;
using testutil::axis_camera;
using testutil::random_gaussian;

namespace {

/// Front-to-back sum expanded with no early termination.
Eigen::Vector3d brute_force_blend(const std::vector<Splat2D<double>>& sorted, const Eigen::Vector2d& pix) {
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& s = sorted[i];
        const Eigen::Vector2d d = pix - s.uv;
        double a = std::min(0.99, s.alpha_base * std::exp(-0.5 * d.dot(s.cov2d.inverse() * d)));
        if (a < 1.0 / 255.0) a = 0;
        double t = 1;
        for (std::size_t j = 0; j < i; ++j) {
            const Eigen::Vector2d dj = pix - sorted[j].uv;
            double aj = std::min(0.99, sorted[j].alpha_base * std::exp(-0.5 * dj.dot(sorted[j].cov2d.inverse() * dj)));
            if (aj < 1.0 / 255.0) aj = 0;
            t *= 1 - aj;
        }
        c += a * t * s.rgb;
    }
    return c;
}

std::vector<Splat2D<double>> random_splats(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<Splat2D<double>> v;
    for (int i = 0; i < n; ++i) {
        Eigen::Matrix2d l;
        l << 0.5 + 2 * u(rng), 0, 2 * u(rng) - 1, 0.5 + 2 * u(rng);
        v.push_back(Splat2D<double>::from_cov({4 * u(rng) - 2, 4 * u(rng) - 2}, l * l.transpose(), 1 + u(rng),
                                              {u(rng), u(rng), u(rng)}, u(rng)));
    }
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.depth < b.depth; });
    return v;
}

Scene<double> random_scene(std::mt19937_64& rng, int n, int sh_degree) {
    Scene<double> s;
    for (int i = 0; i < n; ++i) s.add(random_gaussian<double>(rng, sh_degree));
    s.raise_sh_degree(sh_degree);
    return s;
}

Image<double> random_weights(int w, int h, std::mt19937_64& rng) {
    Image<double> img = testutil::random_image<double>(w, h, rng);
    for (auto& v : img.data) v = 2 * v - 1;
    return img;
}

}  // namespace

TEST(Project, OnAxis) {
    Gaussian<double> g;
    g.mu = {0, 0, 1};
    const auto s = project(g, axis_camera(100, 100, 100));
    ASSERT_TRUE(s.has_value());
    EXPECT_EQ(s->uv, Eigen::Vector2d(50, 50));
    EXPECT_EQ(s->depth, 1.0);
}

TEST(Project, BehindCameraCulled) {
    Gaussian<double> g;
    g.mu = {0, 0, -1};
    EXPECT_FALSE(project(g, axis_camera(100, 100, 100)).has_value());
    g.mu = {0, 0, 0.005};
    EXPECT_FALSE(project(g, axis_camera(100, 100, 100)).has_value());
}

TEST(Project, OutsideGuardBandCulled) {
    Gaussian<double> g;
    g.mu = {5, 0, 1};
    g.log_scale = Eigen::Vector3d::Constant(std::log(0.001));
    EXPECT_FALSE(project(g, axis_camera(100, 100, 100)).has_value());
}

TEST(Project, DegenerateFootprintHitsLowPassFloor) {
    Gaussian<double> g;
    g.mu = {0, 0, 2};
    g.log_scale = Eigen::Vector3d::Constant(std::log(1e-7));
    const auto s = project(g, axis_camera(100, 100, 100));
    ASSERT_TRUE(s.has_value());
    EXPECT_LT((s->cov2d - 0.3 * Eigen::Matrix2d::Identity()).norm(), 1e-9);
}

TEST(Project, CovarianceIsJacobianSandwich) {
    std::mt19937_64 rng(11);
    const auto cam = CameraPose::look_at({0.3, -0.2, -2}, {0, 0, 0}, {0, -1, 0}, {40, 44, 16, 15}, 32, 30);
    for (int t = 0; t < 20; ++t) {
        Gaussian<double> g = random_gaussian<double>(rng);
        g.mu -= Eigen::Vector3d(0, 0, 2);
        const auto s = project(g, cam);
        if (!s) continue;
        const Eigen::Vector3d tc = cam.rotation() * g.mu + cam.translation();
        Eigen::Matrix<double, 2, 3> j;
        j << 40 / tc.z(), 0, -40 * tc.x() / (tc.z() * tc.z()), 0, 44 / tc.z(), -44 * tc.y() / (tc.z() * tc.z());
        const Eigen::Matrix2d want =
            j * cam.rotation() * realize_covariance(g) * cam.rotation().transpose() * j.transpose() +
            0.3 * Eigen::Matrix2d::Identity();
        EXPECT_LT((s->cov2d - want).norm(), 1e-10 * want.norm());
        EXPECT_NEAR(s->uv.x(), 40 * tc.x() / tc.z() + 16, 1e-10);
        EXPECT_NEAR(s->uv.y(), 44 * tc.y() / tc.z() + 15, 1e-10);
    }
}

TEST(AlphaAt, Examples) {
    const auto s = Splat2D<double>::from_cov({3, 4}, Eigen::Matrix2d::Identity() * 2, 1, {1, 1, 1}, 0.8);
    EXPECT_DOUBLE_EQ(alpha_at(s, Eigen::Vector2d(3, 4)), 0.8);
    EXPECT_EQ(alpha_at(s, Eigen::Vector2d(1e6, 4)), 0.0);
    const auto unit = Splat2D<double>::from_cov({0, 0}, Eigen::Matrix2d::Identity(), 1, {1, 1, 1}, 1.0);
    EXPECT_NEAR(alpha_at(unit, Eigen::Vector2d(1, 0)), std::exp(-0.5), 1e-15);
    EXPECT_NEAR(alpha_at(unit, Eigen::Vector2d(1, 0)), 0.6065, 1e-4);
    EXPECT_EQ(alpha_at(unit, Eigen::Vector2d(0, 0)), 0.99);
    // exp(-0.5 * 11.2) = 0.0037 < 1/255
    EXPECT_EQ(alpha_at(unit, Eigen::Vector2d(std::sqrt(11.2), 0)), 0.0);
}

TEST(BlendPixel, SingleOpaqueSplat) {
    const auto s = Splat2D<double>::from_cov({0, 0}, Eigen::Matrix2d::Identity(), 1, {1, 0, 0}, 1.0);
    const auto r = blend_pixel<double>({s}, Eigen::Vector2d(0, 0));
    EXPECT_NEAR((r.rgb - Eigen::Vector3d(0.99, 0, 0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR(r.alpha_total, 0.99, 1e-15);
}

TEST(BlendPixel, TwoHalfSplats) {
    const auto a = Splat2D<double>::from_cov({0, 0}, Eigen::Matrix2d::Identity(), 1, {1, 1, 1}, 0.5);
    const auto b = Splat2D<double>::from_cov({0, 0}, Eigen::Matrix2d::Identity(), 2, {0, 0, 0}, 0.5);
    const auto r = blend_pixel<double>({a, b}, Eigen::Vector2d(0, 0));
    EXPECT_DOUBLE_EQ(r.rgb[0], 0.5);
    EXPECT_DOUBLE_EQ(r.alpha_total, 0.75);
    ASSERT_EQ(r.transmittances.size(), 2u);
    EXPECT_EQ(r.transmittances[1], 0.5);
}

TEST(BlendPixel, MatchesBruteForce) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 1000; ++t) {
        const auto v = random_splats(rng, 1 + t % 5);
        const auto r = blend_pixel(v, Eigen::Vector2d(0, 0));
        EXPECT_LT((r.rgb - brute_force_blend(v, Eigen::Vector2d(0, 0))).cwiseAbs().maxCoeff(), 1e-4);
    }
}

TEST(BlendPixel, TransmittanceProperties) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 300; ++t) {
        const auto v = random_splats(rng, 8);
        const auto r = blend_pixel(v, Eigen::Vector2d(0, 0));
        for (std::size_t i = 1; i < r.transmittances.size(); ++i) EXPECT_LE(r.transmittances[i], r.transmittances[i - 1]);
        EXPECT_GE(r.alpha_total, 0.0);
        EXPECT_LE(r.alpha_total, 1.0);
    }
}

TEST(BlendPixel, WhiteSplatNeverDecreases) {
    std::mt19937_64 rng(14);
    for (int t = 0; t < 200; ++t) {
        const auto v = random_splats(rng, 6);
        for (std::size_t k = 0; k <= v.size(); ++k) {
            std::vector<Splat2D<double>> prefix(v.begin(), v.begin() + static_cast<long>(k));
            const auto base = blend_pixel(prefix, Eigen::Vector2d(0, 0)).rgb;
            auto white = Splat2D<double>::from_cov({0, 0}, Eigen::Matrix2d::Identity(), 9, {1, 1, 1}, 0.7);
            prefix.push_back(white);
            const auto more = blend_pixel(prefix, Eigen::Vector2d(0, 0)).rgb;
            for (int c = 0; c < 3; ++c) EXPECT_GE(more[c], base[c]);
        }
    }
}

TEST(Render, EmptySceneIsBlack) {
    const auto out = render(Scene<float>{}, axis_camera(20, 10, 10));
    for (float v : out.image.data) EXPECT_EQ(v, 0.0f);
    for (float v : out.alpha_map.data) EXPECT_EQ(v, 0.0f);
}

TEST(Render, ZeroDeltasIdentical) {
    std::mt19937_64 rng(15);
    Scene<float> s;
    for (int i = 0; i < 30; ++i) s.add(random_gaussian<float>(rng));
    const auto cam = axis_camera(32, 32, 40);
    const Deltas<float> d(s.size());
    EXPECT_EQ(render(s, cam).image.data, render(s, cam, &d).image.data);
}

TEST(Render, DeltaShiftMovesSplat) {
    Scene<double> s;
    Gaussian<double> g;
    g.mu = {-0.5, 0, 1};
    g.log_scale = Eigen::Vector3d::Constant(std::log(0.01));
    g.opacity_logit = 5;
    s.add(g);
    const auto cam = axis_camera(256, 64, 100);
    Deltas<double> d(1);
    d[0].d_mu = {1, 0, 0};
    const auto before = project(g, cam), after = project(apply_delta(g, d[0]), cam);
    ASSERT_TRUE(before && after);
    EXPECT_NEAR(after->uv.x() - before->uv.x(), 100.0, 1e-9);
    auto argmax_col = [](const Image<double>& img) {
        int best = 0;
        for (int x = 0; x < img.width; ++x)
            if (img.at(32, x, 0) > img.at(32, best, 0)) best = x;
        return best;
    };
    EXPECT_EQ(argmax_col(render(s, cam, &d).image) - argmax_col(render(s, cam).image), 100);
}

TEST(Render, DeltaCountMismatchThrows) {
    Scene<float> s;
    s.add(Gaussian<float>{});
    const Deltas<float> d(2);
    EXPECT_THROW(render(s, axis_camera(8, 8, 8), &d), ShapeError);
}

TEST(Render, OrderInvariant) {
    std::mt19937_64 rng(16);
    Scene<float> s;
    for (int i = 0; i < 40; ++i) s.add(random_gaussian<float>(rng));
    const auto cam = axis_camera(32, 32, 40);
    const auto ref = render(s, cam).image.data;
    for (int t = 0; t < 5; ++t) {
        Scene<float> p = s;
        std::shuffle(p.gaussians.begin(), p.gaussians.end(), rng);
        EXPECT_EQ(render(p, cam).image.data, ref);
    }
}

TEST(Render, ZeroOpacityIsBackground) {
    std::mt19937_64 rng(17);
    Scene<float> s;
    for (int i = 0; i < 20; ++i) {
        auto g = random_gaussian<float>(rng);
        g.opacity_logit = -1e30f;
        s.add(g);
    }
    const auto out = render(s, axis_camera(32, 32, 40));
    for (float v : out.image.data) EXPECT_EQ(v, 0.0f);
}

TEST(Render, TilesMatchPerPixelBlend) {
    std::mt19937_64 rng(18);
    Scene<double> s = random_scene(rng, 60, 2);
    const auto cam = axis_camera(40, 36, 60);
    const auto out = render(s, cam);
    std::vector<Splat2D<double>> splats;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (auto sp = project(s.gaussians[i], cam, 2)) {
            sp->index = static_cast<int>(i);
            splats.push_back(*sp);
        }
    std::stable_sort(splats.begin(), splats.end(), [](const auto& a, const auto& b) { return a.depth < b.depth; });
    std::vector<double> max_alpha(s.size(), 0.0);
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) {
            const auto r = blend_pixel(splats, Eigen::Vector2d(x, y));
            for (int c = 0; c < 3; ++c) EXPECT_NEAR(out.image.at(y, x, c), r.rgb[c], 1e-12);
            EXPECT_NEAR(out.alpha_map.at(y, x), r.alpha_total, 1e-12);
        }
    for (const auto& sp : splats)
        for (int y = 0; y < cam.height; ++y)
            for (int x = 0; x < cam.width; ++x)
                max_alpha[sp.index] = std::max(max_alpha[sp.index], alpha_at(sp, Eigen::Vector2d(x, y)));
    // Early termination can hide a splat at some pixels, so the renderer's value is a lower bound.
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LE(out.per_gaussian_max_alpha[i], max_alpha[i] + 1e-15);
}

TEST(Render, AlphaMapInUnitRange) {
    std::mt19937_64 rng(19);
    Scene<float> s;
    for (int i = 0; i < 80; ++i) s.add(random_gaussian<float>(rng));
    const auto out = render(s, axis_camera(32, 32, 40));
    for (float v : out.alpha_map.data) {
        EXPECT_GE(v, 0.0f);
        EXPECT_LE(v, 1.0f);
    }
}

TEST(RenderBackward, ZeroUpstreamGivesZero) {
    std::mt19937_64 rng(20);
    Scene<float> s;
    for (int i = 0; i < 10; ++i) s.add(random_gaussian<float>(rng));
    s.raise_sh_degree(3);
    const auto cam = axis_camera(32, 32, 40);
    const auto fp = render_forward(s, cam);
    const auto g = render_backward(fp, cam, Image<float>(32, 32, 3));
    for (const auto& p : g.params) {
        EXPECT_TRUE(p.d_mu.isZero(0) && p.d_rot.isZero(0) && p.d_log_scale.isZero(0) && p.d_sh.isZero(0));
        EXPECT_EQ(p.d_opacity_logit, 0.0f);
    }
}

TEST(RenderBackward, ShapeMismatchThrows) {
    Scene<float> s;
    s.add(Gaussian<float>{});
    const auto cam = axis_camera(16, 16, 20);
    const auto fp = render_forward(s, cam);
    EXPECT_THROW(render_backward(fp, cam, Image<float>(15, 16, 3)), ShapeError);
}

TEST(RenderBackward, SingleGaussianMuX) {
    std::mt19937_64 rng(21);
    Scene<double> s = random_scene(rng, 1, 0);
    const auto cam = axis_camera(32, 32, 40);
    const auto w = random_weights(32, 32, rng);
    const auto fp = render_forward(s, cam);
    const double analytic = render_backward(fp, cam, w).params[0].d_mu.x();
    auto loss = [&] {
        const auto img = render(s, cam).image;
        double v = 0;
        for (std::size_t i = 0; i < img.size(); ++i) v += w.data[i] * img.data[i];
        return v;
    };
    const double numeric = gradcheck::central(loss, s.gaussians[0].mu.x(), 1e-4).value;
    EXPECT_LT(std::abs(analytic - numeric) / std::abs(numeric), 1e-3) << analytic << " vs " << numeric;
}

TEST(RenderBackward, TenGaussianSweepFloat) {
    std::mt19937_64 rng(22);
    const auto cam = axis_camera(32, 32, 40);
    for (int t = 0; t < 3; ++t) {
        const Scene<double> s = random_scene(rng, 10, 3);
        const auto r = gradcheck::check_render<float>(s, cam, random_weights(32, 32, rng));
        EXPECT_GT(r.checked, 300);
        EXPECT_LE(r.skipped, r.checked / 50);
        EXPECT_LT(r.max_rel, 1e-2) << r.worst;
    }
}

TEST(RenderBackward, SmallScenesDouble) {
    std::mt19937_64 rng(23);
    const auto cam = axis_camera(32, 32, 40);
    for (int t = 0; t < 5; ++t) {
        const Scene<double> s = random_scene(rng, 20, t % 4);
        const auto r = gradcheck::check_render<double>(s, cam, random_weights(32, 32, rng));
        EXPECT_GT(r.checked, 200);
        EXPECT_LE(r.skipped, r.checked / 50);
        EXPECT_LT(r.max_rel, 1e-4) << r.worst;
    }
}

TEST(RenderBackward, AccumulatesScreenGradients) {
    std::mt19937_64 rng(24);
    Scene<float> s;
    for (int i = 0; i < 10; ++i) s.add(random_gaussian<float>(rng));
    s.reset_accumulators();
    const auto cam = axis_camera(32, 32, 40);
    const auto fp = render_forward(s, cam);
    const auto g = render_backward(fp, cam, testutil::random_image<float>(32, 32, rng), &s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!g.visible[i]) {
            EXPECT_EQ(s.grad_accum[i].count, 0);
            continue;
        }
        EXPECT_EQ(s.grad_accum[i].count, 1);
        EXPECT_NEAR(s.grad_accum[i].norm_sum, g.screen_grad[i].norm(), 1e-6f);
    }
}
