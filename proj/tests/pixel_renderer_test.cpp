#include "polsdf/pixel_renderer.hpp"
#include "gradcheck.hpp"

#include <gtest/gtest.h>

using namespace polsdf;

TEST(PixelTape, ForwardMatchesReferenceRenderer) {
    const auto scene = polsdf::testing::make_gradcheck_scene(1, 12);
    const Camera cam = Camera::look_at(Vec3(2.5, 0.3, 0.4), Vec3::Zero(), Vec3::UnitZ(), 12.0, 8, 8);
    PixelTape tape;
    std::mt19937_64 rng(2);
    int checked = 0;
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const RaySamples ray =
                sample_ray(cam.center(), cam.pixel_direction(x, y), scene.field.bbox(), SamplerOptions{48, true}, &rng);
            const PixelPrediction p = tape.forward(scene.field, cam.image_axes(), ray);
            const PixelRender r = render_ray(scene.field, cam, ray);
            ASSERT_EQ(p.valid, r.valid);
            if (!p.valid) continue;
            ++checked;
            EXPECT_LT((p.color - r.color).norm(), 1e-12);
            EXPECT_NEAR(p.opacity, r.opacity, 1e-12);
            EXPECT_LT((p.normal - r.gaussian.mean).norm(), 1e-12);
            EXPECT_NEAR(p.cov.x(), r.gaussian.cov(0, 0), 1e-12);
            EXPECT_NEAR(p.cov.y(), r.gaussian.cov(0, 1), 1e-12);
            EXPECT_NEAR(p.cov.z(), r.gaussian.cov(1, 1), 1e-12);
            EXPECT_EQ(p.eikonal_count, ray.size());
            double eik = 0.0;
            for (const Vec3 &q : ray.points) eik += std::pow(scene.field.sdf_grad(q).norm() - 1.0, 2);
            EXPECT_NEAR(p.eikonal_sum, eik, 1e-12);
        }
    EXPECT_GT(checked, 30);
}

TEST(PixelTape, EmptyRayIsInvalidAndHasNoGradient) {
    const auto scene = polsdf::testing::make_gradcheck_scene(3);
    PixelTape tape;
    const PixelPrediction p = tape.forward(scene.field, Mat23::Zero(), RaySamples{});
    EXPECT_FALSE(p.valid);
    EXPECT_EQ(p.opacity, 0.0);
    GradientList g;
    PixelAdjoint adj;
    adj.opacity = 1.0;
    tape.backward(scene.field, adj, g);
    EXPECT_EQ(g.size(), 0u);
}

TEST(PixelTape, WeightCullOnlyDropsNegligibleSamples) {
    const auto scene = polsdf::testing::make_gradcheck_scene(4);
    PixelTape tape;
    TapeOptions cull{1e-5};
    for (size_t i = 0; i < scene.rays.size(); ++i) {
        const PixelPrediction full = tape.forward(scene.field, scene.axes[i], scene.rays[i]);
        const PixelPrediction culled = tape.forward(scene.field, scene.axes[i], scene.rays[i], cull);
        EXPECT_EQ(full.opacity, culled.opacity);
        // Each dropped sample has weight <= 1e-5 and bounded per-sample quantities.
        const double bound = 1e-5 * scene.rays[i].size() * 10.0;
        EXPECT_LT((full.color - culled.color).norm(), bound);
        EXPECT_LT((full.normal - culled.normal).norm(), bound);
    }
}

TEST(PixelTape, OpacityAdjointMatchesFiniteDifference) {
    auto scene = polsdf::testing::make_gradcheck_scene(6);
    PixelTape tape;
    const size_t ray = scene.rays.size() / 2;
    tape.forward(scene.field, scene.axes[ray], scene.rays[ray]);
    PixelAdjoint adj;
    adj.opacity = 1.0;
    GradientList list;
    tape.backward(scene.field, adj, list);
    std::vector<double> dense(scene.field.param_count(), 0.0);
    for (size_t i = 0; i < list.size(); ++i) dense[list.index[i]] += list.value[i];
    const double h = 1e-5;
    int checked = 0;
    for (size_t p = 0; p < dense.size(); ++p) {
        if (dense[p] == 0.0) continue;
        double &v = scene.field.param(p);
        const double orig = v;
        v = orig + h;
        const double up = tape.forward(scene.field, scene.axes[ray], scene.rays[ray]).opacity;
        v = orig - h;
        const double down = tape.forward(scene.field, scene.axes[ray], scene.rays[ray]).opacity;
        v = orig;
        EXPECT_NEAR(dense[p], (up - down) / (2 * h), 1e-6 * std::max(1.0, std::abs(dense[p]))) << p;
        ++checked;
    }
    EXPECT_GT(checked, 8);
}

TEST(GradientList, AppendsInOrder) {
    GradientList g;
    g.add(3, 0.5);
    g.add(1, -2.0);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g.index[0], 3u);
    EXPECT_EQ(g.value[1], -2.0);
    g.clear();
    EXPECT_EQ(g.size(), 0u);
}
