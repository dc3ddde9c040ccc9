#include "polsdf/loss.hpp"
#include "gradcheck.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace polsdf;

namespace {

Mat2 diag(double a, double b) { return Vec2(a, b).asDiagonal(); }

PixelTarget target(double dop, double aop = 0.0) {
    PixelTarget t;
    t.rgb = Vec3(0.2, 0.4, 0.6);
    t.mask = 1.0;
    t.dop = dop;
    t.aop = aop;
    t.prior_valid = true;
    t.prior.mean = Vec2(1, 0);
    t.prior.cov = diag(4, 1);
    t.prior.valid = true;
    return t;
}

PixelPrediction prediction(const Vec3 &color, const Vec2 &normal, const Vec3 &cov) {
    PixelPrediction p;
    p.color = color;
    p.opacity = 0.7;
    p.normal = normal;
    p.cov = cov;
    p.eikonal_sum = 0.3;
    p.eikonal_count = 4;
    p.valid = true;
    return p;
}

}  // namespace

TEST(AngularDistance, Examples) {
    EXPECT_NEAR(angular_distance(0.1, 0.1 + kPi), 0.0, 1e-12);
    EXPECT_NEAR(angular_distance(0.0, kPi / 2), kPi / 2, 1e-15);
    EXPECT_NEAR(angular_distance(3.1, 0.05), kPi - 3.05, 1e-12);
}

TEST(AngularDistance, MatchesShiftSweepOracle) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int n = 0; n < 10000; ++n) {
        const double a = u(rng), b = u(rng);
        // a and b are within 10 rad of each other, so shifts k in [-8, 8] cover every representative.
        double best = 1e9;
        for (int k = -8; k <= 8; ++k) best = std::min(best, std::abs(a - (b + k * kPi)));
        const double d = angular_distance(a, b);
        EXPECT_NEAR(d, best, 1e-12);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, kPi / 2 + 1e-15);
    }
}

TEST(CovLoss, Examples) {
    Gaussian2 a{Vec2(1, 0), diag(4, 1), true};
    EXPECT_NEAR(cov_loss(a, a, 0.1), 0.0, 1e-15);

    Gaussian2 b{Vec2(1, 0), diag(1, 4), true};  // same eigenvalues, axes swapped
    EXPECT_NEAR(cov_loss(a, b, 0.1), 0.1, 1e-12);

    Gaussian2 iso{Vec2(1, 0), diag(2, 2), true};
    EXPECT_NEAR(cov_loss(a, iso, 0.0), 0.75, 1e-12);
    EXPECT_NEAR(cov_loss(a, iso, 0.1), 0.75, 1e-12);  // isotropic prior has no axis
}

TEST(CovLoss, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int n = 0; n < 200; ++n) {
        Mat2 a, b;
        a << g(rng), g(rng), g(rng), g(rng);
        b << g(rng), g(rng), g(rng), g(rng);
        const Mat2 p = a * a.transpose(), q = b * b.transpose();
        const Vec3 x(p(0, 0), p(0, 1), p(1, 1));
        const CovLoss c = cov_loss(x, q, 0.1);
        for (int k = 0; k < 3; ++k) {
            const double h = 1e-6;
            Vec3 xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            const double fd = (cov_loss(xp, q, 0.1).value - cov_loss(xm, q, 0.1).value) / (2 * h);
            EXPECT_NEAR(c.grad[k], fd, 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST(TotalLoss, ZeroDopAnnihilatesPolarizationTerms) {
    const PixelPrediction p[] = {prediction(Vec3(0.1, 0.1, 0.1), Vec2(0.3, 0.4), Vec3(0.1, 0.0, 0.02))};
    const PixelTarget t[] = {target(0.0, 1.0)};
    const LossBreakdown b = total_loss(p, t, LossWeights{}, LossToggles{}, 100, 100);
    EXPECT_EQ(b.mean, 0.0);
    EXPECT_EQ(b.cov, 0.0);
    EXPECT_GT(b.color, 0.0);
}

TEST(TotalLoss, FullDopRemovesColorTerm) {
    const PixelPrediction p[] = {prediction(Vec3(1, 0, 1), Vec2(0.3, 0.4), Vec3(0.1, 0.0, 0.02))};
    const PixelTarget t[] = {target(1.0, 1.0)};
    const LossBreakdown b = total_loss(p, t, LossWeights{}, LossToggles{}, 100, 100);
    EXPECT_EQ(b.color, 0.0);
    EXPECT_GT(b.mean, 0.0);
}

TEST(TotalLoss, TotalRecomposesFromParts) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<PixelPrediction> preds;
    std::vector<PixelTarget> targets;
    for (int i = 0; i < 50; ++i) {
        preds.push_back(prediction(Vec3(u(rng), u(rng), u(rng)), Vec2(u(rng) - 0.5, u(rng) - 0.5),
                                   Vec3(u(rng), 0.1 * u(rng), u(rng))));
        targets.push_back(target(u(rng), kPi * u(rng)));
    }
    const LossWeights w{1.0, 0.5, 0.1, 0.1, 0.1, 0.25};
    const LossBreakdown b = total_loss(preds, targets, w, LossToggles{}, 80, 100);
    const double hand = 1.0 * b.color + 0.5 * (b.mean + b.cov) + 0.1 * b.eikonal + 0.1 * b.mask;
    EXPECT_NEAR(b.total, hand, 1e-12);
    EXPECT_GE(b.color, 0.0);
    EXPECT_GE(b.mean, 0.0);
    EXPECT_GE(b.cov, 0.0);
    EXPECT_GE(b.eikonal, 0.0);
    EXPECT_GE(b.mask, 0.0);
}

TEST(TotalLoss, ColorIsWeightedMeanSquaredError) {
    const PixelPrediction p[] = {prediction(Vec3(0.5, 0.4, 0.6), Vec2(1, 0), Vec3::Zero()),
                                 prediction(Vec3(0.2, 0.4, 0.0), Vec2(1, 0), Vec3::Zero())};
    const PixelTarget t[] = {target(0.25), target(0.5)};
    const LossBreakdown b = total_loss(p, t, LossWeights{}, LossToggles{}, 0, 100);
    const double e0 = (0.09 + 0.0 + 0.0) / 3.0, e1 = (0.0 + 0.0 + 0.36) / 3.0;
    EXPECT_NEAR(b.color, (0.75 * e0 + 0.5 * e1) / 2.0, 1e-15);
    EXPECT_NEAR(b.eikonal, 0.6 / 8.0, 1e-15);
    EXPECT_NEAR(b.mask, -std::log(0.7), 1e-15);
}

TEST(TotalLoss, CovInactiveBeforeActivationFraction) {
    const PixelPrediction p[] = {prediction(Vec3::Zero(), Vec2(1, 0), Vec3(1.0, 0.0, 1.0))};
    const PixelTarget t[] = {target(0.8)};
    EXPECT_EQ(total_loss(p, t, LossWeights{}, LossToggles{}, 24, 100).cov, 0.0);
    EXPECT_GT(total_loss(p, t, LossWeights{}, LossToggles{}, 25, 100).cov, 0.0);
    EXPECT_TRUE(cov_active_at(LossWeights{}, 25, 100));
    EXPECT_FALSE(cov_active_at(LossWeights{}, 24, 100));
}

TEST(TotalLoss, MeanTermUsesAopOfRotatedNormal) {
    // Projected normal along +x has azimuth 0, so its AoP is pi/2.
    const PixelPrediction p[] = {prediction(Vec3::Zero(), Vec2(0.5, 0.0), Vec3::Zero())};
    const PixelTarget hit[] = {target(1.0, kPi / 2)};
    const PixelTarget miss[] = {target(1.0, kPi / 2 - 0.3)};
    const LossToggles mean_only{true, false, true};
    EXPECT_NEAR(total_loss(p, hit, LossWeights{}, mean_only, 0, 1).mean, 0.0, 1e-15);
    EXPECT_NEAR(total_loss(p, miss, LossWeights{}, mean_only, 0, 1).mean, 0.3, 1e-12);
}

TEST(TotalLoss, MisalignedInputsThrow) {
    const PixelPrediction p[] = {PixelPrediction{}};
    EXPECT_THROW(total_loss(p, std::span<const PixelTarget>{}, LossWeights{}, LossToggles{}, 0, 1), DataError);
}

TEST(Reweighting, RaisingDopShiftsWeightFromColorToPolarization) {
    const PixelPrediction pred = prediction(Vec3(0.9, 0.1, 0.3), Vec2(0.2, 0.5), Vec3(0.3, 0.05, 0.1));
    LossContext ctx{LossWeights{}, LossToggles{}, true, BatchNorms{1.0, 1.0, 1.0, 4.0}};
    double prev_color = 1e9, prev_polar = -1.0;
    for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        LossBreakdown b;
        accumulate_pixel_loss(pred, target(rho, 0.4), ctx, b, nullptr);
        EXPECT_LT(b.color, prev_color);
        EXPECT_GT(b.mean + b.cov, prev_polar);
        prev_color = b.color;
        prev_polar = b.mean + b.cov;
    }
}

TEST(Ablations, NamedToggles) {
    LossWeights w;
    const LossToggles c = ablation_toggles("color-only", w);
    EXPECT_EQ(w.polar, 0.0);
    EXPECT_FALSE(c.use_mean);
    EXPECT_FALSE(c.use_cov);
    LossWeights w2;
    const LossToggles m = ablation_toggles("mean", w2);
    EXPECT_TRUE(m.use_mean);
    EXPECT_FALSE(m.use_cov);
    EXPECT_FALSE(m.reweight);
    EXPECT_TRUE(ablation_toggles("rew-cov", w2).reweight);
    EXPECT_THROW(ablation_toggles("nope", w2), Error);
}

TEST(LossWeights, Validation) {
    LossWeights w;
    EXPECT_NO_THROW(w.validate());
    w.eikonal = -1.0;
    EXPECT_THROW(w.validate(), Error);
    LossWeights v;
    v.cov_activation_fraction = 1.5;
    EXPECT_THROW(v.validate(), Error);
}

class TermGradient : public ::testing::TestWithParam<std::string> {};

TEST_P(TermGradient, MatchesCentralDifferences) {
    const auto scene = polsdf::testing::make_gradcheck_scene(17);
    const auto r = polsdf::testing::check_term_gradient(scene, GetParam(), 120, 5);
    EXPECT_GE(r.checked, 100);
    EXPECT_GT(r.loss, 0.0);
    EXPECT_LT(r.max_rel_error, 1e-3);
}

INSTANTIATE_TEST_SUITE_P(AllTerms, TermGradient, ::testing::ValuesIn(polsdf::testing::loss_term_names()),
                         [](const auto &info) { return info.param; });

TEST(Backward, ZeroWeightTermGivesZeroGradient) {
    const auto scene = polsdf::testing::make_gradcheck_scene(3);
    LossContext ctx = polsdf::testing::single_term_context(scene, "color");
    ctx.weights.color = 0.0;
    const DenseGradient g = backward(scene.field, scene.jobs(), ctx);
    for (double v : g.values) ASSERT_EQ(v, 0.0);
}

TEST(Backward, DoublingColorWeightDoublesGradient) {
    const auto scene = polsdf::testing::make_gradcheck_scene(4);
    LossContext ctx = polsdf::testing::single_term_context(scene, "color");
    const DenseGradient a = backward(scene.field, scene.jobs(), ctx);
    ctx.weights.color = 2.0;
    const DenseGradient b = backward(scene.field, scene.jobs(), ctx);
    for (size_t i = 0; i < a.values.size(); ++i) ASSERT_EQ(b.values[i], 2.0 * a.values[i]);
}

TEST(Backward, DeterministicForFixedBatch) {
    const auto scene = polsdf::testing::make_gradcheck_scene(5);
    LossContext ctx = polsdf::testing::single_term_context(scene, "mean");
    ctx.weights = LossWeights{};
    ctx.toggles = LossToggles{};
    const DenseGradient a = backward(scene.field, scene.jobs(), ctx);
    const DenseGradient b = backward(scene.field, scene.jobs(), ctx);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.loss.total, b.loss.total);
}
