#include "polsdf/polcore.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace polsdf;

namespace {

PolPriors single(double s0, double s1, double s2) {
    StokesImage img(1, 1);
    img(0, 0) = {s0, s1, s2};
    return stokes_to_priors(img);
}

}  // namespace

TEST(StokesToPriors, HorizontalFullyPolarized) {
    const PolPriors p = single(1.0, 1.0, 0.0);
    ASSERT_TRUE(p.valid(0, 0));
    EXPECT_DOUBLE_EQ(p.aop(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(p.dop(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(p.azimuth(0, 0), kPi / 2);
}

TEST(StokesToPriors, ThreeFourFiveDop) {
    const PolPriors p = single(2.0, 0.6, 0.8);
    EXPECT_NEAR(p.dop(0, 0), 0.5, 1e-15);
}

TEST(StokesToPriors, NegativeS1QuadrantGivesHalfPi) {
    // atan2(0, -1) = pi, halved.
    const PolPriors p = single(1.0, -1.0, 0.0);
    EXPECT_NEAR(p.aop(0, 0), kPi / 2, 1e-15);
    EXPECT_NEAR(p.azimuth(0, 0), 0.0, 1e-15);
}

TEST(StokesToPriors, QuadrantTableAgainstAtan2) {
    // Independent oracle: the angle whose doubled direction is (s1, s2), found by sweeping.
    const double cases[][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}, {0, 1}, {0, -1}, {0.3, -0.9}};
    for (const auto &c : cases) {
        const PolPriors p = single(2.0, c[0], c[1]);
        double best = 0.0, best_err = 1e9;
        for (int k = 0; k < 200000; ++k) {
            const double phi = kPi * k / 200000.0;
            const double err = std::hypot(std::cos(2 * phi) - c[0] / std::hypot(c[0], c[1]),
                                          std::sin(2 * phi) - c[1] / std::hypot(c[0], c[1]));
            if (err < best_err) {
                best_err = err;
                best = phi;
            }
        }
        EXPECT_NEAR(p.aop(0, 0), best, 2e-5) << c[0] << "," << c[1];
        EXPECT_GE(p.aop(0, 0), 0.0);
        EXPECT_LT(p.aop(0, 0), kPi);
    }
}

TEST(StokesToPriors, UnpolarizedPixelIsInvalid) {
    const PolPriors p = single(1.0, 0.0, 0.0);
    EXPECT_FALSE(p.valid(0, 0));
    EXPECT_EQ(p.dop(0, 0), 0.0);
    EXPECT_EQ(p.aop(0, 0), 0.0);
    EXPECT_EQ(p.azimuth(0, 0), 0.0);
}

TEST(StokesToPriors, ThresholdIsRelativeToBrightestPixel) {
    StokesImage img(2, 1);
    img(0, 0) = {1000.0, 500.0, 0.0};
    img(1, 0) = {5e-4, 2e-4, 0.0};  // below 1e-6 * 1000
    const PolPriors p = stokes_to_priors(img);
    EXPECT_TRUE(p.valid(0, 0));
    EXPECT_FALSE(p.valid(1, 0));
}

TEST(StokesToPriors, EmptyImageThrows) { EXPECT_THROW(stokes_to_priors(StokesImage(0, 0)), DataError); }

TEST(StokesToPriors, AzimuthIsAopPlusHalfPiExactly) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    StokesImage img(32, 32);
    for (auto &s : img.data) s = {2.0, u(rng), u(rng)};
    const PolPriors p = stokes_to_priors(img);
    for (size_t i = 0; i < img.data.size(); ++i) {
        ASSERT_TRUE(p.valid.data[i]);
        EXPECT_EQ(p.azimuth.data[i], fold_pi(p.aop.data[i] + kPi / 2));
        EXPECT_GE(p.dop.data[i], 0.0);
        EXPECT_LE(p.dop.data[i], 1.0);
    }
}

TEST(ReweightAop, Products) {
    PolPriors p = single(1.0, 0.0, 0.5);  // phi = pi/4, rho = 0.5
    EXPECT_NEAR(reweight_aop(p)(0, 0), kPi / 8, 1e-15);
    PolPriors z = single(1.0, 0.0, 0.0);
    EXPECT_EQ(reweight_aop(z)(0, 0), 0.0);
}

TEST(ReweightAop, MatchesScalarLoop) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    StokesImage img(17, 9);
    for (auto &s : img.data) s = {1.5, u(rng), u(rng) * (u(rng) > 0.5 ? 0.0 : 1.0)};
    const PolPriors p = stokes_to_priors(img);
    const ScalarMap r = reweight_aop(p);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 17; ++x) EXPECT_EQ(r(x, y), p.valid(x, y) ? p.aop(x, y) * p.dop(x, y) : 0.0);
}

TEST(PriorsFromSynthetic, Examples) {
    ScalarMap aop(2, 1), dop(2, 1, 1.0);
    aop(1, 0) = kPi / 4;
    const StokesImage s = priors_from_synthetic(aop, dop);
    EXPECT_DOUBLE_EQ(s(0, 0).s0, 1.0);
    EXPECT_DOUBLE_EQ(s(0, 0).s1, 1.0);
    EXPECT_DOUBLE_EQ(s(0, 0).s2, 0.0);
    EXPECT_NEAR(s(1, 0).s1, 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(s(1, 0).s2, 1.0);
}

TEST(PriorsFromSynthetic, RejectsDopOutOfRange) {
    ScalarMap aop(1, 1), dop(1, 1, 1.5);
    EXPECT_THROW(priors_from_synthetic(aop, dop), DataError);
    ScalarMap neg(1, 1, -0.1);
    EXPECT_THROW(priors_from_synthetic(aop, neg), DataError);
    EXPECT_THROW(priors_from_synthetic(ScalarMap(2, 1), ScalarMap(1, 2)), DataError);
}

TEST(PriorsFromSynthetic, RoundTripOnRandomMaps) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ua(0.0, kPi), ur(0.0, 1.0);
    ScalarMap aop(64, 48), dop(64, 48);
    for (size_t i = 0; i < aop.data.size(); ++i) {
        aop.data[i] = ua(rng);
        dop.data[i] = ur(rng);
    }
    const PolPriors p = stokes_to_priors(priors_from_synthetic(aop, dop));
    for (size_t i = 0; i < aop.data.size(); ++i) {
        if (dop.data[i] <= 1e-3) continue;
        ASSERT_TRUE(p.valid.data[i]);
        const double d = std::abs(p.aop.data[i] - aop.data[i]);
        EXPECT_LT(std::min(d, kPi - d), 1e-6);
        EXPECT_LT(std::abs(p.dop.data[i] - dop.data[i]), 1e-6);
    }
}

TEST(PriorsFromSynthetic, FoldingPhiByPiLeavesStokesUnchanged) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ua(0.0, kPi), ur(0.0, 1.0);
    ScalarMap a(8, 8), b(8, 8), dop(8, 8);
    for (size_t i = 0; i < a.data.size(); ++i) {
        a.data[i] = ua(rng);
        b.data[i] = a.data[i] + kPi;
        dop.data[i] = ur(rng);
    }
    const StokesImage sa = priors_from_synthetic(a, dop), sb = priors_from_synthetic(b, dop);
    for (size_t i = 0; i < a.data.size(); ++i) {
        EXPECT_NEAR(sa.data[i].s1, sb.data[i].s1, 1e-12);
        EXPECT_NEAR(sa.data[i].s2, sb.data[i].s2, 1e-12);
    }
}

TEST(PolcoreTensors, StokesAndScalarRoundTrip) {
    StokesImage img(3, 2);
    for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = {double(i), -0.5 * i, 0.25 * i};
    const StokesImage back = stokes_from_tensor(stokes_to_tensor(img));
    ASSERT_EQ(back.width, 3);
    ASSERT_EQ(back.height, 2);
    for (size_t i = 0; i < img.data.size(); ++i) {
        EXPECT_EQ(back.data[i].s0, img.data[i].s0);
        EXPECT_EQ(back.data[i].s1, img.data[i].s1);
        EXPECT_EQ(back.data[i].s2, img.data[i].s2);
    }
    ScalarMap m(4, 3);
    for (size_t i = 0; i < m.data.size(); ++i) m.data[i] = 0.5 * double(i);
    const ScalarMap mb = scalar_map_from_tensor(scalar_map_to_tensor(m));
    EXPECT_EQ(mb.data, m.data);
    EXPECT_THROW(stokes_from_tensor(Tensor({2u, 2u})), DataError);
}
