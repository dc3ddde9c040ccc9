#include "polsdf/priors.hpp"

#include <algorithm>
#include <cmath>

namespace polsdf {

Eig2 eig2(const Mat2 &cov) {
    const double a = cov(0, 0), b = 0.5 * (cov(0, 1) + cov(1, 0)), c = cov(1, 1);
    const double mean = 0.5 * (a + c);
    const double half_diff = 0.5 * (a - c);
    const double radius = std::hypot(half_diff, b);
    Eig2 e;
    e.values = Vec2(std::max(mean + radius, 0.0), std::max(mean - radius, 0.0));
    Vec2 v0;
    if (radius > 0.0) {
        const double theta = 0.5 * std::atan2(b, half_diff);
        v0 = unit_vector(theta);
    } else {
        v0 = Vec2(1.0, 0.0);
    }
    if (v0.x() < 0.0 || (v0.x() == 0.0 && v0.y() < 0.0)) v0 = -v0;
    e.vectors.col(0) = v0;
    e.vectors.col(1) = Vec2(-v0.y(), v0.x());
    return e;
}

double doa(const Eig2 &e) { return (e.values[0] + kEigenEpsilon) / (e.values[1] + kEigenEpsilon); }

double doa(const Gaussian2 &g) { return doa(eig2(g.cov)); }

Gaussian2 extract_prior_gaussian(const ScalarMap &azimuth, const PixelMap<uint8_t> &valid, int x, int y) {
    Gaussian2 g;
    if (!azimuth.contains(x, y) || !valid(x, y)) return g;
    const Vec2 center = unit_vector(azimuth(x, y));
    g.mean = center;
    static constexpr int kNeighbors[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    bool usable = true;
    for (const auto &o : kNeighbors) {
        const int nx = x + o[0], ny = y + o[1];
        if (!azimuth.contains(nx, ny) || !valid(nx, ny)) {
            usable = false;
            continue;
        }
        Vec2 v = unit_vector(azimuth(nx, ny));
        if (v.dot(center) < 0.0) v = -v;
        const Vec2 e = v - center;
        g.cov += e * e.transpose();
    }
    g.cov /= 3.0;  // M' - 1
    g.valid = usable;
    return g;
}

PixelMap<Gaussian2> extract_prior_gaussians(const PolPriors &priors) {
    PixelMap<Gaussian2> out(priors.width(), priors.height());
    for (int y = 0; y < priors.height(); ++y)
        for (int x = 0; x < priors.width(); ++x) out(x, y) = extract_prior_gaussian(priors.azimuth, priors.valid, x, y);
    return out;
}

namespace {

Vec3 hsv_to_rgb(double h, double s, double v) {
    const double hh = std::fmod(h, 1.0) * 6.0;
    const int sector = std::min(int(hh), 5);
    const double f = hh - sector;
    const double p = v * (1.0 - s), q = v * (1.0 - s * f), t = v * (1.0 - s * (1.0 - f));
    switch (sector) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
    }
}

}  // namespace

Image doa_visualization(const PixelMap<Gaussian2> &gaussians) {
    Image img(gaussians.width, gaussians.height, 3);
    for (int y = 0; y < gaussians.height; ++y) {
        for (int x = 0; x < gaussians.width; ++x) {
            const Gaussian2 &g = gaussians(x, y);
            if (!g.valid) continue;
            const Eig2 e = eig2(g.cov);
            const double angle = fold_pi(std::atan2(e.vectors(1, 0), e.vectors(0, 0)));
            const double hue = angle / kPi;
            const double sat = std::clamp(1.0 - 1.0 / doa(e), 0.0, 1.0);
            const Vec3 rgb = hsv_to_rgb(hue, sat, 1.0);
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = float(rgb[c]);
        }
    }
    return img;
}

Tensor gaussians_to_tensor(const PixelMap<Gaussian2> &gaussians) {
    Tensor t({uint32_t(gaussians.height), uint32_t(gaussians.width), 5u});
    for (size_t i = 0; i < gaussians.data.size(); ++i) {
        const Gaussian2 &g = gaussians.data[i];
        if (!g.valid) continue;
        float *p = &t.data[5 * i];
        p[0] = float(g.mean.x());
        p[1] = float(g.mean.y());
        p[2] = float(g.cov(0, 0));
        p[3] = float(g.cov(0, 1));
        p[4] = float(g.cov(1, 1));
    }
    return t;
}

PixelMap<Gaussian2> gaussians_from_tensor(const Tensor &t) {
    if (t.rank() != 3 || t.dims[2] != 5) throw DataError("Gaussian map must be H x W x 5");
    PixelMap<Gaussian2> out(int(t.dims[1]), int(t.dims[0]));
    for (size_t i = 0; i < out.data.size(); ++i) {
        const float *p = &t.data[5 * i];
        Gaussian2 &g = out.data[i];
        g.mean = Vec2(p[0], p[1]);
        g.cov << p[2], p[3], p[3], p[4];
        g.valid = g.mean.squaredNorm() > 0.0;
    }
    return out;
}

}  // namespace polsdf
