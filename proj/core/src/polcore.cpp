#include "polsdf/polcore.hpp"

#include "polsdf/common.hpp"

#include <algorithm>
#include <cmath>

namespace polsdf {

PolPriors stokes_to_priors(const StokesImage &img) {
    if (img.width <= 0 || img.height <= 0) throw DataError("stokes_to_priors: empty image");

    double max_s0 = 0.0;
    for (const Stokes &s : img.data) max_s0 = std::max(max_s0, s.s0);
    const double eps = kStokesValidityFraction * max_s0;

    PolPriors out;
    out.aop = ScalarMap(img.width, img.height);
    out.dop = ScalarMap(img.width, img.height);
    out.azimuth = ScalarMap(img.width, img.height);
    out.valid = PixelMap<uint8_t>(img.width, img.height, 0);

    for (size_t i = 0; i < img.data.size(); ++i) {
        const Stokes &s = img.data[i];
        const double polarized = std::hypot(s.s1, s.s2);
        if (!(s.s0 > eps) || !(polarized > eps)) continue;
        // atan2 resolves the quadrant that the arctan-of-ratio form loses.
        const double phi = fold_pi(0.5 * std::atan2(s.s2, s.s1));
        out.aop.data[i] = phi;
        out.dop.data[i] = std::clamp(polarized / s.s0, 0.0, 1.0);
        out.azimuth.data[i] = fold_pi(phi + 0.5 * kPi);
        out.valid.data[i] = 1;
    }
    return out;
}

ScalarMap reweight_aop(const PolPriors &priors) {
    ScalarMap out(priors.width(), priors.height());
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = priors.valid.data[i] ? priors.aop.data[i] * priors.dop.data[i] : 0.0;
    return out;
}

StokesImage priors_from_synthetic(const ScalarMap &aop, const ScalarMap &dop) {
    if (aop.width != dop.width || aop.height != dop.height)
        throw DataError("priors_from_synthetic: AoP and DoP shapes differ");
    StokesImage out(aop.width, aop.height);
    for (size_t i = 0; i < aop.data.size(); ++i) {
        const double rho = dop.data[i];
        if (!(rho >= 0.0 && rho <= 1.0)) throw DataError("priors_from_synthetic: DoP outside [0, 1]");
        const double phi = aop.data[i];
        out.data[i] = {1.0, rho * std::cos(2.0 * phi), rho * std::sin(2.0 * phi)};
    }
    return out;
}

Tensor stokes_to_tensor(const StokesImage &img) {
    Tensor t({uint32_t(img.height), uint32_t(img.width), 3u});
    for (size_t i = 0; i < img.data.size(); ++i) {
        t.data[3 * i + 0] = static_cast<float>(img.data[i].s0);
        t.data[3 * i + 1] = static_cast<float>(img.data[i].s1);
        t.data[3 * i + 2] = static_cast<float>(img.data[i].s2);
    }
    return t;
}

StokesImage stokes_from_tensor(const Tensor &t) {
    if (t.rank() != 3 || t.dims[2] < 3) throw DataError("Stokes tensor must be H x W x 3");
    const auto channels = t.dims[2];
    StokesImage img(int(t.dims[1]), int(t.dims[0]));
    for (size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = {t.data[channels * i], t.data[channels * i + 1], t.data[channels * i + 2]};
    return img;
}

Tensor scalar_map_to_tensor(const ScalarMap &map) {
    Tensor t({uint32_t(map.height), uint32_t(map.width)});
    for (size_t i = 0; i < map.data.size(); ++i) t.data[i] = static_cast<float>(map.data[i]);
    return t;
}

ScalarMap scalar_map_from_tensor(const Tensor &t) {
    if (t.rank() != 2) throw DataError("expected an H x W tensor");
    ScalarMap m(int(t.dims[1]), int(t.dims[0]));
    for (size_t i = 0; i < m.data.size(); ++i) m.data[i] = t.data[i];
    return m;
}

}  // namespace polsdf
