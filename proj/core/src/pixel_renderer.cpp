#include "polsdf/pixel_renderer.hpp"

#include <cmath>

namespace polsdf {

namespace {

constexpr double kCovNormalization = 1.0 / 5.0;  // 1 / (M - 1), M = 6

// Derivative of n = g / |g| applied to an adjoint: (I - n n^T) dn / |g|.
Vec3 normalize_backward(const Vec3 &n, double norm, const Vec3 &dn) { return (dn - n * n.dot(dn)) / norm; }

}  // namespace

PixelPrediction PixelTape::forward(const SdfField &field, const Mat23 &image_axes, const RaySamples &ray,
                                   const TapeOptions &opts) {
    PixelPrediction out;
    empty_ = ray.empty;
    if (ray.empty) {
        samples_.clear();
        return out;
    }
    const int k = ray.size();
    samples_.resize(k);
    direction_ = ray.direction;
    axes_ = image_axes;
    sharpness_ = field.sharpness();

    for (int i = 0; i < k; ++i) {
        Sample &s = samples_[i];
        field.stencil(ray.points[i], s.stencil);
        s.d = field.sdf(s.stencil);
        s.g = field.sdf_grad(s.stencil);
        s.gradient_norm = s.g.norm();
        s.normal_valid = s.gradient_norm > kDegenerateGradient;
        s.normal = s.normal_valid ? Vec3(s.g / s.gradient_norm) : Vec3::Zero();
        const double r = s.gradient_norm - 1.0;
        out.eikonal_sum += r * r;
    }
    out.eikonal_count = k;

    double transmittance = 1.0;
    for (int i = 0; i < k; ++i) {
        Sample &s = samples_[i];
        s.alpha = i + 1 < k ? neus_alpha(s.d, samples_[i + 1].d, sharpness_) : 0.0;
        s.transmittance = transmittance;
        s.weight = transmittance * s.alpha;
        transmittance *= 1.0 - s.alpha;
        out.opacity += s.weight;
        s.active = opts.weight_cull <= 0.0 || s.weight > opts.weight_cull;
    }

    const auto [u, v] = perpendicular_basis(direction_);
    Vec3 last_valid_normal = Vec3::Zero();
    for (int i = 0; i < k; ++i) {
        Sample &s = samples_[i];
        if (s.normal_valid) last_valid_normal = s.normal;
        if (!s.active) continue;

        s.color_raw = field.radiance_raw(s.stencil, direction_);
        s.color = s.color_raw.cwiseMax(0.0);

        s.diff_valid.fill(false);
        s.projected_cov.setZero();
        if (!s.normal_valid) {
            s.projected_normal = axes_ * last_valid_normal;
        } else {
            s.projected_normal = axes_ * s.normal;
            const int prev = i > 0 ? i - 1 : i + 1;
            const int next = i + 1 < k ? i + 1 : i - 1;
            const double eps = 0.5 * ray.delta[i];
            const Vec3 lateral_pos[4] = {ray.points[i] + eps * u, ray.points[i] - eps * u, ray.points[i] + eps * v,
                                         ray.points[i] - eps * v};
            for (int j = 0; j < 6; ++j) {
                Vec3 nj;
                if (j < 2) {
                    const Sample &nb = samples_[j == 0 ? prev : next];
                    if (!nb.normal_valid) continue;
                    nj = nb.normal;
                } else {
                    Lateral &lat = s.lateral[j - 2];
                    field.stencil(lateral_pos[j - 2], lat.stencil);
                    const Vec3 g = field.sdf_grad(lat.stencil);
                    lat.gradient_norm = g.norm();
                    lat.valid = lat.gradient_norm > kDegenerateGradient;
                    if (!lat.valid) continue;
                    lat.normal = g / lat.gradient_norm;
                    nj = lat.normal;
                }
                const Vec2 p = axes_ * (nj - s.normal);
                s.projected_diff[j] = p;
                s.diff_valid[j] = true;
                s.projected_cov += Vec3(p.x() * p.x(), p.x() * p.y(), p.y() * p.y());
            }
            s.projected_cov *= kCovNormalization;
        }
        out.color += s.weight * s.color;
        out.normal += s.weight * s.projected_normal;
        out.cov += s.weight * s.projected_cov;
    }
    out.valid = true;
    return out;
}

void PixelTape::backward(const SdfField &field, const PixelAdjoint &adj, GradientList &grad) const {
    if (empty_) return;
    const int k = int(samples_.size());
    dd_.assign(k, 0.0);
    dn_.assign(k, Vec3::Zero());
    double dsharp = 0.0;

    // Adjoint of each compositing weight.
    // B_i = sum_{j>i} alpha_j g_j prod_{i<l<j} (1 - alpha_l), so that dL/dalpha_i = T_i (g_i - B_i).
    std::vector<double> &gw = gw_;
    gw.resize(k);
    for (int i = 0; i < k; ++i) {
        const Sample &s = samples_[i];
        gw[i] = adj.opacity;
        if (s.active)
            gw[i] += adj.color.dot(s.color) + adj.normal.dot(s.projected_normal) + adj.cov.dot(s.projected_cov);
    }
    double tail = 0.0;
    for (int i = k - 1; i >= 0; --i) {
        const Sample &s = samples_[i];
        const double dalpha = s.transmittance * (gw[i] - tail);
        tail = s.alpha * gw[i] + (1.0 - s.alpha) * tail;
        if (i + 1 >= k || s.alpha <= 0.0) continue;
        // alpha = 1 - Phi(d_next) / Phi(d_i)
        const double phi_i = logistic(s.d, sharpness_);
        const double phi_n = logistic(samples_[i + 1].d, sharpness_);
        const double ratio = phi_n / phi_i;
        const double one_minus_i = logistic(-s.d, sharpness_);
        const double one_minus_n = logistic(-samples_[i + 1].d, sharpness_);
        dd_[i] += dalpha * ratio * sharpness_ * one_minus_i;
        dd_[i + 1] -= dalpha * ratio * sharpness_ * one_minus_n;
        dsharp += dalpha * ratio * (s.d * one_minus_i - samples_[i + 1].d * one_minus_n);
    }

    for (int i = 0; i < k; ++i) {
        const Sample &s = samples_[i];
        if (!s.active || s.weight == 0.0) continue;

        const Vec3 dc = s.weight * adj.color;
        for (int ch = 0; ch < 3; ++ch) {
            if (!(s.color_raw[ch] > 0.0) || dc[ch] == 0.0) continue;
            for (int c = 0; c < 8; ++c) {
                const double base = s.stencil.weight[c] * dc[ch];
                const uint32_t v = s.stencil.vertex[c];
                grad.add(field.radiance_param(v, ch), base);
                grad.add(field.radiance_param(v, 3 + 3 * ch), base * direction_.x());
                grad.add(field.radiance_param(v, 4 + 3 * ch), base * direction_.y());
                grad.add(field.radiance_param(v, 5 + 3 * ch), base * direction_.z());
            }
        }

        if (!s.normal_valid) continue;  // substituted normals are constants
        const Vec2 dnp = s.weight * adj.normal;
        const Vec3 dsp = s.weight * adj.cov;
        Vec3 dn_center = axes_.transpose() * dnp;
        const int prev = i > 0 ? i - 1 : i + 1;
        const int next = i + 1 < k ? i + 1 : i - 1;
        for (int j = 0; j < 6; ++j) {
            if (!s.diff_valid[j]) continue;
            const Vec2 &p = s.projected_diff[j];
            const Vec2 dp = kCovNormalization *
                            Vec2(2.0 * dsp.x() * p.x() + dsp.y() * p.y(), dsp.y() * p.x() + 2.0 * dsp.z() * p.y());
            const Vec3 de = axes_.transpose() * dp;
            dn_center -= de;
            if (j < 2) {
                dn_[j == 0 ? prev : next] += de;
            } else {
                const Lateral &lat = s.lateral[j - 2];
                const Vec3 dg = normalize_backward(lat.normal, lat.gradient_norm, de);
                for (int c = 0; c < 8; ++c) grad.add(lat.stencil.vertex[c], lat.stencil.dweight[c].dot(dg));
            }
        }
        dn_[i] += dn_center;
    }

    for (int i = 0; i < k; ++i) {
        const Sample &s = samples_[i];
        Vec3 dg = Vec3::Zero();
        if (s.normal_valid && !dn_[i].isZero(0.0)) dg += normalize_backward(s.normal, s.gradient_norm, dn_[i]);
        if (adj.eikonal != 0.0 && s.gradient_norm > 0.0)
            dg += adj.eikonal * 2.0 * (s.gradient_norm - 1.0) / s.gradient_norm * s.g;
        if (dd_[i] == 0.0 && dg.isZero(0.0)) continue;
        for (int c = 0; c < 8; ++c)
            grad.add(s.stencil.vertex[c], s.stencil.weight[c] * dd_[i] + s.stencil.dweight[c].dot(dg));
    }

    if (dsharp != 0.0) grad.add(field.sharpness_param(), dsharp * sharpness_);
}

}  // namespace polsdf
