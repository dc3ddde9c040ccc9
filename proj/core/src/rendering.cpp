#include "polsdf/rendering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polsdf {

std::optional<std::pair<double, double>> intersect_box(const Box3 &box, const Vec3 &origin, const Vec3 &dir,
                                                       double near, double far) {
    double t0 = near, t1 = far;
    for (int a = 0; a < 3; ++a) {
        if (dir[a] == 0.0) {
            if (origin[a] < box.min()[a] || origin[a] > box.max()[a]) return std::nullopt;
            continue;
        }
        const double inv = 1.0 / dir[a];
        double ta = (box.min()[a] - origin[a]) * inv;
        double tb = (box.max()[a] - origin[a]) * inv;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 >= t1) return std::nullopt;
    }
    return std::make_pair(t0, t1);
}

RaySamples sample_ray(const Vec3 &origin, const Vec3 &dir, const Box3 &box, const SamplerOptions &opts,
                      std::mt19937_64 *rng) {
    if (opts.samples < 2) throw Error("sample_ray: need at least 2 samples per ray");
    if (!(opts.near < opts.far)) throw Error("sample_ray: near must be below far");
    RaySamples ray;
    ray.origin = origin;
    ray.direction = dir;
    const auto span = intersect_box(box, origin, dir, opts.near, opts.far);
    if (!span) return ray;
    const auto [t0, t1] = *span;
    const int k = opts.samples;
    ray.t.resize(k);
    if (opts.stratified) {
        if (!rng) throw Error("sample_ray: stratified sampling needs an RNG");
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const double step = (t1 - t0) / k;
        for (int i = 0; i < k; ++i) ray.t[i] = t0 + (i + uniform(*rng)) * step;
    } else {
        const double step = (t1 - t0) / (k - 1);
        for (int i = 0; i < k; ++i) ray.t[i] = t0 + i * step;
        ray.t[k - 1] = t1;
    }
    ray.delta.resize(k);
    for (int i = 1; i < k; ++i) ray.delta[i] = ray.t[i] - ray.t[i - 1];
    ray.delta[0] = ray.delta[1];
    for (double d : ray.delta)
        if (!(d > 0.0)) return RaySamples{origin, dir, {}, {}, {}, true};
    ray.points.resize(k);
    for (int i = 0; i < k; ++i) ray.points[i] = origin + ray.t[i] * dir;
    ray.empty = false;
    return ray;
}

std::vector<RaySamples> generate_rays(const Camera &camera, const Box3 &box, std::span<const PixelCoord> pixels,
                                      const SamplerOptions &opts, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<RaySamples> rays;
    rays.reserve(pixels.size());
    const Vec3 origin = camera.center();
    for (const PixelCoord &p : pixels) {
        if (p.x < 0 || p.y < 0 || p.x >= camera.width || p.y >= camera.height)
            throw Error("generate_rays: pixel outside the image");
        rays.push_back(sample_ray(origin, camera.pixel_direction(p.x, p.y), box, opts, &rng));
    }
    return rays;
}

double logistic(double x, double s) {
    const double z = s * x;
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double neus_alpha(double d_i, double d_next, double sharpness) {
    const double phi_i = logistic(d_i, sharpness);
    if (phi_i < 1e-12) return 0.0;
    const double phi_n = logistic(d_next, sharpness);
    return std::max((phi_i - phi_n) / phi_i, 0.0);
}

std::vector<double> composite_weights(std::span<const double> alphas) {
    std::vector<double> w(alphas.size());
    double transmittance = 1.0;
    for (size_t i = 0; i < alphas.size(); ++i) {
        w[i] = transmittance * alphas[i];
        transmittance *= 1.0 - alphas[i];
    }
    return w;
}

std::pair<Vec3, Vec3> perpendicular_basis(const Vec3 &d, double angle) {
    // Branchless construction (Duff et al. 2017).
    const double sign = std::copysign(1.0, d.z());
    const double a = -1.0 / (sign + d.z());
    const double b = d.x() * d.y() * a;
    Vec3 u(1.0 + sign * d.x() * d.x() * a, sign * b, -sign * d.x());
    Vec3 v(b, sign + d.y() * d.y() * a, -d.y());
    if (angle != 0.0) {
        const double c = std::cos(angle), s = std::sin(angle);
        const Vec3 ru = c * u + s * v;
        const Vec3 rv = -s * u + c * v;
        u = ru;
        v = rv;
    }
    return {u, v};
}

std::array<Vec3, 6> supersample_offsets(const RaySamples &ray, int i, double basis_angle) {
    const int k = ray.size();
    if (i < 0 || i >= k) throw Error("supersample_offsets: sample index out of range");
    const Vec3 &x = ray.points[i];
    const Vec3 &prev = i > 0 ? ray.points[i - 1] : ray.points[i + 1];
    const Vec3 &next = i + 1 < k ? ray.points[i + 1] : ray.points[i - 1];
    const double eps = 0.5 * ray.delta[i];
    const auto [u, v] = perpendicular_basis(ray.direction, basis_angle);
    return {prev, next, x + eps * u, x - eps * u, x + eps * v, x - eps * v};
}

Gaussian3 estimate_normal_gaussian(const SdfField &field, const Vec3 &x, const std::array<Vec3, 6> &offsets) {
    Gaussian3 g;
    const NormalResult center = field.normal(x);
    if (!center.valid) return g;
    g.mean = center.normal;
    int degenerate = 0;
    for (const Vec3 &p : offsets) {
        const NormalResult nj = field.normal(p);
        if (!nj.valid) {
            ++degenerate;
            continue;
        }
        const Vec3 e = nj.normal - center.normal;
        g.cov += e * e.transpose();
    }
    g.cov /= double(offsets.size() - 1);
    g.valid = degenerate < int(offsets.size());
    if (!g.valid) g.cov.setZero();
    return g;
}

SplatTransform splat_full(const Gaussian3 &g, const Mat3 &world_to_camera) {
    Mat3 jw = world_to_camera;
    jw.row(2).setZero();  // J = diag(1, 1, 0)
    return {jw * g.mean, jw * g.cov * jw.transpose()};
}

Gaussian2 splat(const Gaussian3 &g, const Mat3 &world_to_camera) {
    const SplatTransform full = splat_full(g, world_to_camera);
    Gaussian2 out;
    out.mean = full.mean.head<2>();
    out.cov = full.cov.topLeftCorner<2, 2>();
    out.valid = g.valid;
    return out;
}

PixelRender render_ray(const SdfField &field, const Camera &camera, const RaySamples &ray, const Vec3 &background) {
    PixelRender out;
    if (ray.empty) {
        out.color = background;
        return out;
    }
    const int k = ray.size();
    const double s = field.sharpness();
    std::vector<double> d(k);
    for (int i = 0; i < k; ++i) d[i] = field.sdf(ray.points[i]);
    std::vector<double> alpha(k, 0.0);
    for (int i = 0; i + 1 < k; ++i) alpha[i] = neus_alpha(d[i], d[i + 1], s);

    std::vector<Vec3> colors(k);
    std::vector<Vec2> means(k);
    std::vector<Mat2> covs(k);
    Vec3 last_valid_normal = Vec3::Zero();
    for (int i = 0; i < k; ++i) {
        colors[i] = field.radiance_eval(ray.points[i], ray.direction);
        Gaussian3 g3 = estimate_normal_gaussian(field, ray.points[i], supersample_offsets(ray, i));
        if (g3.mean.squaredNorm() > 0.0) {
            last_valid_normal = g3.mean;
        } else {
            // Degenerate gradient: reuse the last valid normal on the ray.
            g3.mean = last_valid_normal;
            g3.cov.setZero();
        }
        const Gaussian2 g2 = splat(g3, camera.rotation);
        means[i] = g2.mean;
        covs[i] = g2.cov;
    }
    const auto c = composite<Vec3>(alpha, colors, Vec3::Zero());
    const auto m = composite<Vec2>(alpha, means, Vec2::Zero());
    const auto cv = composite<Mat2>(alpha, covs, Mat2::Zero());
    out.color = c.value + (1.0 - c.opacity) * background;
    out.opacity = c.opacity;
    out.weights = c.weights;
    out.gaussian.mean = m.value;
    out.gaussian.cov = cv.value;
    out.gaussian.valid = true;
    out.aop = fold_pi(std::atan2(m.value.y(), m.value.x()) + 0.5 * kPi);
    out.valid = true;
    return out;
}

PixelRender render_pixel(const SdfField &field, const Camera &camera, PixelCoord pixel, const SamplerOptions &opts,
                         uint64_t seed, const Vec3 &background) {
    const PixelCoord one[1] = {pixel};
    const auto rays = generate_rays(camera, field.bbox(), one, opts, seed);
    return render_ray(field, camera, rays.front(), background);
}

}  // namespace polsdf
