#pragma once

#include "polsdf/camera.hpp"
#include "polsdf/geometry.hpp"

#include <array>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace polsdf {

struct SamplerOptions {
    int samples = 64;         // K, at least 2
    bool stratified = true;   // jitter each depth inside its stratum
    double near = 0.0;
    double far = 1e9;
};

// Depth samples along one ray, clipped to the scene box.
//   delta[i] = t[i] - t[i-1]; delta[0] repeats delta[1].
struct RaySamples {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();
    std::vector<double> t;
    std::vector<double> delta;
    std::vector<Vec3> points;
    bool empty = true;

    int size() const { return int(t.size()); }
};

// Slab test; returns [t_enter, t_exit] clamped to [near, far], or nothing on a miss.
std::optional<std::pair<double, double>> intersect_box(const Box3 &box, const Vec3 &origin, const Vec3 &dir,
                                                       double near, double far);

// Uniform depths on [t_enter, t_exit]. Non-stratified samples include both ends;
// stratified samples take one jittered depth per stratum from `rng`.
RaySamples sample_ray(const Vec3 &origin, const Vec3 &dir, const Box3 &box, const SamplerOptions &opts,
                      std::mt19937_64 *rng);

struct PixelCoord {
    int x = 0;
    int y = 0;
};

std::vector<RaySamples> generate_rays(const Camera &camera, const Box3 &box, std::span<const PixelCoord> pixels,
                                      const SamplerOptions &opts, uint64_t seed);

// Logistic CDF 1 / (1 + exp(-s x)).
double logistic(double x, double s);

// max((Phi(d_i) - Phi(d_next)) / Phi(d_i), 0); zero when Phi(d_i) < 1e-12.
double neus_alpha(double d_i, double d_next, double sharpness);

// w_i = T_i alpha_i with T_i = prod_{j<i} (1 - alpha_j).
std::vector<double> composite_weights(std::span<const double> alphas);

template <class Q>
struct Composited {
    Q value;
    double opacity = 0.0;
    std::vector<double> weights;
};

template <class Q>
Composited<Q> composite(std::span<const double> alphas, std::span<const Q> quantities, const Q &zero) {
    Composited<Q> out{zero, 0.0, composite_weights(alphas)};
    for (size_t i = 0; i < out.weights.size(); ++i) {
        out.value = out.value + out.weights[i] * quantities[i];
        out.opacity += out.weights[i];
    }
    return out;
}

// Orthonormal pair spanning the plane perpendicular to unit `d`, rotated by `angle` within that plane.
std::pair<Vec3, Vec3> perpendicular_basis(const Vec3 &d, double angle = 0.0);

// The six neighbourhood positions of sample i:
//   {x_{i-1}, x_{i+1}, x_i + e u, x_i - e u, x_i + e v, x_i - e v},  e = delta_i / 2.
// At either end of the ray the one available axial neighbour is used twice.
std::array<Vec3, 6> supersample_offsets(const RaySamples &ray, int i, double basis_angle = 0.0);

struct Gaussian3 {
    Vec3 mean = Vec3::Zero();
    Mat3 cov = Mat3::Zero();
    bool valid = false;
};

struct Gaussian2 {
    Vec2 mean = Vec2::Zero();
    Mat2 cov = Mat2::Zero();
    bool valid = false;
};

// Mean: unit normal at x. Covariance: (1/(M-1)) sum_j (n_j - n)(n_j - n)^T over
// the unit normals at the M = 6 offsets. Degenerate offset normals fall back to n.
Gaussian3 estimate_normal_gaussian(const SdfField &field, const Vec3 &x, const std::array<Vec3, 6> &offsets);

// Full 3D result of J W (.) with J = diag(1, 1, 0); third entries are exactly zero.
struct SplatTransform {
    Vec3 mean;
    Mat3 cov;
};
SplatTransform splat_full(const Gaussian3 &g, const Mat3 &world_to_camera);
Gaussian2 splat(const Gaussian3 &g, const Mat3 &world_to_camera);

struct PixelRender {
    Vec3 color = Vec3::Zero();
    double opacity = 0.0;
    Gaussian2 gaussian;
    // Predicted AoP: azimuth of the composited projected normal + pi/2, folded into [0, pi).
    double aop = 0.0;
    std::vector<double> weights;
    bool valid = false;
};

// Straightforward reference renderer built from the operations above.
PixelRender render_pixel(const SdfField &field, const Camera &camera, PixelCoord pixel, const SamplerOptions &opts,
                         uint64_t seed = 0, const Vec3 &background = Vec3::Zero());
PixelRender render_ray(const SdfField &field, const Camera &camera, const RaySamples &ray,
                       const Vec3 &background = Vec3::Zero());

}  // namespace polsdf
