#pragma once

#include "polsdf/common.hpp"

#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace polsdf {

using Box3 = Eigen::AlignedBox3d;

// Exact metric SDF of a posed primitive. Used as synthesis ground truth.
class AnalyticSdf {
  public:
    enum class Kind { Sphere, Torus, RoundedBox };

    static AnalyticSdf sphere(double radius);
    // Ring of major radius `ring` around the local z axis, tube radius `tube`.
    static AnalyticSdf torus(double ring, double tube);
    // Box with outer half extents `half` whose edges are rounded by `rounding`.
    static AnalyticSdf rounded_box(const Vec3 &half, double rounding);

    AnalyticSdf &set_pose(const Mat3 &rotation, const Vec3 &translation);

    double distance(const Vec3 &x) const;
    Vec3 gradient(const Vec3 &x) const;
    // Radius of a world-space ball centered at the pose translation enclosing the shape.
    double bounding_radius() const;

    Kind kind() const { return kind_; }
    const Vec3 &translation() const { return translation_; }
    std::string name() const;

  private:
    double local_distance(const Vec3 &p) const;
    Vec3 local_gradient(const Vec3 &p) const;

    Kind kind_ = Kind::Sphere;
    Vec3 params_ = Vec3::Zero();
    double rounding_ = 0.0;
    Mat3 rotation_ = Mat3::Identity();
    Vec3 translation_ = Vec3::Zero();
};

// Eight-vertex trilinear stencil of a point: weights and their spatial derivatives.
struct Stencil {
    std::array<uint32_t, 8> vertex{};
    std::array<double, 8> weight{};
    std::array<Vec3, 8> dweight{};
};

struct NormalResult {
    Vec3 normal = Vec3::Zero();
    double gradient_norm = 0.0;
    bool valid = false;
};

inline constexpr double kDegenerateGradient = 1e-8;

// Trainable dense voxel scene: signed distance and view-dependent radiance
// stored per grid vertex, plus the logistic sharpness s = exp(log_sharpness).
//
// Radiance layout per vertex: [r, g, b, r.dx, r.dy, r.dz, g.dx, g.dy, g.dz, b.dx, b.dy, b.dz].
class SdfField {
  public:
    static constexpr int kRadianceChannels = 12;

    SdfField() = default;
    SdfField(const Box3 &bbox, const std::array<int, 3> &resolution);

    // Sphere of radius 0.4 * min bbox extent centered in the box, gray radiance.
    static SdfField sphere_init(const Box3 &bbox, const std::array<int, 3> &resolution,
                                double initial_sharpness = 20.0);

    const Box3 &bbox() const { return bbox_; }
    const std::array<int, 3> &resolution() const { return res_; }
    Vec3 cell_size() const { return cell_; }
    size_t vertex_count() const { return values_.size(); }
    uint32_t vertex_index(int i, int j, int k) const {
        return uint32_t((size_t(k) * res_[1] + j) * res_[0] + i);
    }
    Vec3 vertex_position(int i, int j, int k) const;

    std::vector<double> &values() { return values_; }
    const std::vector<double> &values() const { return values_; }
    std::vector<double> &radiance() { return radiance_; }
    const std::vector<double> &radiance() const { return radiance_; }
    double &log_sharpness() { return log_sharpness_; }
    double log_sharpness() const { return log_sharpness_; }
    double sharpness() const { return std::exp(log_sharpness_); }

    // Flat parameter space used by gradients and the optimizer:
    // [sdf values | radiance | log sharpness].
    size_t param_count() const { return values_.size() * (1 + kRadianceChannels) + 1; }
    uint32_t radiance_param(uint32_t vertex, int channel) const {
        return uint32_t(values_.size() + size_t(vertex) * kRadianceChannels + channel);
    }
    uint32_t sharpness_param() const { return uint32_t(values_.size() * (1 + kRadianceChannels)); }
    double &param(size_t i);
    double param(size_t i) const;

    // Points outside the box use the boundary cell, which extrapolates linearly outward.
    Stencil stencil(const Vec3 &x) const;
    void stencil(const Vec3 &x, Stencil &out) const;

    double sdf(const Vec3 &x) const;
    double sdf(const Stencil &s) const;
    Vec3 sdf_grad(const Vec3 &x) const;
    Vec3 sdf_grad(const Stencil &s) const;
    NormalResult normal(const Vec3 &x) const;

    // Clamped [base + coef . view_dir] per channel.
    Vec3 radiance_eval(const Vec3 &x, const Vec3 &view_dir) const;
    Vec3 radiance_raw(const Stencil &s, const Vec3 &view_dir) const;

    // Same box at another resolution; values and radiance are trilinearly interpolated.
    SdfField resampled(const std::array<int, 3> &resolution) const;

    // Resamples an analytic SDF onto the grid vertices.
    void assign(const AnalyticSdf &sdf);

  private:
    Box3 bbox_;
    std::array<int, 3> res_{0, 0, 0};
    Vec3 cell_ = Vec3::Zero();
    Vec3 inv_cell_ = Vec3::Zero();
    std::vector<double> values_;
    std::vector<double> radiance_;
    double log_sharpness_ = std::log(20.0);
};

// (1/K) sum (|grad d| - 1)^2 over the points. Throws on an empty set.
double eikonal_residual(const SdfField &field, std::span<const Vec3> points);

// Checkpoint: sdf.pten (nz, ny, nx), radiance.pten (nz, ny, nx, 12) and field.txt.
void save_field(const std::filesystem::path &dir, const SdfField &field);
SdfField load_field(const std::filesystem::path &dir);

}  // namespace polsdf
