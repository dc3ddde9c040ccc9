#pragma once

#include "polsdf/geometry.hpp"
#include "polsdf/rendering.hpp"

#include <cstdint>
#include <vector>

namespace polsdf {

// Differentiable per-pixel outputs.
struct PixelPrediction {
    Vec3 color = Vec3::Zero();
    double opacity = 0.0;
    Vec2 normal = Vec2::Zero();   // composited projected normal n_p(u)
    Vec3 cov = Vec3::Zero();      // composited projected covariance (xx, xy, yy)
    double eikonal_sum = 0.0;     // sum over ray samples of (|grad d| - 1)^2
    int eikonal_count = 0;
    bool valid = false;
};

// dLoss / d(PixelPrediction). `cov.y()` is the derivative w.r.t. the shared off-diagonal entry.
struct PixelAdjoint {
    Vec3 color = Vec3::Zero();
    double opacity = 0.0;
    Vec2 normal = Vec2::Zero();
    Vec3 cov = Vec3::Zero();
    double eikonal = 0.0;
};

// Append-only list of (flat parameter index, partial derivative).
struct GradientList {
    std::vector<uint32_t> index;
    std::vector<double> value;

    void add(uint32_t i, double v) {
        index.push_back(i);
        value.push_back(v);
    }
    void clear() {
        index.clear();
        value.clear();
    }
    size_t size() const { return index.size(); }
};

struct TapeOptions {
    // Samples whose compositing weight is at or below this value skip radiance and
    // Gaussian evaluation. Zero evaluates every sample, which matches render_ray exactly.
    double weight_cull = 0.0;
};

// Records one ray's forward pass so that backward() can push adjoints into
// field parameters. Reusable across pixels to keep allocations amortized.
class PixelTape {
  public:
    PixelPrediction forward(const SdfField &field, const Mat23 &image_axes, const RaySamples &ray,
                            const TapeOptions &opts = {});
    void backward(const SdfField &field, const PixelAdjoint &adjoint, GradientList &grad) const;

  private:
    struct Lateral {
        Stencil stencil;
        Vec3 normal = Vec3::Zero();
        double gradient_norm = 0.0;
        bool valid = false;
    };
    struct Sample {
        Stencil stencil;
        double d = 0.0;
        Vec3 g = Vec3::Zero();
        double gradient_norm = 0.0;
        Vec3 normal = Vec3::Zero();
        bool normal_valid = false;
        double alpha = 0.0;
        double transmittance = 1.0;
        double weight = 0.0;
        bool active = false;
        Vec3 color_raw = Vec3::Zero();
        Vec3 color = Vec3::Zero();
        Vec2 projected_normal = Vec2::Zero();
        Vec3 projected_cov = Vec3::Zero();
        std::array<Lateral, 4> lateral;
        std::array<Vec2, 6> projected_diff;
        std::array<bool, 6> diff_valid{};
    };

    std::vector<Sample> samples_;
    Vec3 direction_ = Vec3::UnitZ();
    Mat23 axes_ = Mat23::Zero();
    double sharpness_ = 1.0;
    bool empty_ = true;

    mutable std::vector<double> dd_;
    mutable std::vector<Vec3> dn_;
    mutable std::vector<double> gw_;
};

}  // namespace polsdf
