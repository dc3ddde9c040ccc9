#pragma once

#include "polsdf/pixel_renderer.hpp"
#include "polsdf/priors.hpp"

#include <span>
#include <string>

namespace polsdf {

// Weights of the full objective
//   L = color (1 - rho) L_color + polar rho (L_mean + L_cov) + eikonal L_eik + mask L_mask,
// with L_cov = |ratio_pred - ratio_prior| + eigvec (1 - |v_pred . v_prior|).
struct LossWeights {
    double color = 1.0;
    double polar = 0.5;
    double eigvec = 0.1;
    double eikonal = 0.1;
    double mask = 0.1;
    // L_cov stays off until iteration >= fraction * total iterations.
    double cov_activation_fraction = 0.25;

    void validate() const;
};

// Ablation switches. With reweight = false the (1 - rho) and rho factors become 1.
struct LossToggles {
    bool use_mean = true;
    bool use_cov = true;
    bool reweight = true;
};

// Named ablations: full, color-only, mean, cov, rew-mean, rew-cov.
LossToggles ablation_toggles(const std::string &name, LossWeights &weights);

struct LossBreakdown {
    double color = 0.0;
    double mean = 0.0;
    double cov = 0.0;
    double eikonal = 0.0;
    double mask = 0.0;
    double total = 0.0;

    LossBreakdown &operator+=(const LossBreakdown &o);
};

// Distance between two pi-periodic angles, in [0, pi/2].
double angular_distance(double a, double b);

inline constexpr double kMaskClamp = 1e-6;
// Rendered projected normals shorter than this have no usable azimuth.
inline constexpr double kMinProjectedNormal = 0.02;

struct CovLoss {
    double value = 0.0;
    Vec3 grad = Vec3::Zero();  // w.r.t. predicted (xx, xy, yy)
};

// Anisotropy-ratio and principal-axis mismatch between a rendered and a prior Gaussian.
// The axis term only applies when the prior is anisotropic (L0 > L1).
CovLoss cov_loss(const Vec3 &pred_cov, const Mat2 &prior_cov, double eigvec_weight);
double cov_loss(const Gaussian2 &pred, const Gaussian2 &prior, double eigvec_weight);

// Ground truth seen by one pixel.
struct PixelTarget {
    Vec3 rgb = Vec3::Zero();
    double mask = 0.0;
    double dop = 0.0;
    double aop = 0.0;
    bool prior_valid = false;  // AoP/DoP usable at this pixel
    Gaussian2 prior;           // prior.valid: covariance usable (all neighbours valid)
};

// Per-term normalizers of a batch, fixed from the targets before rendering.
struct BatchNorms {
    double pixels = 0.0;
    double mean_pixels = 0.0;
    double cov_pixels = 0.0;
    double eikonal_samples = 0.0;
};

struct LossContext {
    LossWeights weights;
    LossToggles toggles;
    bool cov_active = true;
    BatchNorms norms;
};

bool cov_active_at(const LossWeights &weights, int iteration, int total_iterations);

// Adds one pixel's normalized term values to `acc` (total untouched) and, when
// `adjoint` is non-null, writes dL_total / d(prediction).
void accumulate_pixel_loss(const PixelPrediction &pred, const PixelTarget &target, const LossContext &ctx,
                           LossBreakdown &acc, PixelAdjoint *adjoint);

// total = color_w * color + polar_w * (mean + cov) + eikonal_w * eikonal + mask_w * mask.
void finalize_total(LossBreakdown &b, const LossWeights &w);

BatchNorms batch_norms(std::span<const PixelTarget> targets, std::span<const int> sample_counts);

LossBreakdown total_loss(std::span<const PixelPrediction> preds, std::span<const PixelTarget> targets,
                         const LossWeights &weights, const LossToggles &toggles, int iteration,
                         int total_iterations);

// One ray of a batch: its samples, the viewing camera's image axes and its target.
struct RayJob {
    const RaySamples *ray = nullptr;
    Mat23 image_axes = Mat23::Zero();
    const PixelTarget *target = nullptr;
};

// Forward + reverse pass over a batch. Gradients of the total loss w.r.t. the
// flat field parameters are appended to `grad` in job order.
LossBreakdown evaluate_batch(const SdfField &field, std::span<const RayJob> jobs, const LossContext &ctx,
                             GradientList *grad, const TapeOptions &opts = {});

// Dense gradient of the same batch; flags the first non-finite entry with its index.
struct DenseGradient {
    LossBreakdown loss;
    std::vector<double> values;
};
DenseGradient backward(const SdfField &field, std::span<const RayJob> jobs, const LossContext &ctx,
                       const TapeOptions &opts = {});

}  // namespace polsdf
