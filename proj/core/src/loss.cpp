#include "polsdf/loss.hpp"

#include <algorithm>
#include <cmath>

namespace polsdf {

void LossWeights::validate() const {
    if (!(color >= 0.0 && polar >= 0.0 && eigvec >= 0.0 && eikonal >= 0.0 && mask >= 0.0))
        throw Error("loss weights must be nonnegative");
    if (!(cov_activation_fraction >= 0.0 && cov_activation_fraction <= 1.0))
        throw Error("cov_activation_fraction must lie in [0, 1]");
}

LossToggles ablation_toggles(const std::string &name, LossWeights &weights) {
    if (name == "full") return {true, true, true};
    if (name == "color-only") {
        weights.polar = 0.0;
        return {false, false, true};
    }
    if (name == "mean") return {true, false, false};
    if (name == "cov") return {false, true, false};
    if (name == "rew-mean") return {true, false, true};
    if (name == "rew-cov") return {false, true, true};
    throw Error("unknown ablation: " + name);
}

LossBreakdown &LossBreakdown::operator+=(const LossBreakdown &o) {
    color += o.color;
    mean += o.mean;
    cov += o.cov;
    eikonal += o.eikonal;
    mask += o.mask;
    total += o.total;
    return *this;
}

double angular_distance(double a, double b) {
    const double m = fold_pi(a - b);
    return std::min(m, kPi - m);
}

CovLoss cov_loss(const Vec3 &pred, const Mat2 &prior_cov, double eigvec_weight) {
    CovLoss out;
    const Eig2 prior = eig2(prior_cov);
    const double prior_ratio = (prior.values[1] + kEigenEpsilon) / (prior.values[0] + kEigenEpsilon);

    const double a = pred.x(), b = pred.y(), c = pred.z();
    const double mean = 0.5 * (a + c);
    const double half = 0.5 * (a - c);
    const double radius = std::hypot(half, b);
    const double l0 = std::max(mean + radius, 0.0);
    const double l1 = std::max(mean - radius, 0.0);
    const double ratio = (l1 + kEigenEpsilon) / (l0 + kEigenEpsilon);

    const double diff = ratio - prior_ratio;
    out.value = std::abs(diff);
    const double dratio = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    if (dratio != 0.0) {
        // dL0 and dL1 w.r.t. (a, b, c); the radius term is dropped at the isotropic point.
        const double hr = radius > 0.0 ? half / radius : 0.0;
        const double br = radius > 0.0 ? b / radius : 0.0;
        const Vec3 dl0 = mean + radius > 0.0 ? Vec3(0.5 + 0.5 * hr, br, 0.5 - 0.5 * hr) : Vec3::Zero();
        const Vec3 dl1 = mean - radius > 0.0 ? Vec3(0.5 - 0.5 * hr, -br, 0.5 + 0.5 * hr) : Vec3::Zero();
        const double inv0 = 1.0 / (l0 + kEigenEpsilon);
        out.grad += dratio * (inv0 * dl1 - ratio * inv0 * dl0);
    }

    if (eigvec_weight > 0.0 && prior.values[0] - prior.values[1] > kEigenEpsilon) {
        const double prior_theta = std::atan2(prior.vectors(1, 0), prior.vectors(0, 0));
        const double theta = radius > 0.0 ? 0.5 * std::atan2(b, half) : 0.0;
        const double delta = theta - prior_theta;
        const double cosd = std::cos(delta);
        out.value += eigvec_weight * (1.0 - std::abs(cosd));
        if (radius > 0.0 && cosd != 0.0) {
            const double dtheta_coef = eigvec_weight * (cosd > 0.0 ? 1.0 : -1.0) * std::sin(delta);
            const double r2 = radius * radius;
            out.grad += dtheta_coef * Vec3(-b / (4.0 * r2), half / (2.0 * r2), b / (4.0 * r2));
        }
    }
    return out;
}

double cov_loss(const Gaussian2 &pred, const Gaussian2 &prior, double eigvec_weight) {
    const Vec3 p(pred.cov(0, 0), 0.5 * (pred.cov(0, 1) + pred.cov(1, 0)), pred.cov(1, 1));
    return cov_loss(p, prior.cov, eigvec_weight).value;
}

bool cov_active_at(const LossWeights &weights, int iteration, int total_iterations) {
    return double(iteration) >= weights.cov_activation_fraction * double(total_iterations);
}

void accumulate_pixel_loss(const PixelPrediction &pred, const PixelTarget &target, const LossContext &ctx,
                           LossBreakdown &acc, PixelAdjoint *adjoint) {
    const LossWeights &w = ctx.weights;
    const LossToggles &tg = ctx.toggles;
    const double rho = target.prior_valid ? target.dop : 0.0;
    if (adjoint) *adjoint = PixelAdjoint{};

    // Radiance.
    if (ctx.norms.pixels > 0.0) {
        const double color_weight = (tg.reweight ? 1.0 - rho : 1.0) / ctx.norms.pixels;
        const Vec3 err = pred.color - target.rgb;
        acc.color += color_weight * err.squaredNorm() / 3.0;
        if (adjoint) adjoint->color = w.color * color_weight * (2.0 / 3.0) * err;

        const double o = std::clamp(pred.opacity, kMaskClamp, 1.0 - kMaskClamp);
        const double m = target.mask;
        acc.mask += -(m * std::log(o) + (1.0 - m) * std::log(1.0 - o)) / ctx.norms.pixels;
        if (adjoint && pred.opacity > kMaskClamp && pred.opacity < 1.0 - kMaskClamp)
            adjoint->opacity = w.mask * (-m / o + (1.0 - m) / (1.0 - o)) / ctx.norms.pixels;
    }

    if (ctx.norms.eikonal_samples > 0.0) {
        acc.eikonal += pred.eikonal_sum / ctx.norms.eikonal_samples;
        if (adjoint) adjoint->eikonal = w.eikonal / ctx.norms.eikonal_samples;
    }

    if (!target.prior_valid || !pred.valid) return;
    const double polar_weight = tg.reweight ? rho : 1.0;

    if (tg.use_mean && ctx.norms.mean_pixels > 0.0) {
        const double len2 = pred.normal.squaredNorm();
        if (len2 > kMinProjectedNormal * kMinProjectedNormal) {
            const double predicted_aop = fold_pi(std::atan2(pred.normal.y(), pred.normal.x()) + 0.5 * kPi);
            const double diff = fold_pi(predicted_aop - target.aop);
            const double dist = std::min(diff, kPi - diff);
            const double scale = polar_weight / ctx.norms.mean_pixels;
            acc.mean += scale * dist;
            if (adjoint) {
                const double ddist = diff <= 0.5 * kPi ? 1.0 : -1.0;
                const Vec2 dangle(-pred.normal.y() / len2, pred.normal.x() / len2);
                adjoint->normal = w.polar * scale * ddist * dangle;
            }
        }
    }

    if (tg.use_cov && ctx.cov_active && target.prior.valid && ctx.norms.cov_pixels > 0.0) {
        const CovLoss cl = cov_loss(pred.cov, target.prior.cov, w.eigvec);
        const double scale = polar_weight / ctx.norms.cov_pixels;
        acc.cov += scale * cl.value;
        if (adjoint) adjoint->cov = w.polar * scale * cl.grad;
    }
}

void finalize_total(LossBreakdown &b, const LossWeights &w) {
    b.total = w.color * b.color + w.polar * (b.mean + b.cov) + w.eikonal * b.eikonal + w.mask * b.mask;
}

BatchNorms batch_norms(std::span<const PixelTarget> targets, std::span<const int> sample_counts) {
    BatchNorms n;
    n.pixels = double(targets.size());
    for (const PixelTarget &t : targets) {
        if (t.prior_valid) n.mean_pixels += 1.0;
        if (t.prior_valid && t.prior.valid) n.cov_pixels += 1.0;
    }
    for (int c : sample_counts) n.eikonal_samples += c;
    return n;
}

LossBreakdown total_loss(std::span<const PixelPrediction> preds, std::span<const PixelTarget> targets,
                         const LossWeights &weights, const LossToggles &toggles, int iteration,
                         int total_iterations) {
    if (preds.size() != targets.size()) throw DataError("total_loss: predictions and targets differ in length");
    std::vector<int> counts;
    counts.reserve(preds.size());
    for (const PixelPrediction &p : preds) counts.push_back(p.eikonal_count);
    LossContext ctx{weights, toggles, cov_active_at(weights, iteration, total_iterations), batch_norms(targets, counts)};
    LossBreakdown b;
    for (size_t i = 0; i < preds.size(); ++i) accumulate_pixel_loss(preds[i], targets[i], ctx, b, nullptr);
    if (!toggles.use_mean) b.mean = 0.0;
    if (!toggles.use_cov) b.cov = 0.0;
    finalize_total(b, weights);
    return b;
}

LossBreakdown evaluate_batch(const SdfField &field, std::span<const RayJob> jobs, const LossContext &ctx,
                             GradientList *grad, const TapeOptions &opts) {
    PixelTape tape;
    LossBreakdown b;
    PixelAdjoint adj;
    for (const RayJob &job : jobs) {
        const PixelPrediction pred = tape.forward(field, job.image_axes, *job.ray, opts);
        accumulate_pixel_loss(pred, *job.target, ctx, b, grad ? &adj : nullptr);
        if (grad) tape.backward(field, adj, *grad);
    }
    finalize_total(b, ctx.weights);
    return b;
}

DenseGradient backward(const SdfField &field, std::span<const RayJob> jobs, const LossContext &ctx,
                       const TapeOptions &opts) {
    GradientList list;
    DenseGradient out;
    out.loss = evaluate_batch(field, jobs, ctx, &list, opts);
    out.values.assign(field.param_count(), 0.0);
    for (size_t i = 0; i < list.size(); ++i) out.values[list.index[i]] += list.value[i];
    for (size_t i = 0; i < out.values.size(); ++i)
        if (!std::isfinite(out.values[i]))
            throw NumericalError("non-finite gradient at parameter " + std::to_string(i));
    return out;
}

}  // namespace polsdf
