#pragma once

#include "polsdf/image_map.hpp"
#include "polsdf/png_io.hpp"
#include "polsdf/polcore.hpp"
#include "polsdf/pten.hpp"
#include "polsdf/rendering.hpp"

namespace polsdf {

// Eigen-decomposition of a symmetric 2x2 matrix, eigenvalues descending and clamped at 0.
// Column 0 of `vectors` is the principal axis with a nonnegative x component
// (nonnegative y when x is zero).
struct Eig2 {
    Vec2 values = Vec2::Zero();
    Mat2 vectors = Mat2::Identity();
};

Eig2 eig2(const Mat2 &cov);

inline constexpr double kEigenEpsilon = 1e-12;

// Degree of anisotropy (L0 + eps) / (L1 + eps) >= 1.
double doa(const Gaussian2 &g);
double doa(const Eig2 &e);

// Unit vector rotated by theta.
inline Vec2 unit_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Target Gaussian at pixel (x, y) from the azimuth map and its 4-neighbourhood.
// Each neighbour's axis is represented by whichever of +/- v(psi_j) lies closer to
// v(psi_i). `valid` is false when the pixel or any neighbour lacks a valid prior.
Gaussian2 extract_prior_gaussian(const ScalarMap &azimuth, const PixelMap<uint8_t> &valid, int x, int y);

PixelMap<Gaussian2> extract_prior_gaussians(const PolPriors &priors);

// HSV rendering: hue from the principal axis angle mod pi, saturation 1 - 1/DoA,
// value 1. Pixels without a valid Gaussian are black.
Image doa_visualization(const PixelMap<Gaussian2> &gaussians);

// Mean (2 channels) + covariance (xx, xy, yy) as an H x W x 5 tensor; invalid pixels are zero.
Tensor gaussians_to_tensor(const PixelMap<Gaussian2> &gaussians);
PixelMap<Gaussian2> gaussians_from_tensor(const Tensor &t);

}  // namespace polsdf
