#pragma once

#include "polsdf/common.hpp"
#include "polsdf/image_map.hpp"
#include "polsdf/pten.hpp"

#include <cstdint>
#include <filesystem>

namespace polsdf {

// Linear Stokes components of one pixel. Circular polarization (s3) is not used.
struct Stokes {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
};

using StokesImage = PixelMap<Stokes>;

// Pixel-aligned polarization cues for one view.
//   aop      angle of polarization phi in [0, pi)
//   dop      degree of polarization rho in [0, 1]
//   azimuth  image-plane normal azimuth psi = phi + pi/2 (mod pi)
struct PolPriors {
    ScalarMap aop;
    ScalarMap dop;
    ScalarMap azimuth;
    PixelMap<uint8_t> valid;

    int width() const { return aop.width; }
    int height() const { return aop.height; }
};

// Pixels whose intensity or polarized intensity is at or below
// kStokesValidityFraction * max(s0) are flagged invalid with phi = psi = rho = 0.
inline constexpr double kStokesValidityFraction = 1e-6;

PolPriors stokes_to_priors(const StokesImage &img);

// Reweighted AoP phi * rho; invalid pixels map to zero.
ScalarMap reweight_aop(const PolPriors &priors);

// Inverse of stokes_to_priors for data generation: s = (1, rho cos 2phi, rho sin 2phi).
StokesImage priors_from_synthetic(const ScalarMap &aop, const ScalarMap &dop);

// H x W x 3 PTEN tensors (s0, s1, s2).
Tensor stokes_to_tensor(const StokesImage &img);
StokesImage stokes_from_tensor(const Tensor &t);

Tensor scalar_map_to_tensor(const ScalarMap &map);
ScalarMap scalar_map_from_tensor(const Tensor &t);

}  // namespace polsdf
