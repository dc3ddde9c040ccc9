#pragma once

#include "polsdf/camera.hpp"
#include "polsdf/geometry.hpp"
#include "polsdf/png_io.hpp"
#include "polsdf/polcore.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace polsdf {

// Analytic object under one directional light with a Lambertian + Phong look and
// a DoP model that is high where the specular lobe dominates and low elsewhere.
struct SynthScene {
    std::string name = "sphere";
    AnalyticSdf shape = AnalyticSdf::sphere(0.5);
    Box3 bbox = Box3(Vec3::Constant(-0.75), Vec3::Constant(0.75));
    Vec3 albedo = Vec3(0.65, 0.5, 0.35);
    double ambient = 0.15;
    double specular = 0.8;
    double shininess = 24.0;
    Vec3 light_dir = Vec3(0.3, 0.4, 0.85).normalized();  // towards the light
    double dop_specular = 0.9;
    double dop_diffuse = 0.15;
    double sigma_psi = 0.0;  // azimuth noise (rad), scaled by (1 - rho) per pixel

    void validate() const;
};

// Presets: "sphere", "torus", "rounded_box". Throws Error for unknown names.
SynthScene make_scene(const std::string &name);

struct SynthView {
    Image rgb;                  // H x W x 3
    PixelMap<uint8_t> mask;
    ScalarMap psi;              // azimuth
    ScalarMap phi;              // AoP
    ScalarMap rho;              // DoP, 0 where invalid
    PixelMap<Vec3> normal;      // world-space ground-truth normal, zero on background
    ScalarMap specular_fraction;
};

// Sphere-traces the analytic shape; pixels whose projected normal is shorter than
// this are treated as camera facing and get rho = 0.
inline constexpr double kCameraFacingThreshold = 0.05;

SynthView synth_view(const SynthScene &scene, const Camera &camera, uint64_t seed);

// Stokes image implied by a view: s0 = mean radiance, (s1, s2) = s0 rho (cos 2phi, sin 2phi).
StokesImage synth_stokes(const SynthView &view);

struct SynthOptions {
    int width = 64;
    int height = 64;
    bool write_stokes = false;
};

// Cameras on a Fibonacci sphere looking at the object's center.
std::vector<Camera> fibonacci_cameras(const SynthScene &scene, int n_views, int width, int height);

// Writes cameras.txt, manifest.txt and view_%03d.{png, mask.png, psi.pten, phi.pten,
// rho.pten, normal.pten} (+ .stokes.pten on request).
void synth_dataset(const SynthScene &scene, int n_views, uint64_t seed, const std::filesystem::path &out_dir,
                   const SynthOptions &opts = {});

}  // namespace polsdf
