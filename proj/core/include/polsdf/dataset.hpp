#pragma once

#include "polsdf/camera.hpp"
#include "polsdf/geometry.hpp"
#include "polsdf/loss.hpp"
#include "polsdf/png_io.hpp"
#include "polsdf/polcore.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace polsdf {

struct View {
    std::string name;
    Camera camera;
    Image rgb;
    ScalarMap mask;
    PolPriors priors;
    PixelMap<Gaussian2> prior_gaussians;

    PixelTarget target(int x, int y) const;
};

struct Dataset {
    std::string scene;
    uint64_t seed = 0;
    Box3 bbox;
    std::vector<View> views;

    size_t pixel_count() const;
};

// Pixel priors from stored AoP/DoP maps: valid where rho > 0.
PolPriors priors_from_maps(const ScalarMap &aop, const ScalarMap &dop);

// Reads manifest.txt, cameras.txt and every view listed in the manifest.
// Throws DataError on missing files or inconsistent shapes.
Dataset load_dataset(const std::filesystem::path &dir);

}  // namespace polsdf
