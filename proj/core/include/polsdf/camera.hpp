#pragma once

#include "polsdf/common.hpp"

#include <filesystem>
#include <vector>

namespace polsdf {

// Pinhole camera. Pixel (u, v) has its center at (u + 0.5, v + 0.5); camera
// space is x right, y down, z forward.
struct Camera {
    Mat3 intrinsics = Mat3::Identity();   // K, pixels
    Mat3 rotation = Mat3::Identity();     // W, world -> camera
    Vec3 translation = Vec3::Zero();      // world -> camera
    int width = 0;
    int height = 0;

    Vec3 center() const { return -rotation.transpose() * translation; }

    // Unit world-space direction through continuous pixel coordinates.
    Vec3 direction(double px, double py) const;
    Vec3 pixel_direction(int x, int y) const { return direction(x + 0.5, y + 0.5); }

    // First two rows of W: projects world vectors onto the image axes.
    Mat23 image_axes() const { return rotation.topRows<2>(); }

    // Throws DataError when K or W violate the camera invariants.
    void validate() const;

    // Camera at `eye` looking at `target`; `up` picks the roll.
    static Camera look_at(const Vec3 &eye, const Vec3 &target, const Vec3 &up, double focal, int width, int height);
};

// cameras.txt: one line per view,
//   <index> <width> <height> <K: 9 values row-major> <world-to-camera 4x4: 16 values row-major>
// space separated, every real printed with %.17g; '#' lines are comments.
void save_cameras(const std::filesystem::path &path, const std::vector<Camera> &cameras);
std::vector<Camera> load_cameras(const std::filesystem::path &path);

}  // namespace polsdf
