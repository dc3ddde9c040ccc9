#include "polsdf/camera.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace polsdf {

Vec3 Camera::direction(double px, double py) const {
    const double fx = intrinsics(0, 0), fy = intrinsics(1, 1);
    const double cx = intrinsics(0, 2), cy = intrinsics(1, 2), skew = intrinsics(0, 1);
    const double yc = (py - cy) / fy;
    const double xc = (px - cx - skew * yc) / fx;
    return (rotation.transpose() * Vec3(xc, yc, 1.0)).normalized();
}

void Camera::validate() const {
    if (width <= 0 || height <= 0) throw DataError("camera: image size must be positive");
    if (!(intrinsics(0, 0) > 0.0) || !(intrinsics(1, 1) > 0.0)) throw DataError("camera: focal lengths must be positive");
    if (intrinsics(1, 0) != 0.0 || intrinsics(2, 0) != 0.0 || intrinsics(2, 1) != 0.0 || intrinsics(2, 2) != 1.0)
        throw DataError("camera: K must be upper triangular with K22 = 1");
    if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-10)
        throw DataError("camera: rotation is not orthonormal");
}

Camera Camera::look_at(const Vec3 &eye, const Vec3 &target, const Vec3 &up, double focal, int width, int height) {
    const Vec3 forward = (target - eye).normalized();
    Vec3 right = forward.cross(up);
    if (right.norm() < 1e-9) right = forward.cross(std::abs(forward.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY());
    right.normalize();
    const Vec3 down = forward.cross(right);
    Camera cam;
    cam.rotation.row(0) = right.transpose();
    cam.rotation.row(1) = down.transpose();
    cam.rotation.row(2) = forward.transpose();
    cam.translation = -cam.rotation * eye;
    cam.intrinsics << focal, 0.0, 0.5 * width, 0.0, focal, 0.5 * height, 0.0, 0.0, 1.0;
    cam.width = width;
    cam.height = height;
    return cam;
}

void save_cameras(const std::filesystem::path &path, const std::vector<Camera> &cameras) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "# polsdf cameras v1\n";
    out << "# index width height K[9] world_to_camera[16]\n";
    char buf[64];
    for (size_t i = 0; i < cameras.size(); ++i) {
        const Camera &c = cameras[i];
        out << i << ' ' << c.width << ' ' << c.height;
        for (int r = 0; r < 3; ++r)
            for (int col = 0; col < 3; ++col) {
                std::snprintf(buf, sizeof buf, " %.17g", c.intrinsics(r, col));
                out << buf;
            }
        for (int r = 0; r < 4; ++r)
            for (int col = 0; col < 4; ++col) {
                double v;
                if (r == 3) v = col == 3 ? 1.0 : 0.0;
                else if (col == 3) v = c.translation[r];
                else v = c.rotation(r, col);
                std::snprintf(buf, sizeof buf, " %.17g", v);
                out << buf;
            }
        out << '\n';
    }
}

std::vector<Camera> load_cameras(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<Camera> cams;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        size_t index = 0;
        Camera c;
        ls >> index >> c.width >> c.height;
        for (int r = 0; r < 3; ++r)
            for (int col = 0; col < 3; ++col) ls >> c.intrinsics(r, col);
        Eigen::Matrix4d m;
        for (int r = 0; r < 4; ++r)
            for (int col = 0; col < 4; ++col) ls >> m(r, col);
        if (!ls) throw DataError("malformed camera line in " + path.string());
        if (index != cams.size()) throw DataError("camera indices must be consecutive from 0");
        c.rotation = m.topLeftCorner<3, 3>();
        c.translation = m.topRightCorner<3, 1>();
        c.validate();
        cams.push_back(c);
    }
    return cams;
}

}  // namespace polsdf
