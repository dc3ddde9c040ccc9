#include "polsdf/synth.hpp"

#include "polsdf/rendering.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace polsdf {

void SynthScene::validate() const {
    if (!(dop_specular >= 0.0 && dop_specular <= 1.0 && dop_diffuse >= 0.0 && dop_diffuse <= 1.0))
        throw Error("scene DoP parameters must lie in [0, 1]");
    if (!(sigma_psi >= 0.0)) throw Error("scene sigma_psi must be nonnegative");
}

SynthScene make_scene(const std::string &name) {
    SynthScene s;
    s.name = name;
    if (name == "sphere") {
        s.shape = AnalyticSdf::sphere(0.5);
        s.bbox = Box3(Vec3::Constant(-0.75), Vec3::Constant(0.75));
    } else if (name == "torus") {
        // Tilted so that the hole is visible from most of the views.
        const Mat3 tilt = Eigen::AngleAxisd(0.5, Vec3::UnitX()).toRotationMatrix();
        s.shape = AnalyticSdf::torus(0.45, 0.2).set_pose(tilt, Vec3::Zero());
        s.bbox = Box3(Vec3::Constant(-0.8), Vec3::Constant(0.8));
        s.albedo = Vec3(0.35, 0.4, 0.55);
        s.specular = 1.0;
        s.shininess = 12.0;
        s.dop_diffuse = 0.3;
    } else if (name == "rounded_box") {
        const Mat3 pose = (Eigen::AngleAxisd(0.6, Vec3::UnitZ()) * Eigen::AngleAxisd(0.4, Vec3::UnitX())).toRotationMatrix();
        s.shape = AnalyticSdf::rounded_box(Vec3(0.4, 0.35, 0.3), 0.08).set_pose(pose, Vec3::Zero());
        s.bbox = Box3(Vec3::Constant(-0.8), Vec3::Constant(0.8));
        s.albedo = Vec3(0.55, 0.55, 0.6);
    } else {
        throw Error("unknown scene: " + name);
    }
    return s;
}

namespace {

// Returns the hit distance, or a negative value on a miss.
double sphere_trace(const AnalyticSdf &shape, const Box3 &box, const Vec3 &origin, const Vec3 &dir) {
    const auto span = intersect_box(box, origin, dir, 0.0, 1e9);
    if (!span) return -1.0;
    double t = span->first;
    for (int it = 0; it < 1024 && t <= span->second; ++it) {
        const double d = shape.distance(origin + t * dir);
        if (d < 1e-10) return t;
        t += d;
    }
    return -1.0;
}

}  // namespace

SynthView synth_view(const SynthScene &scene, const Camera &camera, uint64_t seed) {
    scene.validate();
    const int w = camera.width, h = camera.height;
    SynthView v;
    v.rgb = Image(w, h, 3);
    v.mask = PixelMap<uint8_t>(w, h, 0);
    v.psi = ScalarMap(w, h);
    v.phi = ScalarMap(w, h);
    v.rho = ScalarMap(w, h);
    v.normal = PixelMap<Vec3>(w, h, Vec3::Zero());
    v.specular_fraction = ScalarMap(w, h);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Vec3 origin = camera.center();
    const Vec3 light = scene.light_dir.normalized();

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Vec3 dir = camera.pixel_direction(x, y);
            const double t = sphere_trace(scene.shape, scene.bbox, origin, dir);
            if (t < 0.0) continue;
            const Vec3 p = origin + t * dir;
            const Vec3 n = scene.shape.gradient(p).normalized();

            const double ndotl = std::max(n.dot(light), 0.0);
            const Vec3 diffuse = scene.albedo * (scene.ambient + ndotl);
            const Vec3 reflected = 2.0 * n.dot(light) * n - light;
            const double rdotv = std::max(reflected.dot(-dir), 0.0);
            const double spec = ndotl > 0.0 ? scene.specular * std::pow(rdotv, scene.shininess) : 0.0;
            const Vec3 color = diffuse + Vec3::Constant(spec);
            const double frac = spec / (diffuse.mean() + spec);

            v.mask(x, y) = 1;
            v.normal(x, y) = n;
            v.specular_fraction(x, y) = frac;
            for (int c = 0; c < 3; ++c) v.rgb.at(y, x, c) = float(std::min(color[c], 1.0));

            const Vec3 nc = camera.rotation * n;
            if (std::hypot(nc.x(), nc.y()) < kCameraFacingThreshold) continue;
            const double rho = scene.dop_diffuse + (scene.dop_specular - scene.dop_diffuse) * frac;
            double psi = std::atan2(nc.y(), nc.x());
            // Draw unconditionally so the RNG stream does not depend on sigma.
            const double noise = gauss(rng);
            if (scene.sigma_psi > 0.0) psi += scene.sigma_psi * (1.0 - rho) * noise;
            psi = fold_pi(psi);
            v.psi(x, y) = psi;
            v.phi(x, y) = fold_pi(psi - 0.5 * kPi);
            v.rho(x, y) = rho;
        }
    }
    return v;
}

StokesImage synth_stokes(const SynthView &view) {
    StokesImage s(view.rho.width, view.rho.height);
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            const double intensity = (view.rgb.at(y, x, 0) + view.rgb.at(y, x, 1) + view.rgb.at(y, x, 2)) / 3.0;
            const double rho = view.rho(x, y), phi = view.phi(x, y);
            s(x, y) = {intensity, intensity * rho * std::cos(2.0 * phi), intensity * rho * std::sin(2.0 * phi)};
        }
    }
    return s;
}

std::vector<Camera> fibonacci_cameras(const SynthScene &scene, int n_views, int width, int height) {
    if (n_views < 1) throw Error("need at least one view");
    const Vec3 target = scene.shape.translation();
    const double radius = scene.shape.bounding_radius();
    const double distance = 4.0 * radius;
    const double focal = 0.4 * width * distance / radius;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    std::vector<Camera> cams;
    for (int i = 0; i < n_views; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n_views;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double theta = golden * i;
        const Vec3 dir(r * std::cos(theta), r * std::sin(theta), z);
        const Vec3 up = std::abs(z) > 0.99 ? Vec3::UnitY() : Vec3::UnitZ();
        cams.push_back(Camera::look_at(target + distance * dir, target, up, focal, width, height));
    }
    return cams;
}

namespace {

Tensor normal_tensor(const PixelMap<Vec3> &n) {
    Tensor t({uint32_t(n.height), uint32_t(n.width), 3u});
    for (size_t i = 0; i < n.data.size(); ++i)
        for (int c = 0; c < 3; ++c) t.data[3 * i + c] = float(n.data[i][c]);
    return t;
}

}  // namespace

void synth_dataset(const SynthScene &scene, int n_views, uint64_t seed, const std::filesystem::path &out_dir,
                   const SynthOptions &opts) {
    scene.validate();
    std::filesystem::create_directories(out_dir);
    const auto cams = fibonacci_cameras(scene, n_views, opts.width, opts.height);
    save_cameras(out_dir / "cameras.txt", cams);

    std::ofstream manifest(out_dir / "manifest.txt", std::ios::trunc);
    if (!manifest) throw Error("cannot write manifest in " + out_dir.string());
    char buf[256];
    manifest << "polsdf-dataset 1\n";
    manifest << "scene " << scene.name << '\n';
    manifest << "seed " << seed << '\n';
    manifest << "views " << n_views << '\n';
    manifest << "size " << opts.width << ' ' << opts.height << '\n';
    std::snprintf(buf, sizeof buf, "bbox %.17g %.17g %.17g %.17g %.17g %.17g\n", scene.bbox.min().x(),
                  scene.bbox.min().y(), scene.bbox.min().z(), scene.bbox.max().x(), scene.bbox.max().y(),
                  scene.bbox.max().z());
    manifest << buf;
    std::snprintf(buf, sizeof buf, "sigma_psi %.17g\n", scene.sigma_psi);
    manifest << buf;

    for (int i = 0; i < n_views; ++i) {
        const SynthView v = synth_view(scene, cams[i], seed * 1000003ull + uint64_t(i));
        std::snprintf(buf, sizeof buf, "view_%03d", i);
        const std::string stem = buf;
        write_png(out_dir / (stem + ".png"), v.rgb);
        Image mask(opts.width, opts.height, 1);
        for (size_t p = 0; p < v.mask.data.size(); ++p) mask.data[p] = v.mask.data[p] ? 1.0f : 0.0f;
        write_png(out_dir / (stem + ".mask.png"), mask);
        save_map(out_dir / (stem + ".psi.pten"), scalar_map_to_tensor(v.psi));
        save_map(out_dir / (stem + ".phi.pten"), scalar_map_to_tensor(v.phi));
        save_map(out_dir / (stem + ".rho.pten"), scalar_map_to_tensor(v.rho));
        save_map(out_dir / (stem + ".normal.pten"), normal_tensor(v.normal));
        if (opts.write_stokes) save_map(out_dir / (stem + ".stokes.pten"), stokes_to_tensor(synth_stokes(v)));
        manifest << "view " << stem << '\n';
    }
}

}  // namespace polsdf
