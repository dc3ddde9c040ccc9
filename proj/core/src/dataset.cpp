#include "polsdf/dataset.hpp"

#include "polsdf/priors.hpp"

#include <fstream>
#include <sstream>

namespace polsdf {

PixelTarget View::target(int x, int y) const {
    PixelTarget t;
    t.rgb = Vec3(rgb.at(y, x, 0), rgb.at(y, x, 1), rgb.at(y, x, 2));
    t.mask = mask(x, y);
    t.prior_valid = priors.valid(x, y) != 0;
    t.dop = priors.dop(x, y);
    t.aop = priors.aop(x, y);
    t.prior = prior_gaussians(x, y);
    return t;
}

size_t Dataset::pixel_count() const {
    size_t n = 0;
    for (const auto &v : views) n += size_t(v.camera.width) * v.camera.height;
    return n;
}

PolPriors priors_from_maps(const ScalarMap &aop, const ScalarMap &dop) {
    if (aop.width != dop.width || aop.height != dop.height) throw DataError("AoP and DoP maps differ in shape");
    PolPriors p;
    const int w = aop.width, h = aop.height;
    p.aop = ScalarMap(w, h);
    p.dop = ScalarMap(w, h);
    p.azimuth = ScalarMap(w, h);
    p.valid = PixelMap<uint8_t>(w, h, 0);
    for (size_t i = 0; i < aop.data.size(); ++i) {
        const double rho = dop.data[i];
        if (!std::isfinite(rho) || rho < 0.0 || rho > 1.0) throw DataError("DoP outside [0, 1]");
        if (rho <= 0.0) continue;
        p.aop.data[i] = fold_pi(aop.data[i]);
        p.dop.data[i] = rho;
        p.azimuth.data[i] = fold_pi(aop.data[i] + 0.5 * kPi);
        p.valid.data[i] = 1;
    }
    return p;
}

namespace {

ScalarMap load_scalar(const std::filesystem::path &path, int w, int h) {
    const uint32_t dims[2] = {uint32_t(h), uint32_t(w)};
    return scalar_map_from_tensor(load_map(path, dims));
}

}  // namespace

Dataset load_dataset(const std::filesystem::path &dir) {
    std::ifstream in(dir / "manifest.txt");
    if (!in) throw DataError("missing manifest.txt in " + dir.string());
    Dataset ds;
    std::vector<std::string> stems;
    bool have_bbox = false;
    std::string line;
    std::getline(in, line);
    if (line.rfind("polsdf-dataset", 0) != 0) throw DataError("not a polsdf dataset manifest");
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "scene") {
            ls >> ds.scene;
        } else if (key == "seed") {
            ls >> ds.seed;
        } else if (key == "bbox") {
            Vec3 lo, hi;
            ls >> lo.x() >> lo.y() >> lo.z() >> hi.x() >> hi.y() >> hi.z();
            if (!ls) throw DataError("malformed bbox line in manifest");
            ds.bbox = Box3(lo, hi);
            have_bbox = true;
        } else if (key == "view") {
            std::string stem;
            ls >> stem;
            stems.push_back(stem);
        }
    }
    if (!have_bbox) throw DataError("manifest has no bbox");
    const auto cameras = load_cameras(dir / "cameras.txt");
    if (cameras.size() != stems.size()) throw DataError("cameras.txt and manifest disagree on view count");

    for (size_t i = 0; i < stems.size(); ++i) {
        View v;
        v.name = stems[i];
        v.camera = cameras[i];
        const int w = v.camera.width, h = v.camera.height;
        v.rgb = read_png(dir / (stems[i] + ".png"));
        if (v.rgb.width != w || v.rgb.height != h || v.rgb.channels != 3)
            throw DataError(stems[i] + ".png does not match its camera");
        const Image mask = read_png(dir / (stems[i] + ".mask.png"));
        if (mask.width != w || mask.height != h) throw DataError(stems[i] + ".mask.png does not match its camera");
        v.mask = ScalarMap(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) v.mask(x, y) = mask.at(y, x, 0) > 0.5f ? 1.0 : 0.0;
        v.priors = priors_from_maps(load_scalar(dir / (stems[i] + ".phi.pten"), w, h),
                                    load_scalar(dir / (stems[i] + ".rho.pten"), w, h));
        v.prior_gaussians = extract_prior_gaussians(v.priors);
        ds.views.push_back(std::move(v));
    }
    return ds;
}

}  // namespace polsdf
