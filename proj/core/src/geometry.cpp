#include "polsdf/geometry.hpp"

#include "polsdf/pten.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace polsdf {

namespace {

double sign_nonneg(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

// ---------------------------------------------------------------- AnalyticSdf

AnalyticSdf AnalyticSdf::sphere(double radius) {
    if (!(radius > 0.0)) throw Error("sphere radius must be positive");
    AnalyticSdf s;
    s.kind_ = Kind::Sphere;
    s.params_ = Vec3(radius, 0.0, 0.0);
    return s;
}

AnalyticSdf AnalyticSdf::torus(double ring, double tube) {
    if (!(tube > 0.0) || !(ring > tube)) throw Error("torus needs ring > tube > 0");
    AnalyticSdf s;
    s.kind_ = Kind::Torus;
    s.params_ = Vec3(ring, tube, 0.0);
    return s;
}

AnalyticSdf AnalyticSdf::rounded_box(const Vec3 &half, double rounding) {
    if (!(rounding >= 0.0) || !(half.minCoeff() > rounding)) throw Error("rounded box needs half > rounding >= 0");
    AnalyticSdf s;
    s.kind_ = Kind::RoundedBox;
    s.params_ = half;
    s.rounding_ = rounding;
    return s;
}

AnalyticSdf &AnalyticSdf::set_pose(const Mat3 &rotation, const Vec3 &translation) {
    rotation_ = rotation;
    translation_ = translation;
    return *this;
}

std::string AnalyticSdf::name() const {
    switch (kind_) {
    case Kind::Sphere: return "sphere";
    case Kind::Torus: return "torus";
    case Kind::RoundedBox: return "rounded_box";
    }
    return "unknown";
}

double AnalyticSdf::local_distance(const Vec3 &p) const {
    switch (kind_) {
    case Kind::Sphere: return p.norm() - params_.x();
    case Kind::Torus: {
        const double qx = std::hypot(p.x(), p.y()) - params_.x();
        return std::hypot(qx, p.z()) - params_.y();
    }
    case Kind::RoundedBox: {
        const Vec3 q = p.cwiseAbs() - (params_ - Vec3::Constant(rounding_));
        return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0) - rounding_;
    }
    }
    return 0.0;
}

Vec3 AnalyticSdf::local_gradient(const Vec3 &p) const {
    switch (kind_) {
    case Kind::Sphere: {
        const double r = p.norm();
        return r > 0.0 ? Vec3(p / r) : Vec3::UnitZ();
    }
    case Kind::Torus: {
        const double rxy = std::hypot(p.x(), p.y());
        const Vec3 radial = rxy > 0.0 ? Vec3(p.x() / rxy, p.y() / rxy, 0.0) : Vec3::UnitX();
        Eigen::Vector2d q(rxy - params_.x(), p.z());
        const double qn = q.norm();
        if (qn > 0.0) q /= qn;
        else q = Eigen::Vector2d(1.0, 0.0);
        return q.x() * radial + q.y() * Vec3::UnitZ();
    }
    case Kind::RoundedBox: {
        const Vec3 q = p.cwiseAbs() - (params_ - Vec3::Constant(rounding_));
        const Vec3 s(sign_nonneg(p.x()), sign_nonneg(p.y()), sign_nonneg(p.z()));
        if (q.maxCoeff() > 0.0) {
            const Vec3 o = q.cwiseMax(0.0);
            return s.cwiseProduct(o / o.norm());
        }
        Eigen::Index axis;
        q.maxCoeff(&axis);
        Vec3 g = Vec3::Zero();
        g[axis] = s[axis];
        return g;
    }
    }
    return Vec3::UnitZ();
}

double AnalyticSdf::distance(const Vec3 &x) const {
    return local_distance(rotation_.transpose() * (x - translation_));
}

Vec3 AnalyticSdf::gradient(const Vec3 &x) const {
    return rotation_ * local_gradient(rotation_.transpose() * (x - translation_));
}

double AnalyticSdf::bounding_radius() const {
    switch (kind_) {
    case Kind::Sphere: return params_.x();
    case Kind::Torus: return params_.x() + params_.y();
    case Kind::RoundedBox: {
        const Vec3 inner = params_ - Vec3::Constant(rounding_);
        return inner.norm() + rounding_;
    }
    }
    return 0.0;
}

// ---------------------------------------------------------------- SdfField

SdfField::SdfField(const Box3 &bbox, const std::array<int, 3> &resolution) : bbox_(bbox), res_(resolution) {
    for (int a = 0; a < 3; ++a)
        if (res_[a] < 2) throw Error("SdfField: resolution must be at least 2 per axis");
    if (bbox.isEmpty() || (bbox.sizes().array() <= 0.0).any()) throw Error("SdfField: empty bounding box");
    for (int a = 0; a < 3; ++a) cell_[a] = bbox_.sizes()[a] / (res_[a] - 1);
    inv_cell_ = cell_.cwiseInverse();
    const size_t n = size_t(res_[0]) * res_[1] * res_[2];
    values_.assign(n, 0.0);
    radiance_.assign(n * kRadianceChannels, 0.0);
}

SdfField SdfField::sphere_init(const Box3 &bbox, const std::array<int, 3> &resolution, double initial_sharpness) {
    SdfField f(bbox, resolution);
    const Vec3 center = bbox.center();
    const double radius = 0.4 * bbox.sizes().minCoeff();
    for (int k = 0; k < resolution[2]; ++k)
        for (int j = 0; j < resolution[1]; ++j)
            for (int i = 0; i < resolution[0]; ++i)
                f.values_[f.vertex_index(i, j, k)] = (f.vertex_position(i, j, k) - center).norm() - radius;
    for (size_t v = 0; v < f.vertex_count(); ++v)
        for (int c = 0; c < 3; ++c) f.radiance_[v * kRadianceChannels + c] = 0.5;
    f.log_sharpness_ = std::log(initial_sharpness);
    return f;
}

Vec3 SdfField::vertex_position(int i, int j, int k) const {
    return bbox_.min() + Vec3(i * cell_.x(), j * cell_.y(), k * cell_.z());
}

double &SdfField::param(size_t i) {
    const size_t n = values_.size();
    if (i < n) return values_[i];
    if (i < n * (1 + kRadianceChannels)) return radiance_[i - n];
    return log_sharpness_;
}

double SdfField::param(size_t i) const { return const_cast<SdfField *>(this)->param(i); }

void SdfField::stencil(const Vec3 &x, Stencil &s) const {
    int base[3];
    double t[3];
    for (int a = 0; a < 3; ++a) {
        const double u = (x[a] - bbox_.min()[a]) * inv_cell_[a];
        const int c = std::clamp(int(std::floor(u)), 0, res_[a] - 2);
        base[a] = c;
        t[a] = u - c;
    }
    const uint32_t origin = vertex_index(base[0], base[1], base[2]);
    const uint32_t sy = uint32_t(res_[0]), sz = uint32_t(res_[0]) * uint32_t(res_[1]);
    for (int corner = 0; corner < 8; ++corner) {
        const int di = corner & 1, dj = (corner >> 1) & 1, dk = (corner >> 2) & 1;
        const double wx = di ? t[0] : 1.0 - t[0];
        const double wy = dj ? t[1] : 1.0 - t[1];
        const double wz = dk ? t[2] : 1.0 - t[2];
        s.vertex[corner] = origin + uint32_t(di) + uint32_t(dj) * sy + uint32_t(dk) * sz;
        s.weight[corner] = wx * wy * wz;
        s.dweight[corner] = Vec3((di ? inv_cell_.x() : -inv_cell_.x()) * wy * wz,
                                 wx * (dj ? inv_cell_.y() : -inv_cell_.y()) * wz,
                                 wx * wy * (dk ? inv_cell_.z() : -inv_cell_.z()));
    }
}

Stencil SdfField::stencil(const Vec3 &x) const {
    Stencil s;
    stencil(x, s);
    return s;
}

double SdfField::sdf(const Stencil &s) const {
    double d = 0.0;
    for (int c = 0; c < 8; ++c) d += s.weight[c] * values_[s.vertex[c]];
    return d;
}

Vec3 SdfField::sdf_grad(const Stencil &s) const {
    Vec3 g = Vec3::Zero();
    for (int c = 0; c < 8; ++c) g += s.dweight[c] * values_[s.vertex[c]];
    return g;
}

double SdfField::sdf(const Vec3 &x) const { return sdf(stencil(x)); }
Vec3 SdfField::sdf_grad(const Vec3 &x) const { return sdf_grad(stencil(x)); }

NormalResult SdfField::normal(const Vec3 &x) const {
    NormalResult r;
    const Vec3 g = sdf_grad(x);
    r.gradient_norm = g.norm();
    if (r.gradient_norm > kDegenerateGradient) {
        r.normal = g / r.gradient_norm;
        r.valid = true;
    }
    return r;
}

Vec3 SdfField::radiance_raw(const Stencil &s, const Vec3 &view_dir) const {
    Vec3 out = Vec3::Zero();
    for (int c = 0; c < 8; ++c) {
        const double *p = &radiance_[size_t(s.vertex[c]) * kRadianceChannels];
        for (int ch = 0; ch < 3; ++ch) {
            const double *coef = p + 3 + 3 * ch;
            out[ch] += s.weight[c] * (p[ch] + coef[0] * view_dir.x() + coef[1] * view_dir.y() + coef[2] * view_dir.z());
        }
    }
    return out;
}

Vec3 SdfField::radiance_eval(const Vec3 &x, const Vec3 &view_dir) const {
    return radiance_raw(stencil(x), view_dir).cwiseMax(0.0);
}

void SdfField::assign(const AnalyticSdf &sdf) {
    for (int k = 0; k < res_[2]; ++k)
        for (int j = 0; j < res_[1]; ++j)
            for (int i = 0; i < res_[0]; ++i)
                values_[vertex_index(i, j, k)] = sdf.distance(vertex_position(i, j, k));
}

SdfField SdfField::resampled(const std::array<int, 3> &resolution) const {
    SdfField f(bbox_, resolution);
    f.log_sharpness_ = log_sharpness_;
    Stencil st;
    for (int k = 0; k < resolution[2]; ++k) {
        for (int j = 0; j < resolution[1]; ++j) {
            for (int i = 0; i < resolution[0]; ++i) {
                const uint32_t v = f.vertex_index(i, j, k);
                stencil(f.vertex_position(i, j, k), st);
                f.values_[v] = sdf(st);
                for (int ch = 0; ch < kRadianceChannels; ++ch) {
                    double r = 0.0;
                    for (int c = 0; c < 8; ++c) r += st.weight[c] * radiance_[size_t(st.vertex[c]) * kRadianceChannels + ch];
                    f.radiance_[size_t(v) * kRadianceChannels + ch] = r;
                }
            }
        }
    }
    return f;
}

double eikonal_residual(const SdfField &field, std::span<const Vec3> points) {
    if (points.empty()) throw Error("eikonal_residual: empty point set");
    double sum = 0.0;
    for (const Vec3 &p : points) {
        const double r = field.sdf_grad(p).norm() - 1.0;
        sum += r * r;
    }
    return sum / double(points.size());
}

// ---------------------------------------------------------------- checkpoint I/O

void save_field(const std::filesystem::path &dir, const SdfField &field) {
    std::filesystem::create_directories(dir);
    const auto &r = field.resolution();
    Tensor values({uint32_t(r[2]), uint32_t(r[1]), uint32_t(r[0])});
    for (size_t i = 0; i < field.values().size(); ++i) values.data[i] = float(field.values()[i]);
    save_map(dir / "sdf.pten", values);

    Tensor rad({uint32_t(r[2]), uint32_t(r[1]), uint32_t(r[0]), uint32_t(SdfField::kRadianceChannels)});
    for (size_t i = 0; i < field.radiance().size(); ++i) rad.data[i] = float(field.radiance()[i]);
    save_map(dir / "radiance.pten", rad);

    std::ofstream out(dir / "field.txt", std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "field.txt").string());
    char buf[256];
    out << "polsdf-field 1\n";
    std::snprintf(buf, sizeof buf, "bbox_min %.17g %.17g %.17g\n", field.bbox().min().x(), field.bbox().min().y(),
                  field.bbox().min().z());
    out << buf;
    std::snprintf(buf, sizeof buf, "bbox_max %.17g %.17g %.17g\n", field.bbox().max().x(), field.bbox().max().y(),
                  field.bbox().max().z());
    out << buf;
    out << "resolution " << r[0] << ' ' << r[1] << ' ' << r[2] << '\n';
    std::snprintf(buf, sizeof buf, "sharpness %.17g\n", field.sharpness());
    out << buf;
}

SdfField load_field(const std::filesystem::path &dir) {
    std::ifstream in(dir / "field.txt");
    if (!in) throw DataError("missing field header: " + (dir / "field.txt").string());
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "polsdf-field" || version != 1) throw DataError("bad field header magic");
    Vec3 lo = Vec3::Zero(), hi = Vec3::Zero();
    std::array<int, 3> res{0, 0, 0};
    double sharpness = 0.0;
    std::string key;
    while (in >> key) {
        if (key == "bbox_min") in >> lo.x() >> lo.y() >> lo.z();
        else if (key == "bbox_max") in >> hi.x() >> hi.y() >> hi.z();
        else if (key == "resolution") in >> res[0] >> res[1] >> res[2];
        else if (key == "sharpness") in >> sharpness;
        else throw DataError("unknown field header key: " + key);
        if (!in) throw DataError("malformed field header");
    }
    if (!(sharpness > 0.0)) throw DataError("field header: sharpness must be positive");
    SdfField field(Box3(lo, hi), res);
    const uint32_t vd[3] = {uint32_t(res[2]), uint32_t(res[1]), uint32_t(res[0])};
    const Tensor values = load_map(dir / "sdf.pten", vd);
    const uint32_t rd[4] = {vd[0], vd[1], vd[2], uint32_t(SdfField::kRadianceChannels)};
    const Tensor rad = load_map(dir / "radiance.pten", rd);
    for (size_t i = 0; i < values.size(); ++i) field.values()[i] = values.data[i];
    for (size_t i = 0; i < rad.size(); ++i) field.radiance()[i] = rad.data[i];
    field.log_sharpness() = std::log(sharpness);
    return field;
}

}  // namespace polsdf
