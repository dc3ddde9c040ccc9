#include "polsdf/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>

namespace polsdf {

PointCloud sample_surface(const Mesh &mesh, size_t count, uint64_t seed) {
    if (mesh.empty()) throw Error("cannot sample an empty mesh");
    std::vector<double> cdf(mesh.faces.size());
    std::vector<Vec3> normals(mesh.faces.size());
    double total = 0.0;
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto &t = mesh.faces[f];
        const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]]).cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
        total += 0.5 * n.norm();
        cdf[f] = total;
        normals[f] = n.normalized();
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    PointCloud pc;
    pc.points.reserve(count);
    pc.normals.reserve(count);
    for (size_t s = 0; s < count; ++s) {
        const double r = uni(rng) * total;
        const size_t f = std::min(size_t(std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin()), cdf.size() - 1);
        const double su = std::sqrt(uni(rng)), v = uni(rng);
        const auto &t = mesh.faces[f];
        pc.points.push_back((1.0 - su) * mesh.vertices[t[0]] + su * (1.0 - v) * mesh.vertices[t[1]] +
                            su * v * mesh.vertices[t[2]]);
        pc.normals.push_back(normals[f]);
    }
    return pc;
}

PointCloud sample_analytic_surface(const AnalyticSdf &sdf, const Box3 &bbox, size_t count, uint64_t seed,
                                   int resolution) {
    const Mesh proxy = marching_cubes(sample_grid(sdf, bbox, resolution));
    PointCloud pc = sample_surface(proxy, count, seed);
    for (size_t i = 0; i < pc.points.size(); ++i) {
        Vec3 &p = pc.points[i];
        for (int it = 0; it < 3; ++it) p -= sdf.distance(p) * sdf.gradient(p).normalized();
        pc.normals[i] = sdf.gradient(p).normalized();
    }
    return pc;
}

NearestNeighborGrid::NearestNeighborGrid(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
    if (points_.empty()) throw Error("nearest-neighbour grid needs at least one point");
    Box3 box;
    for (const auto &p : points_) box.extend(p);
    origin_ = box.min();
    const Vec3 size = box.sizes().cwiseMax(1e-9);
    // About two points per occupied cell for surface-like sets.
    const double volume = size.prod();
    cell_ = std::max(std::cbrt(volume / std::max<size_t>(points_.size() / 2, 1)), 1e-9);
    cell_ = std::max(cell_, size.maxCoeff() / 512.0);
    for (int c = 0; c < 3; ++c) dims_[c] = std::max(1, int(std::floor(size[c] / cell_)) + 1);
    const size_t cells = size_t(dims_[0]) * dims_[1] * dims_[2];
    std::vector<uint32_t> counts(cells + 1, 0);
    std::vector<uint32_t> cell_id(points_.size());
    for (size_t i = 0; i < points_.size(); ++i) {
        const auto c = cell_of(points_[i]);
        cell_id[i] = uint32_t((size_t(c[2]) * dims_[1] + c[1]) * dims_[0] + c[0]);
        ++counts[cell_id[i] + 1];
    }
    for (size_t c = 0; c < cells; ++c) counts[c + 1] += counts[c];
    start_ = counts;
    order_.resize(points_.size());
    for (size_t i = 0; i < points_.size(); ++i) order_[counts[cell_id[i]]++] = uint32_t(i);
}

std::array<int, 3> NearestNeighborGrid::cell_of(const Vec3 &p) const {
    std::array<int, 3> c;
    for (int a = 0; a < 3; ++a) c[a] = std::clamp(int(std::floor((p[a] - origin_[a]) / cell_)), 0, dims_[a] - 1);
    return c;
}

std::pair<size_t, double> NearestNeighborGrid::nearest(const Vec3 &q) const {
    const auto c = cell_of(q);
    const int max_ring = std::max({dims_[0], dims_[1], dims_[2]});
    double best2 = std::numeric_limits<double>::infinity();
    size_t best = 0;
    for (int r = 0; r <= max_ring; ++r) {
        for (int dz = -r; dz <= r; ++dz) {
            const int z = c[2] + dz;
            if (z < 0 || z >= dims_[2]) continue;
            for (int dy = -r; dy <= r; ++dy) {
                const int y = c[1] + dy;
                if (y < 0 || y >= dims_[1]) continue;
                // Interior rows of the ring only need their two end cells.
                const bool shell = std::abs(dz) == r || std::abs(dy) == r;
                const int step = shell ? 1 : 2 * r;
                for (int dx = -r; dx <= r; dx += step) {
                    const int x = c[0] + dx;
                    if (x < 0 || x >= dims_[0]) continue;
                    const size_t cell = (size_t(z) * dims_[1] + y) * dims_[0] + x;
                    for (uint32_t k = start_[cell]; k < start_[cell + 1]; ++k) {
                        const double d2 = (points_[order_[k]] - q).squaredNorm();
                        if (d2 < best2) {
                            best2 = d2;
                            best = order_[k];
                        }
                    }
                }
            }
        }
        // Unvisited points sit at least r cells away from the query's cell.
        const double reach = r * cell_;
        if (best2 <= reach * reach) break;
    }
    return {best, std::sqrt(best2)};
}

double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
    if (a.empty() || b.empty()) throw Error("chamfer distance needs two nonempty point sets");
    const NearestNeighborGrid ga(a), gb(b);
    double sa = 0.0, sb = 0.0;
    for (const auto &p : a) sa += gb.distance(p);
    for (const auto &p : b) sb += ga.distance(p);
    return sa / double(a.size()) + sb / double(b.size());
}

double normal_error_degrees(const PointCloud &samples, const AnalyticSdf &gt) {
    if (samples.points.empty()) throw Error("no samples for the normal error");
    double sum = 0.0;
    for (size_t i = 0; i < samples.points.size(); ++i) {
        const Vec3 g = gt.gradient(samples.points[i]).normalized();
        const double c = std::clamp(g.dot(samples.normals[i]), -1.0, 1.0);
        sum += std::acos(c);
    }
    return sum / double(samples.points.size()) * 180.0 / kPi;
}

EvalReport evaluate_mesh(const Mesh &mesh, const AnalyticSdf &gt, const Box3 &bbox, size_t samples, uint64_t seed) {
    if (mesh.empty()) throw Error("reconstructed mesh is empty");
    const PointCloud pred = sample_surface(mesh, samples, seed);
    const PointCloud ref = sample_analytic_surface(gt, bbox, samples, seed + 1);
    EvalReport r;
    r.scene = gt.name();
    r.chamfer = chamfer_distance(pred.points, ref.points);
    r.normal_error_deg = normal_error_degrees(pred, gt);
    r.samples = samples;
    return r;
}

EvalReport evaluate_mesh(const Mesh &mesh, const Mesh &gt, size_t samples, uint64_t seed) {
    if (mesh.empty() || gt.empty()) throw Error("cannot evaluate an empty mesh");
    const PointCloud pred = sample_surface(mesh, samples, seed);
    // Same seed on both sides: a mesh compared with itself scores exactly zero.
    const PointCloud ref = sample_surface(gt, samples, seed);
    EvalReport r;
    r.scene = "mesh";
    r.chamfer = chamfer_distance(pred.points, ref.points);
    // Normal error against the nearest reference sample.
    const NearestNeighborGrid grid(ref.points);
    double sum = 0.0;
    for (size_t i = 0; i < pred.points.size(); ++i) {
        const size_t j = grid.nearest(pred.points[i]).first;
        sum += std::acos(std::clamp(pred.normals[i].dot(ref.normals[j]), -1.0, 1.0));
    }
    r.normal_error_deg = sum / double(pred.points.size()) * 180.0 / kPi;
    r.samples = samples;
    return r;
}

void append_report_csv(const std::filesystem::path &path, const EvalReport &report) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("cannot write " + path.string());
    if (fresh) out << "scene,chamfer,normal_error_deg,samples\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%zu\n", report.scene.c_str(), report.chamfer, report.normal_error_deg,
                  report.samples);
    out << buf;
}

}  // namespace polsdf
