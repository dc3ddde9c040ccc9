#pragma once

#include "polsdf/marching_cubes.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace polsdf {

struct PointCloud {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
};

// Area-uniform samples with their face normals.
PointCloud sample_surface(const Mesh &mesh, size_t count, uint64_t seed);

// Samples the zero set of an analytic SDF: area sampling of a fine marching-cubes
// mesh followed by projection onto the exact surface. Normals are analytic.
PointCloud sample_analytic_surface(const AnalyticSdf &sdf, const Box3 &bbox, size_t count, uint64_t seed,
                                   int resolution = 160);

// Exact nearest-neighbour distances through a uniform bucket grid.
class NearestNeighborGrid {
  public:
    explicit NearestNeighborGrid(std::span<const Vec3> points);
    // Index of the closest point and its distance.
    std::pair<size_t, double> nearest(const Vec3 &q) const;
    double distance(const Vec3 &q) const { return nearest(q).second; }

  private:
    std::array<int, 3> cell_of(const Vec3 &p) const;

    std::vector<Vec3> points_;
    Vec3 origin_ = Vec3::Zero();
    double cell_ = 1.0;
    std::array<int, 3> dims_{1, 1, 1};
    std::vector<uint32_t> start_;  // bucket offsets, size = cell count + 1
    std::vector<uint32_t> order_;
};

// Mean nearest distance from a to b plus mean nearest distance from b to a.
double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b);

// Mean angle in degrees between the sampled face normals and the analytic gradient.
// The mesh-vs-mesh report compares against the nearest reference sample's normal.
double normal_error_degrees(const PointCloud &samples, const AnalyticSdf &gt);

struct EvalReport {
    std::string scene;
    double chamfer = 0.0;
    double normal_error_deg = 0.0;
    size_t samples = 0;
};

EvalReport evaluate_mesh(const Mesh &mesh, const AnalyticSdf &gt, const Box3 &bbox, size_t samples, uint64_t seed);
EvalReport evaluate_mesh(const Mesh &mesh, const Mesh &gt, size_t samples, uint64_t seed);

// CSV with header `scene,chamfer,normal_error_deg,samples`; rows are appended.
void append_report_csv(const std::filesystem::path &path, const EvalReport &report);

}  // namespace polsdf
