#pragma once

#include "polsdf/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace polsdf {

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<uint32_t, 3>> faces;

    bool empty() const { return faces.empty(); }
    double area() const;
};

// Scalar values on the vertices of a regular grid spanning `bbox`,
// stored x fastest: values[(k * ny + j) * nx + i].
struct ScalarGrid {
    Box3 bbox;
    std::array<int, 3> resolution{0, 0, 0};
    std::vector<double> values;

    double &at(int i, int j, int k) { return values[(size_t(k) * resolution[1] + j) * resolution[0] + i]; }
    double at(int i, int j, int k) const { return values[(size_t(k) * resolution[1] + j) * resolution[0] + i]; }
    Vec3 position(int i, int j, int k) const;
};

ScalarGrid sample_grid(const SdfField &field, int resolution);
ScalarGrid sample_grid(const AnalyticSdf &sdf, const Box3 &bbox, int resolution);

// Zero level set with shared vertices along cube edges and outward (CCW) faces for
// fields that are negative inside. Degenerate triangles are dropped. No crossing
// gives an empty mesh.
Mesh marching_cubes(const ScalarGrid &grid);

// ASCII PLY with float vertices and uint triangle lists.
void write_ply(const std::filesystem::path &path, const Mesh &mesh);
Mesh read_ply(const std::filesystem::path &path);

}  // namespace polsdf
