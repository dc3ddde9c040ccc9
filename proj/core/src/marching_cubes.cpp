#include "polsdf/marching_cubes.hpp"

#include "polsdf/marching_cubes_tables.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace polsdf {

double Mesh::area() const {
    double a = 0.0;
    for (const auto &f : faces)
        a += 0.5 * (vertices[f[1]] - vertices[f[0]]).cross(vertices[f[2]] - vertices[f[0]]).norm();
    return a;
}

Vec3 ScalarGrid::position(int i, int j, int k) const {
    const Vec3 step = bbox.sizes().cwiseQuotient(Vec3(resolution[0] - 1, resolution[1] - 1, resolution[2] - 1));
    return bbox.min() + Vec3(i, j, k).cwiseProduct(step);
}

namespace {

template <class F>
ScalarGrid sample(const Box3 &bbox, int resolution, F &&eval) {
    if (resolution < 2) throw Error("grid resolution must be at least 2");
    ScalarGrid g;
    g.bbox = bbox;
    g.resolution = {resolution, resolution, resolution};
    g.values.resize(size_t(resolution) * resolution * resolution);
    for (int k = 0; k < resolution; ++k)
        for (int j = 0; j < resolution; ++j)
            for (int i = 0; i < resolution; ++i) g.at(i, j, k) = eval(g.position(i, j, k));
    return g;
}

// Corner offsets and edge endpoints of the table's cube convention.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                              {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

}  // namespace

ScalarGrid sample_grid(const SdfField &field, int resolution) {
    return sample(field.bbox(), resolution, [&](const Vec3 &x) { return field.sdf(x); });
}

ScalarGrid sample_grid(const AnalyticSdf &sdf, const Box3 &bbox, int resolution) {
    return sample(bbox, resolution, [&](const Vec3 &x) { return sdf.distance(x); });
}

Mesh marching_cubes(const ScalarGrid &grid) {
    const auto [nx, ny, nz] = grid.resolution;
    Mesh mesh;
    // Key: lower grid vertex of the edge times 3 plus its axis.
    std::unordered_map<uint64_t, uint32_t> edge_vertex;

    auto vertex_on_edge = [&](int i, int j, int k, int e) -> uint32_t {
        const int *a = kCorner[kEdge[e][0]];
        const int *b = kCorner[kEdge[e][1]];
        int lo[3], axis = 0;
        for (int c = 0; c < 3; ++c) {
            lo[c] = std::min(a[c], b[c]);
            if (a[c] != b[c]) axis = c;
        }
        const int gi = i + lo[0], gj = j + lo[1], gk = k + lo[2];
        const uint64_t key = ((uint64_t(gk) * ny + gj) * nx + gi) * 3 + axis;
        if (auto it = edge_vertex.find(key); it != edge_vertex.end()) return it->second;
        int hi[3] = {gi, gj, gk};
        hi[axis] += 1;
        const double v0 = grid.at(gi, gj, gk), v1 = grid.at(hi[0], hi[1], hi[2]);
        const double t = v0 / (v0 - v1);
        const Vec3 p = grid.position(gi, gj, gk) + t * (grid.position(hi[0], hi[1], hi[2]) - grid.position(gi, gj, gk));
        const uint32_t id = uint32_t(mesh.vertices.size());
        mesh.vertices.push_back(p);
        edge_vertex.emplace(key, id);
        return id;
    };

    for (int k = 0; k + 1 < nz; ++k) {
        for (int j = 0; j + 1 < ny; ++j) {
            for (int i = 0; i + 1 < nx; ++i) {
                int config = 0;
                for (int c = 0; c < 8; ++c)
                    if (grid.at(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]) < 0.0) config |= 1 << c;
                if (config == 0 || config == 255) continue;
                const auto &tris = mc::kTriTable[config];
                for (int t = 0; t < 16 && tris[t] >= 0; t += 3) {
                    const uint32_t a = vertex_on_edge(i, j, k, tris[t]);
                    const uint32_t b = vertex_on_edge(i, j, k, tris[t + 1]);
                    const uint32_t c = vertex_on_edge(i, j, k, tris[t + 2]);
                    if (a == b || b == c || a == c) continue;
                    const Vec3 n = (mesh.vertices[b] - mesh.vertices[a]).cross(mesh.vertices[c] - mesh.vertices[a]);
                    if (n.squaredNorm() <= 0.0) continue;
                    // The table winds faces towards the negative side.
                    mesh.faces.push_back({a, c, b});
                }
            }
        }
    }
    return mesh;
}

void write_ply(const std::filesystem::path &path, const Mesh &mesh) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "element face " << mesh.faces.size() << "\n";
    out << "property list uchar uint vertex_indices\nend_header\n";
    char buf[96];
    for (const auto &v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const auto &f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

Mesh read_ply(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path.string());
    std::string line;
    size_t nv = 0, nf = 0;
    std::getline(in, line);
    if (line != "ply") throw DataError(path.string() + " is not a PLY file");
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key, what;
        ls >> key;
        if (key == "format") {
            ls >> what;
            if (what != "ascii") throw DataError("only ASCII PLY is supported");
        } else if (key == "element") {
            size_t n = 0;
            ls >> what >> n;
            if (what == "vertex") nv = n;
            else if (what == "face") nf = n;
        } else if (key == "end_header") {
            break;
        }
    }
    Mesh mesh;
    mesh.vertices.resize(nv);
    for (auto &v : mesh.vertices) {
        if (!std::getline(in, line)) throw DataError("truncated PLY vertex list");
        std::istringstream ls(line);
        if (!(ls >> v.x() >> v.y() >> v.z())) throw DataError("malformed PLY vertex");
    }
    mesh.faces.reserve(nf);
    for (size_t f = 0; f < nf; ++f) {
        if (!std::getline(in, line)) throw DataError("truncated PLY face list");
        std::istringstream ls(line);
        size_t count = 0;
        ls >> count;
        std::vector<uint32_t> idx(count);
        for (auto &i : idx) ls >> i;
        if (!ls || count < 3) throw DataError("malformed PLY face");
        for (uint32_t i : idx)
            if (i >= nv) throw DataError("PLY face index out of range");
        for (size_t t = 1; t + 1 < count; ++t) mesh.faces.push_back({idx[0], idx[t], idx[t + 1]});
    }
    return mesh;
}

}  // namespace polsdf
