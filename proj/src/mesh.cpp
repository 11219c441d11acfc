#include "nfrbf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "nfrbf/error.hpp"

namespace nfrbf {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return std::abs(signed_area(a, b, c));
}

double circumradius(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double la = (b - c).norm();
    const double lb = (c - a).norm();
    const double lc = (a - b).norm();
    const double twice_area = (b - a).cross(c - a).norm();
    if (twice_area == 0.0) return std::numeric_limits<double>::infinity();
    return la * lb * lc / (2.0 * twice_area);
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
    const Vec2 ba = b - a;
    const Vec2 ca = c - a;
    const double d = 2.0 * (ba.x() * ca.y() - ba.y() * ca.x());
    const double b2 = ba.squaredNorm();
    const double c2 = ca.squaredNorm();
    return a + Vec2(ca.y() * b2 - ba.y() * c2, ba.x() * c2 - ca.x() * b2) / d;
}

double PlanarMesh::area() const {
    double total = 0.0;
    for (const auto& t : triangles)
        total += triangle_area(nodes.xy(t[0]), nodes.xy(t[1]), nodes.xy(t[2]));
    return total;
}

void compute_centroids(PlanarMesh& mesh) {
    mesh.centroids.resize(mesh.triangles.size());
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const auto& t = mesh.triangles[i];
        mesh.centroids[i] = (mesh.nodes.xy(t[0]) + mesh.nodes.xy(t[1]) + mesh.nodes.xy(t[2])) / 3.0;
    }
}

Vec3 SurfaceMesh::centroid(std::size_t t) const {
    const auto& tri = triangles[t];
    return (nodes.points[tri[0]] + nodes.points[tri[1]] + nodes.points[tri[2]]) / 3.0;
}

double SurfaceMesh::triangle_area(std::size_t t) const {
    const auto& tri = triangles[t];
    const Vec3& a = nodes.points[tri[0]];
    return 0.5 * (nodes.points[tri[1]] - a).cross(nodes.points[tri[2]] - a).norm();
}

double SurfaceMesh::area() const {
    double total = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t) total += triangle_area(t);
    return total;
}

namespace {

std::uint64_t edge_key(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
}

}  // namespace

void build_adjacency(SurfaceMesh& mesh) {
    std::map<std::uint64_t, std::vector<std::pair<int, int>>> edges;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t)
        for (int e = 0; e < 3; ++e)
            edges[edge_key(mesh.triangles[t][e], mesh.triangles[t][(e + 1) % 3])].push_back({t, e});

    mesh.adjacency.assign(mesh.triangles.size(), {-1, -1, -1});
    for (const auto& [key, uses] : edges) {
        if (uses.size() > 2)
            throw DegenerateGeometry("non-manifold edge (" + std::to_string(key >> 32) + ", " +
                                     std::to_string(key & 0xffffffffu) + ") shared by " +
                                     std::to_string(uses.size()) + " triangles");
        if (uses.size() == 2) {
            mesh.adjacency[uses[0].first][uses[0].second] = uses[1].first;
            mesh.adjacency[uses[1].first][uses[1].second] = uses[0].first;
        }
    }
}

double signed_volume(const SurfaceMesh& mesh) {
    double v = 0.0;
    for (const auto& t : mesh.triangles)
        v += mesh.nodes.points[t[0]].dot(mesh.nodes.points[t[1]].cross(mesh.nodes.points[t[2]]));
    return v / 6.0;
}

namespace {

// +1 when t2 traverses the shared edge (a, b) as (b, a), -1 when as (a, b)
int edge_agreement(const Tri& t2, int a, int b) {
    for (int e = 0; e < 3; ++e) {
        if (t2[e] == b && t2[(e + 1) % 3] == a) return 1;
        if (t2[e] == a && t2[(e + 1) % 3] == b) return -1;
    }
    return 0;
}

}  // namespace

void orient_surface(SurfaceMesh& mesh) {
    build_adjacency(mesh);
    // neighbour sets stay valid while triangles are flipped; adjacency slots do not
    const std::vector<std::array<int, 3>> neighbours = mesh.adjacency;
    const int m = static_cast<int>(mesh.triangles.size());
    std::vector<int> component(m, -1);
    std::vector<std::vector<int>> members;
    for (int seed = 0; seed < m; ++seed) {
        if (component[seed] >= 0) continue;
        const int id = static_cast<int>(members.size());
        members.emplace_back();
        std::vector<int> queue{seed};
        component[seed] = id;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const int t = queue[q];
            members[id].push_back(t);
            for (int u : neighbours[t]) {
                if (u < 0) continue;
                int agree = 0;
                for (int e = 0; e < 3 && agree == 0; ++e)
                    agree = edge_agreement(mesh.triangles[u], mesh.triangles[t][e], mesh.triangles[t][(e + 1) % 3]);
                if (component[u] >= 0) {
                    if (agree < 0)
                        throw DegenerateGeometry("surface is not orientable (triangles " + std::to_string(t) +
                                                 " and " + std::to_string(u) + ")");
                    continue;
                }
                if (agree < 0) std::swap(mesh.triangles[u][1], mesh.triangles[u][2]);
                component[u] = id;
                queue.push_back(u);
            }
        }
    }
    for (const auto& tris : members) {
        double v = 0.0;
        for (int t : tris) {
            const auto& tri = mesh.triangles[t];
            v += mesh.nodes.points[tri[0]].dot(mesh.nodes.points[tri[1]].cross(mesh.nodes.points[tri[2]]));
        }
        if (v < 0.0)
            for (int t : tris) std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
    }
    build_adjacency(mesh);

    mesh.normals.resize(m);
    for (int t = 0; t < m; ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec3 c = (mesh.nodes.points[tri[1]] - mesh.nodes.points[tri[0]])
                           .cross(mesh.nodes.points[tri[2]] - mesh.nodes.points[tri[0]]);
        const double len = c.norm();
        if (!(len > 0.0)) throw DegenerateGeometry("triangle " + std::to_string(t) + " has zero area");
        mesh.normals[t] = c / len;
    }
}

bool is_watertight(const SurfaceMesh& mesh) {
    std::map<std::uint64_t, int> count;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) ++count[edge_key(t[e], t[(e + 1) % 3])];
    return std::all_of(count.begin(), count.end(), [](const auto& kv) { return kv.second == 2; });
}

long euler_characteristic(const SurfaceMesh& mesh) {
    std::set<std::uint64_t> edges;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) edges.insert(edge_key(t[e], t[(e + 1) % 3]));
    return static_cast<long>(mesh.nodes.size()) - static_cast<long>(edges.size()) +
           static_cast<long>(mesh.triangles.size());
}

namespace {

struct Fnv1a {
    std::uint64_t state = 1469598103934665603ull;
    void bytes(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            state ^= p[i];
            state *= 1099511628211ull;
        }
    }
    template <class T>
    void value(const T& v) {
        bytes(&v, sizeof(T));
    }
};

template <class Points, class Tris>
std::uint64_t hash_geometry(const Points& points, const Tris& tris) {
    Fnv1a h;
    h.value(static_cast<std::uint64_t>(points.size()));
    for (const auto& p : points) {
        h.value(p.x());
        h.value(p.y());
        h.value(p.z());
    }
    h.value(static_cast<std::uint64_t>(tris.size()));
    for (const auto& t : tris)
        for (int v : t) h.value(static_cast<std::int32_t>(v));
    return h.state;
}

}  // namespace

std::uint64_t mesh_hash(const SurfaceMesh& mesh) {
    return hash_geometry(mesh.nodes.points, mesh.triangles);
}

std::uint64_t mesh_hash(const PlanarMesh& mesh) {
    return hash_geometry(mesh.nodes.points, mesh.triangles);
}

}  // namespace nfrbf
