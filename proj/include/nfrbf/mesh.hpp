#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace nfrbf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Tri = std::array<int, 3>;

/// Collocation nodes. Flat node sets store z = 0 and carry per-node boundary flags.
struct NodeSet {
    int dim = 2;
    std::vector<Vec3> points;
    std::vector<bool> boundary;

    std::size_t size() const { return points.size(); }
    Vec2 xy(std::size_t i) const { return points[i].head<2>(); }
};

/// Triangulation of a flat domain; triangles are counter-clockwise.
struct PlanarMesh {
    NodeSet nodes;
    std::vector<Tri> triangles;
    std::vector<Vec2> centroids;

    double area() const;
};

/// Closed triangulated surface.
///
/// `adjacency[t][e]` is the triangle sharing edge (triangles[t][e], triangles[t][(e+1)%3]),
/// or -1 for a boundary edge. Normals are filled by `orient_surface`.
struct SurfaceMesh {
    NodeSet nodes;
    std::vector<Tri> triangles;
    std::vector<Vec3> normals;
    std::vector<std::array<int, 3>> adjacency;

    std::size_t num_triangles() const { return triangles.size(); }
    Vec3 centroid(std::size_t t) const;
    double triangle_area(std::size_t t) const;
    double area() const;
};

double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c);
double signed_area(const Vec2& a, const Vec2& b, const Vec2& c);
double circumradius(const Vec3& a, const Vec3& b, const Vec3& c);
Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c);

/// Fills `centroids` from the triangle list.
void compute_centroids(PlanarMesh& mesh);

/// Builds edge adjacency. Throws DegenerateGeometry when an edge is shared by more than two
/// triangles; boundary edges get -1.
void build_adjacency(SurfaceMesh& mesh);

/// True when every edge is shared by exactly two triangles.
bool is_watertight(const SurfaceMesh& mesh);

/// Makes the winding consistent across edges, flips it so the enclosed signed volume is
/// positive, then rebuilds adjacency and unit normals. Throws DegenerateGeometry for
/// non-orientable meshes or zero-area triangles.
void orient_surface(SurfaceMesh& mesh);

/// Signed enclosed volume (positive for outward winding on a closed surface).
double signed_volume(const SurfaceMesh& mesh);

/// V - E + F.
long euler_characteristic(const SurfaceMesh& mesh);

/// Stable 64-bit FNV-1a hash of coordinates and connectivity.
std::uint64_t mesh_hash(const SurfaceMesh& mesh);
std::uint64_t mesh_hash(const PlanarMesh& mesh);

}  // namespace nfrbf
